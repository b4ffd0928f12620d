#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "diachron/align.h"
#include "diachron/corpus.h"
#include "diachron/embedding.h"

namespace diachron {

enum class Method { kOP, kOPSC, kLT };
enum class RerankOrder { kAnticorrelatedFirst, kCorrelatedFirst };

Method parse_method(const std::string &name);
const char *to_string(Method m);
RerankOrder parse_order(const std::string &name);
const char *to_string(RerankOrder o);

struct Candidate {
  std::string token;
  double cosine = 0.0;
  std::optional<double> rho;
  int final_rank = 0;
};

struct RankedCandidates {
  std::string query;
  Method method = Method::kOP;
  size_t k = 0;
  size_t pool = 0;
  RerankOrder order = RerankOrder::kAnticorrelatedFirst;
  std::vector<Candidate> items;
  std::vector<std::string> warnings;

  // 1-based rank of token, or 0 when absent.
  int rank_of(const std::string &token) const;
};

// Exact cosine scan; ties broken by token. A zero query scores 0 everywhere.
RankedCandidates knn(const EmbeddingSpace &space, const Eigen::Ref<const Vector> &query, size_t k,
                     const std::unordered_set<std::string> &exclude = {});

// Pearson correlation of average ranks. Throws NumericError if either
// series is constant or the lengths differ or are below 2.
double spearman(std::span<const double> a, std::span<const double> b);

using SeriesLookup = std::function<std::optional<FrequencySeries>(const std::string &)>;

// Annotates every candidate with rho against the query series and reorders
// by rho (direction from `order`), cosine descending breaking ties. Candidates
// whose rho is undefined follow, in their previous order.
RankedCandidates rerank_spearman(RankedCandidates cands, const FrequencySeries &query_series,
                                 const SeriesLookup &lookup, RerankOrder order);

// Relative-frequency trajectories over every period of a store.
class FrequencyStore {
 public:
  FrequencyStore() = default;
  explicit FrequencyStore(const PeriodMap &periods);

  FrequencySeries series(const std::string &word) const;
  const std::vector<TimePeriod> &periods() const { return periods_; }
  bool empty() const { return periods_.empty(); }

 private:
  std::vector<TimePeriod> periods_;
  std::vector<int64_t> token_counts_;
  std::vector<Vocabulary> counts_;
};

// Neighbour pool used by OP+SC for a final list of k.
size_t default_rerank_pool(size_t k);

struct QueryOptions {
  Method method = Method::kOP;
  size_t k = 10;
  size_t pool = 0;  // 0 selects default_rerank_pool(k)
  RerankOrder order = RerankOrder::kAnticorrelatedFirst;
  bool exclude_query = true;  // never return the query token itself
};

// Holds both spaces preprocessed the way the alignment map was fitted.
class CounterpartRetriever {
 public:
  CounterpartRetriever(const EmbeddingSpace &base, const EmbeddingSpace &target, AlignmentMap map,
                       const FrequencyStore *frequencies = nullptr);

  RankedCandidates query(const std::string &word, const QueryOptions &options) const;
  const EmbeddingSpace &base() const { return base_; }
  const EmbeddingSpace &target() const { return target_; }
  const AlignmentMap &map() const { return map_; }

 private:
  EmbeddingSpace base_;
  EmbeddingSpace target_;
  AlignmentMap map_;
  const FrequencyStore *frequencies_;
};

RankedCandidates query_counterparts(const std::string &word, const EmbeddingSpace &base,
                                    const EmbeddingSpace &target, const AlignmentMap &map,
                                    const QueryOptions &options,
                                    const FrequencyStore *frequencies = nullptr);

// Closest vocabulary entries by edit distance.
std::vector<std::string> nearest_spellings(const std::string &word,
                                           const std::vector<std::string> &vocabulary,
                                           size_t n = 5);

// Header record "# method=.. k=.. pool=.. order=.." then rank, token, cosine, rho.
void write_candidates_tsv(std::ostream &out, const RankedCandidates &cands);
nlohmann::json to_json(const RankedCandidates &cands);

}  // namespace diachron
