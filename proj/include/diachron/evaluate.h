#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diachron/align.h"
#include "diachron/corpus.h"
#include "diachron/embedding.h"
#include "diachron/retrieve.h"

namespace diachron {

struct GoldPair {
  std::string query;
  std::string counterpart;
};

struct GoldPairSet {
  std::vector<GoldPair> pairs;
  std::string provenance;
};

// Two tab-separated columns per line; '#' lines and blank lines ignored.
GoldPairSet load_gold_pairs(const std::filesystem::path &path);
void save_gold_pairs(const GoldPairSet &gold, const std::filesystem::path &path);

// Results keyed by query word. Gold queries without an entry were
// out of vocabulary.
using ResultSet = std::map<std::string, RankedCandidates>;

enum class OovPolicy { kSkip, kCountAsMiss };

// Fraction of evaluated queries whose counterpart is ranked within k.
double recall_at_k(const ResultSet &results, const GoldPairSet &gold, size_t k,
                   OovPolicy policy = OovPolicy::kSkip);
// Mean reciprocal rank; an absent counterpart contributes 0.
double mrr(const ResultSet &results, const GoldPairSet &gold, OovPolicy policy = OovPolicy::kSkip);

enum class PairField { kQuery, kCounterpart };

struct FilterResult {
  GoldPairSet kept;
  size_t removed = 0;
};

// Keeps pairs whose chosen word is in every vocabulary.
FilterResult filter_pairs_present(const GoldPairSet &gold,
                                  const std::vector<const EmbeddingSpace *> &spaces,
                                  PairField field = PairField::kQuery);

struct EvalCell {
  Method method = Method::kOP;
  std::string embedding;
  std::string base_period;
  std::string target_period;
  std::map<size_t, double> recall_at;
  double mrr = 0.0;
  size_t n_queries = 0;
  size_t n_skipped_oov = 0;
};

struct EvalReport {
  std::vector<EvalCell> cells;
  OovPolicy oov_policy = OovPolicy::kSkip;
};

struct EvalOptions {
  std::vector<size_t> ks{1, 10, 100};
  RerankOrder order = RerankOrder::kAnticorrelatedFirst;
  OovPolicy oov_policy = OovPolicy::kSkip;
};

// Scores one method. OP+SC recall@k uses a fresh query with the default
// pool for k; MRR uses the list for the largest k.
EvalCell evaluate_method(const CounterpartRetriever &retriever, const GoldPairSet &gold,
                         Method method, const EvalOptions &options);

struct AlignmentSettings {
  Preprocess preprocess = Preprocess::kL2Normalize;
  size_t seed_top_n = 1000;
  double ridge_alpha = 0.2;
};

// Fits the maps the methods need and evaluates each method on one
// base/target pair of spaces.
std::vector<EvalCell> evaluate_pair(const EmbeddingSpace &base, const EmbeddingSpace &target,
                                    const PeriodCorpus &base_corpus, const PeriodCorpus &target_corpus,
                                    const FrequencyStore &frequencies, const GoldPairSet &gold,
                                    const std::vector<Method> &methods, const std::string &embedding,
                                    const AlignmentSettings &alignment, const EvalOptions &options);

using Trainer = std::function<EmbeddingSpace(const PeriodCorpus &)>;

struct SweepConfig {
  std::string base;
  std::vector<std::string> targets;
  std::vector<Method> methods{Method::kOP, Method::kOPSC, Method::kLT};
  std::string embedding = "svd";
  bool balance_tokens = false;
  uint64_t seed = 1;
  AlignmentSettings alignment;
  EvalOptions eval{{10}};
};

// Whole documents, shuffled with `seed`, kept while they fit in max_tokens.
PeriodCorpus downsample_documents(const PeriodCorpus &pc, int64_t max_tokens, uint64_t seed);

EvalReport temporal_sweep(const PeriodMap &periods, const GoldPairSet &gold,
                          const SweepConfig &config, const Trainer &trainer);

nlohmann::json to_json(const EvalReport &report);
// Columns: method, embedding, base, target, k, recall, mrr.
void write_report_csv(std::ostream &out, const EvalReport &report);

struct SyntheticSpec {
  size_t n_pairs = 20;
  size_t n_filler_words = 200;
  size_t docs_per_period = 5000;
  std::vector<int> periods{1930, 1940, 1950, 1960, 1970, 1980};
  uint64_t seed = 7;
};

struct SyntheticCorpus {
  std::vector<std::string> jsonl_lines;
  GoldPairSet gold;
};

// Nine-token template documents: "f f c c X c c f f" where X is old<i> or
// new<i>, the c's are four of the six context words owned by pair i and the
// f's follow a fixed random successor graph over the filler words. Half the
// documents of a period are pair templates, the rest pure filler walks. The
// first period says only old<i>, the last only new<i>; in between the old
// share falls and the new share rises strictly, and every period has the
// same token count.
SyntheticCorpus generate_synthetic_replacement_corpus(const SyntheticSpec &spec);
void write_synthetic_corpus(const SyntheticCorpus &corpus, const std::filesystem::path &dir);

}  // namespace diachron
