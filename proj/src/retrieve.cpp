#include "diachron/retrieve.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>

#include "diachron/error.h"

namespace diachron {

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j share the mean of ranks i+1..j+1
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

size_t edit_distance(const std::string &a, const std::string &b) {
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void assign_ranks(RankedCandidates &c) {
  for (size_t i = 0; i < c.items.size(); ++i) c.items[i].final_rank = static_cast<int>(i + 1);
}

}  // namespace

Method parse_method(const std::string &name) {
  if (name == "op" || name == "OP") return Method::kOP;
  if (name == "opsc" || name == "op_sc" || name == "OP_SC" || name == "OP+SC") return Method::kOPSC;
  if (name == "lt" || name == "LT") return Method::kLT;
  throw DataError("unknown method '" + name + "' (op, opsc, lt)");
}

const char *to_string(Method m) {
  switch (m) {
    case Method::kOP: return "OP";
    case Method::kOPSC: return "OP+SC";
    case Method::kLT: return "LT";
  }
  return "?";
}

RerankOrder parse_order(const std::string &name) {
  if (name == "anti" || name == "anticorrelated_first") return RerankOrder::kAnticorrelatedFirst;
  if (name == "desc" || name == "correlated_first") return RerankOrder::kCorrelatedFirst;
  throw DataError("unknown rerank order '" + name + "' (anti, desc)");
}

const char *to_string(RerankOrder o) {
  return o == RerankOrder::kAnticorrelatedFirst ? "anticorrelated_first" : "correlated_first";
}

int RankedCandidates::rank_of(const std::string &token) const {
  for (const auto &c : items) {
    if (c.token == token) return c.final_rank;
  }
  return 0;
}

RankedCandidates knn(const EmbeddingSpace &space, const Eigen::Ref<const Vector> &query, size_t k,
                     const std::unordered_set<std::string> &exclude) {
  if (k < 1) throw DataError("k must be at least 1");
  if (space.size() == 0) throw DataError("cannot search an empty embedding space");
  if (query.size() != space.dim()) {
    throw DataError("query of dimension " + std::to_string(query.size()) + " against a " +
                    std::to_string(space.dim()) + "-dimensional space");
  }

  const double qnorm = query.norm();
  const Matrix &m = space.vectors();
  std::vector<std::pair<double, size_t>> scored;
  scored.reserve(space.size());
  for (size_t i = 0; i < space.size(); ++i) {
    if (!exclude.empty() && exclude.count(space.vocabulary()[i])) continue;
    const auto row = m.row(static_cast<Eigen::Index>(i));
    const double denom = qnorm * row.norm();
    scored.emplace_back(denom > 0.0 ? row.dot(query) / denom : 0.0, i);
  }

  RankedCandidates out;
  out.k = k;
  out.pool = k;
  if (k > scored.size()) {
    out.warnings.push_back("k=" + std::to_string(k) + " exceeds the " +
                           std::to_string(scored.size()) + " searchable words");
  }
  const size_t n = std::min(k, scored.size());
  const auto &vocab = space.vocabulary();
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [&](const auto &a, const auto &b) {
                      if (a.first != b.first) return a.first > b.first;
                      return vocab[a.second] < vocab[b.second];
                    });
  out.items.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    out.items.push_back({vocab[scored[i].second], scored[i].first, std::nullopt, 0});
  }
  assign_ranks(out);
  return out;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw NumericError("Spearman correlation needs equal-length series");
  if (a.size() < 2) throw NumericError("Spearman correlation needs at least two points");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;  // average ranks always sum to n(n+1)/2
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - mean;
    const double db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw NumericError("Spearman correlation of a constant series");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

RankedCandidates rerank_spearman(RankedCandidates cands, const FrequencySeries &query_series,
                                 const SeriesLookup &lookup, RerankOrder order) {
  for (auto &c : cands.items) {
    c.rho.reset();
    auto series = lookup ? lookup(c.token) : std::nullopt;
    std::vector<double> values = series ? series->values
                                        : std::vector<double>(query_series.values.size(), 0.0);
    try {
      c.rho = spearman(query_series.values, values);
    } catch (const NumericError &) {
    }
  }
  const double sign = order == RerankOrder::kAnticorrelatedFirst ? 1.0 : -1.0;
  std::stable_sort(cands.items.begin(), cands.items.end(), [&](const Candidate &x, const Candidate &y) {
    if (x.rho.has_value() != y.rho.has_value()) return x.rho.has_value();
    if (!x.rho) return false;  // both undefined: keep previous order
    if (*x.rho != *y.rho) return sign * *x.rho < sign * *y.rho;
    return x.cosine > y.cosine;
  });
  cands.order = order;
  assign_ranks(cands);
  return cands;
}

FrequencyStore::FrequencyStore(const PeriodMap &periods) {
  for (const auto &[period, pc] : periods) {
    periods_.push_back(period);
    token_counts_.push_back(pc.token_count());
    counts_.push_back(pc.vocabulary());
  }
}

FrequencySeries FrequencyStore::series(const std::string &word) const {
  FrequencySeries s;
  s.word = word;
  s.periods = periods_;
  for (size_t i = 0; i < periods_.size(); ++i) {
    auto it = counts_[i].find(word);
    const int64_t c = it == counts_[i].end() ? 0 : it->second;
    s.counts.push_back(c);
    s.values.push_back(token_counts_[i] > 0
                           ? static_cast<double>(c) / static_cast<double>(token_counts_[i])
                           : 0.0);
  }
  return s;
}

size_t default_rerank_pool(size_t k) {
  switch (k) {
    case 1: return 5;
    case 10: return 15;
    case 100: return 150;
    default: return std::max(k + 5, (3 * k + 1) / 2);
  }
}

CounterpartRetriever::CounterpartRetriever(const EmbeddingSpace &base, const EmbeddingSpace &target,
                                           AlignmentMap map, const FrequencyStore *frequencies)
    : base_(preprocess(base, map.preprocessing)),
      target_(preprocess(target, map.preprocessing)),
      map_(std::move(map)),
      frequencies_(frequencies) {
  if (base_.dim() != map_.matrix.rows() || target_.dim() != map_.matrix.rows()) {
    throw DataError("alignment map dimension " + std::to_string(map_.matrix.rows()) +
                    " does not match the embedding spaces");
  }
}

RankedCandidates CounterpartRetriever::query(const std::string &word,
                                             const QueryOptions &options) const {
  const bool wants_linear = options.method == Method::kLT;
  if (wants_linear != (map_.kind == MapKind::kLinear)) {
    throw DataError(std::string("method ") + to_string(options.method) + " needs " +
                    (wants_linear ? "a linear" : "an orthogonal") + " alignment map");
  }
  auto index = base_.index_of(word);
  if (!index) {
    std::string hint;
    for (const auto &s : nearest_spellings(word, base_.vocabulary())) hint += " " + s;
    throw DataError("'" + word + "' is not in the base vocabulary; closest spellings:" + hint);
  }
  const Vector v = base_.vectors().row(static_cast<Eigen::Index>(*index)).transpose();
  const Vector aligned = align_vector(map_, v);
  std::unordered_set<std::string> exclude;
  if (options.exclude_query) exclude.insert(word);

  if (options.method != Method::kOPSC) {
    auto result = knn(target_, aligned, options.k, exclude);
    result.query = word;
    result.method = options.method;
    result.order = options.order;
    return result;
  }

  if (!frequencies_ || frequencies_->empty()) {
    throw DataError("OP+SC needs frequency series (a period store)");
  }
  const size_t pool = options.pool ? options.pool : default_rerank_pool(options.k);
  if (pool < options.k) throw DataError("rerank pool must be at least k");
  auto pooled = knn(target_, aligned, pool, exclude);
  const auto lookup = [this](const std::string &tok) -> std::optional<FrequencySeries> {
    return frequencies_->series(tok);
  };
  auto result = rerank_spearman(std::move(pooled), frequencies_->series(word), lookup, options.order);
  if (result.items.size() > options.k) result.items.resize(options.k);
  result.query = word;
  result.method = Method::kOPSC;
  result.k = options.k;
  result.pool = pool;
  return result;
}

RankedCandidates query_counterparts(const std::string &word, const EmbeddingSpace &base,
                                    const EmbeddingSpace &target, const AlignmentMap &map,
                                    const QueryOptions &options, const FrequencyStore *frequencies) {
  return CounterpartRetriever(base, target, map, frequencies).query(word, options);
}

std::vector<std::string> nearest_spellings(const std::string &word,
                                           const std::vector<std::string> &vocabulary, size_t n) {
  std::vector<std::pair<size_t, std::string>> scored;
  scored.reserve(vocabulary.size());
  for (const auto &tok : vocabulary) scored.emplace_back(edit_distance(word, tok), tok);
  n = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end());
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back(scored[i].second);
  return out;
}

void write_candidates_tsv(std::ostream &out, const RankedCandidates &cands) {
  const auto flags = out.flags();
  const auto precision = out.precision(6);
  out << "# query=" << cands.query << "\tmethod=" << to_string(cands.method) << "\tk=" << cands.k
      << "\tpool=" << cands.pool << "\torder=" << to_string(cands.order) << '\n';
  out << "rank\ttoken\tcosine\trho\n";
  for (const auto &c : cands.items) {
    out << c.final_rank << '\t' << c.token << '\t' << c.cosine << '\t';
    if (c.rho) out << *c.rho;
    else out << "NA";
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

nlohmann::json to_json(const RankedCandidates &cands) {
  nlohmann::json j;
  j["query"] = cands.query;
  j["method"] = to_string(cands.method);
  j["k"] = cands.k;
  j["pool"] = cands.pool;
  j["order"] = to_string(cands.order);
  j["warnings"] = cands.warnings;
  j["items"] = nlohmann::json::array();
  for (const auto &c : cands.items) {
    nlohmann::json item{{"rank", c.final_rank}, {"token", c.token}, {"cosine", c.cosine}};
    item["rho"] = c.rho ? nlohmann::json(*c.rho) : nlohmann::json(nullptr);
    j["items"].push_back(std::move(item));
  }
  return j;
}

}  // namespace diachron
