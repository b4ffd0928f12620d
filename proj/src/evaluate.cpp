#include "diachron/evaluate.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>

#include "diachron/error.h"
#include "diachron/store.h"

namespace diachron {

namespace {

struct Tally {
  double sum = 0.0;
  size_t evaluated = 0;
};

// Applies `score` to the rank of each gold counterpart (0 = not retrieved).
template <typename Score>
Tally tally(const ResultSet &results, const GoldPairSet &gold, OovPolicy policy, Score score) {
  Tally t;
  for (const auto &pair : gold.pairs) {
    auto it = results.find(pair.query);
    if (it == results.end()) {
      if (policy == OovPolicy::kCountAsMiss) ++t.evaluated;
      continue;
    }
    ++t.evaluated;
    t.sum += score(it->second.rank_of(pair.counterpart));
  }
  return t;
}

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

GoldPairSet load_gold_pairs(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  GoldPairSet gold;
  gold.provenance = path.string();
  std::map<std::string, size_t> first_seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string::npos || t.find('\t', tab + 1) != std::string::npos) {
      throw FormatError(path.string(), line_no, "expected two tab-separated columns");
    }
    GoldPair pair{trim(t.substr(0, tab)), trim(t.substr(tab + 1))};
    if (pair.query.empty() || pair.counterpart.empty()) {
      throw FormatError(path.string(), line_no, "empty column");
    }
    auto [it, inserted] = first_seen.emplace(pair.query, line_no);
    if (!inserted) {
      throw FormatError(path.string(), line_no,
                        "duplicate query '" + pair.query + "' (first on line " +
                            std::to_string(it->second) + ")");
    }
    gold.pairs.push_back(std::move(pair));
  }
  return gold;
}

void save_gold_pairs(const GoldPairSet &gold, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  if (!gold.provenance.empty()) out << "# " << gold.provenance << '\n';
  for (const auto &p : gold.pairs) out << p.query << '\t' << p.counterpart << '\n';
}

double recall_at_k(const ResultSet &results, const GoldPairSet &gold, size_t k, OovPolicy policy) {
  const auto t = tally(results, gold, policy, [k](int rank) {
    return (rank > 0 && static_cast<size_t>(rank) <= k) ? 1.0 : 0.0;
  });
  return t.evaluated ? t.sum / static_cast<double>(t.evaluated) : 0.0;
}

double mrr(const ResultSet &results, const GoldPairSet &gold, OovPolicy policy) {
  const auto t = tally(results, gold, policy,
                       [](int rank) { return rank > 0 ? 1.0 / static_cast<double>(rank) : 0.0; });
  return t.evaluated ? t.sum / static_cast<double>(t.evaluated) : 0.0;
}

FilterResult filter_pairs_present(const GoldPairSet &gold,
                                  const std::vector<const EmbeddingSpace *> &spaces, PairField field) {
  if (spaces.empty()) throw DataError("filtering needs at least one embedding space");
  FilterResult result;
  result.kept.provenance = gold.provenance;
  for (const auto &pair : gold.pairs) {
    const auto &word = field == PairField::kQuery ? pair.query : pair.counterpart;
    const bool everywhere = std::all_of(spaces.begin(), spaces.end(),
                                        [&](const EmbeddingSpace *s) { return s->contains(word); });
    if (everywhere) result.kept.pairs.push_back(pair);
    else ++result.removed;
  }
  return result;
}

EvalCell evaluate_method(const CounterpartRetriever &retriever, const GoldPairSet &gold,
                         Method method, const EvalOptions &options) {
  if (options.ks.empty()) throw DataError("no cutoffs given for evaluation");
  const size_t max_k = *std::max_element(options.ks.begin(), options.ks.end());

  EvalCell cell;
  cell.method = method;
  cell.base_period = retriever.map().base_period;
  cell.target_period = retriever.map().target_period;

  const auto run = [&](size_t k) {
    ResultSet results;
    QueryOptions q;
    q.method = method;
    q.k = k;
    q.order = options.order;
    for (const auto &pair : gold.pairs) {
      if (!retriever.base().contains(pair.query)) continue;
      results.emplace(pair.query, retriever.query(pair.query, q));
    }
    return results;
  };

  const ResultSet full = run(max_k);
  for (const auto &pair : gold.pairs) {
    if (full.count(pair.query)) ++cell.n_queries;
    else ++cell.n_skipped_oov;
  }
  if (options.oov_policy == OovPolicy::kCountAsMiss) cell.n_queries += cell.n_skipped_oov;
  cell.mrr = mrr(full, gold, options.oov_policy);
  for (size_t k : options.ks) {
    if (method == Method::kOPSC && k != max_k) {
      cell.recall_at[k] = recall_at_k(run(k), gold, k, options.oov_policy);
    } else {
      cell.recall_at[k] = recall_at_k(full, gold, k, options.oov_policy);
    }
  }
  return cell;
}

std::vector<EvalCell> evaluate_pair(const EmbeddingSpace &base, const EmbeddingSpace &target,
                                    const PeriodCorpus &base_corpus, const PeriodCorpus &target_corpus,
                                    const FrequencyStore &frequencies, const GoldPairSet &gold,
                                    const std::vector<Method> &methods, const std::string &embedding,
                                    const AlignmentSettings &alignment, const EvalOptions &options) {
  const bool needs_op = std::any_of(methods.begin(), methods.end(),
                                    [](Method m) { return m != Method::kLT; });
  const bool needs_lt = std::find(methods.begin(), methods.end(), Method::kLT) != methods.end();

  std::optional<CounterpartRetriever> op, lt;
  if (needs_op) {
    auto map = orthogonal_procrustes(intersect(base, target, alignment.preprocess));
    map.base_period = base_corpus.period().label();
    map.target_period = target_corpus.period().label();
    op.emplace(base, target, std::move(map), &frequencies);
  }
  if (needs_lt) {
    auto seeds = select_seed_pairs(base, target, base_corpus.vocabulary(), target_corpus.vocabulary(),
                                   alignment.seed_top_n, alignment.preprocess);
    auto map = ridge_linear_map(seeds, alignment.ridge_alpha);
    map.base_period = base_corpus.period().label();
    map.target_period = target_corpus.period().label();
    lt.emplace(base, target, std::move(map), &frequencies);
  }

  std::vector<EvalCell> cells;
  for (Method m : methods) {
    auto cell = evaluate_method(m == Method::kLT ? *lt : *op, gold, m, options);
    cell.embedding = embedding;
    cells.push_back(std::move(cell));
  }
  return cells;
}

PeriodCorpus downsample_documents(const PeriodCorpus &pc, int64_t max_tokens, uint64_t seed) {
  std::vector<size_t> order(pc.documents().size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> keep(order.size(), false);
  int64_t total = 0;
  for (size_t i : order) {
    const auto n = static_cast<int64_t>(pc.documents()[i].tokens.size());
    if (total + n <= max_tokens) {
      keep[i] = true;
      total += n;
    }
  }
  std::vector<Document> docs;
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) docs.push_back(pc.documents()[i]);
  }
  return PeriodCorpus(pc.period(), std::move(docs));
}

EvalReport temporal_sweep(const PeriodMap &periods, const GoldPairSet &gold,
                          const SweepConfig &config, const Trainer &trainer) {
  if (config.targets.empty()) throw DataError("sweep needs at least one target period");
  const PeriodCorpus &base_corpus = find_period(periods, config.base);
  std::vector<PeriodCorpus> targets;
  for (const auto &key : config.targets) targets.push_back(find_period(periods, key));

  if (config.balance_tokens) {
    int64_t budget = targets.front().token_count();
    for (const auto &t : targets) budget = std::min(budget, t.token_count());
    for (auto &t : targets) {
      t = downsample_documents(t, budget, config.seed + static_cast<uint64_t>(t.period().start_year));
    }
  }

  const FrequencyStore frequencies(periods);
  const EmbeddingSpace base = trainer(base_corpus);
  std::vector<EmbeddingSpace> target_spaces;
  for (const auto &t : targets) target_spaces.push_back(trainer(t));

  // Only pairs whose counterpart exists in every target keep the cells comparable.
  std::vector<const EmbeddingSpace *> ptrs;
  for (const auto &s : target_spaces) ptrs.push_back(&s);
  const GoldPairSet kept = filter_pairs_present(gold, ptrs, PairField::kCounterpart).kept;

  EvalReport report;
  report.oov_policy = config.eval.oov_policy;
  for (size_t i = 0; i < targets.size(); ++i) {
    auto cells = evaluate_pair(base, target_spaces[i], base_corpus, targets[i], frequencies, kept,
                               config.methods, config.embedding, config.alignment, config.eval);
    for (auto &c : cells) report.cells.push_back(std::move(c));
  }
  return report;
}

nlohmann::json to_json(const EvalReport &report) {
  nlohmann::json j;
  j["oov_policy"] = report.oov_policy == OovPolicy::kSkip ? "skip" : "count_as_miss";
  j["rank_convention"] = "truncated list; counterpart not retrieved counts as reciprocal rank 0";
  j["cells"] = nlohmann::json::array();
  for (const auto &c : report.cells) {
    nlohmann::json cell;
    cell["method"] = to_string(c.method);
    cell["embedding"] = c.embedding;
    cell["base"] = c.base_period;
    cell["target"] = c.target_period;
    cell["mrr"] = c.mrr;
    cell["n_queries"] = c.n_queries;
    cell["n_skipped_oov"] = c.n_skipped_oov;
    for (const auto &[k, r] : c.recall_at) cell["recall_at"][std::to_string(k)] = r;
    j["cells"].push_back(std::move(cell));
  }
  return j;
}

void write_report_csv(std::ostream &out, const EvalReport &report) {
  const auto precision = out.precision(6);
  out << "method,embedding,base,target,k,recall,mrr\n";
  for (const auto &c : report.cells) {
    for (const auto &[k, r] : c.recall_at) {
      out << to_string(c.method) << ',' << c.embedding << ',' << c.base_period << ','
          << c.target_period << ',' << k << ',' << r << ',' << c.mrr << '\n';
    }
  }
  out.precision(precision);
}

SyntheticCorpus generate_synthetic_replacement_corpus(const SyntheticSpec &spec) {
  if (spec.n_pairs < 1) throw DataError("synthetic corpus needs at least one pair");
  if (spec.periods.empty()) throw DataError("synthetic corpus needs at least one period");
  if (spec.n_filler_words < 4) throw DataError("synthetic corpus needs at least 4 filler words");
  constexpr size_t kContextsPerPair = 6;
  constexpr size_t kContextsPerDoc = 4;

  const size_t per_pair = std::max<size_t>(1, spec.docs_per_period / 2 / spec.n_pairs);
  const size_t filler_docs = spec.docs_per_period > per_pair * spec.n_pairs
                                 ? spec.docs_per_period - per_pair * spec.n_pairs
                                 : 0;
  const size_t n_periods = spec.periods.size();

  const auto filler = [](size_t i) { return "w" + std::to_string(i); };
  const auto context = [](size_t pair, size_t j) {
    return "ctx" + std::to_string(pair) + static_cast<char>('a' + j);
  };
  const auto old_word = [](size_t i) { return "old" + std::to_string(i); };
  const auto new_word = [](size_t i) { return "new" + std::to_string(i); };

  std::mt19937_64 rng(spec.seed);
  // Fillers follow a fixed random successor graph, so every filler has its
  // own context profile and that profile is the same in every period.
  constexpr size_t kSuccessors = 3;
  std::uniform_int_distribution<size_t> any_filler(0, spec.n_filler_words - 1);
  std::vector<std::array<size_t, kSuccessors>> successors(spec.n_filler_words);
  for (auto &next : successors) {
    for (auto &w : next) w = any_filler(rng);
  }
  std::uniform_int_distribution<size_t> pick_successor(0, kSuccessors - 1);
  const auto walk = [&](size_t length) {
    std::vector<std::string> words;
    size_t cur = any_filler(rng);
    for (size_t i = 0; i < length; ++i) {
      words.push_back(filler(cur));
      cur = successors[cur][pick_successor(rng)];
    }
    return words;
  };

  SyntheticCorpus out;
  for (size_t p = 0; p < n_periods; ++p) {
    // old share falls linearly from all to none
    size_t n_old = per_pair;
    if (n_periods > 1) {
      n_old = static_cast<size_t>(std::llround(static_cast<double>(per_pair) *
                                               static_cast<double>(n_periods - 1 - p) /
                                               static_cast<double>(n_periods - 1)));
    }

    std::vector<std::vector<std::string>> docs;
    for (size_t i = 0; i < spec.n_pairs; ++i) {
      for (size_t s = 0; s < per_pair; ++s) {
        std::vector<size_t> slots(kContextsPerPair);
        std::iota(slots.begin(), slots.end(), 0);
        std::shuffle(slots.begin(), slots.end(), rng);
        std::vector<std::string> doc = walk(2);
        doc.push_back(context(i, slots[0]));
        doc.push_back(context(i, slots[1]));
        doc.push_back(s < n_old ? old_word(i) : new_word(i));
        doc.push_back(context(i, slots[2]));
        doc.push_back(context(i, slots[3]));
        for (auto &w : walk(2)) doc.push_back(std::move(w));
        static_assert(kContextsPerDoc == 4);
        docs.push_back(std::move(doc));
      }
    }
    for (size_t s = 0; s < filler_docs; ++s) {
      docs.push_back(walk(9));
    }
    std::shuffle(docs.begin(), docs.end(), rng);

    for (size_t d = 0; d < docs.size(); ++d) {
      std::string text;
      for (size_t t = 0; t < docs[d].size(); ++t) {
        if (t) text += ' ';
        text += docs[d][t];
      }
      nlohmann::json record;
      record["year"] = spec.periods[p] + static_cast<int>(d % 10);
      record["text"] = text;
      out.jsonl_lines.push_back(record.dump());
    }
  }

  out.gold.provenance = "synthetic replacement corpus: pairs=" + std::to_string(spec.n_pairs) +
                        " seed=" + std::to_string(spec.seed);
  for (size_t i = 0; i < spec.n_pairs; ++i) out.gold.pairs.push_back({old_word(i), new_word(i)});
  return out;
}

void write_synthetic_corpus(const SyntheticCorpus &corpus, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "corpus.jsonl");
  if (!out) throw DataError("cannot write " + (dir / "corpus.jsonl").string());
  for (const auto &line : corpus.jsonl_lines) out << line << '\n';
  save_gold_pairs(corpus.gold, dir / "gold.tsv");
}

}  // namespace diachron
