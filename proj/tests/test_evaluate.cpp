#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "diachron/error.h"
#include "diachron/evaluate.h"
#include "diachron/ppmi_svd.h"
#include "temp_dir.h"

using namespace diachron;

namespace {

// Result list where the counterpart sits at `rank` (0 = absent) among `len` items.
RankedCandidates list_with(const GoldPair &pair, int rank, int len) {
  RankedCandidates c;
  c.query = pair.query;
  for (int i = 1; i <= len; ++i) {
    Candidate cand;
    cand.token = (i == rank) ? pair.counterpart : pair.query + "_other" + std::to_string(i);
    cand.final_rank = i;
    c.items.push_back(cand);
  }
  return c;
}

GoldPairSet gold_of(size_t n) {
  GoldPairSet g;
  for (size_t i = 0; i < n; ++i) g.pairs.push_back({"q" + std::to_string(i), "c" + std::to_string(i)});
  return g;
}

PeriodMap periods_of(const SyntheticCorpus &corpus) {
  std::vector<Document> docs;
  for (const auto &line : corpus.jsonl_lines) {
    const auto j = nlohmann::json::parse(line);
    docs.push_back({j["year"].get<int>(), tokenize(j["text"].get<std::string>())});
  }
  return bucket_by_decade(docs, 1920);
}

}  // namespace

TEST_CASE("mrr and recall hand values") {
  const auto gold = gold_of(3);
  ResultSet r;
  r[gold.pairs[0].query] = list_with(gold.pairs[0], 1, 10);
  r[gold.pairs[1].query] = list_with(gold.pairs[1], 2, 10);
  r[gold.pairs[2].query] = list_with(gold.pairs[2], 4, 10);
  CHECK(mrr(r, gold) == doctest::Approx(7.0 / 12.0).epsilon(1e-15));
  CHECK(recall_at_k(r, gold, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(recall_at_k(r, gold, 4) == 1.0);

  const auto four = gold_of(4);
  ResultSet q;
  q[four.pairs[0].query] = list_with(four.pairs[0], 7, 10);
  for (size_t i = 1; i < 4; ++i) q[four.pairs[i].query] = list_with(four.pairs[i], 0, 10);
  CHECK(recall_at_k(q, four, 10) == 0.25);

  ResultSet all;
  for (const auto &p : four.pairs) all[p.query] = list_with(p, 1, 1);
  CHECK(recall_at_k(all, four, 1) == 1.0);
  CHECK(mrr(all, four) == 1.0);
}

TEST_CASE("metrics match a brute-force reimplementation") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 1 + rng() % 15;
    const auto gold = gold_of(n);
    ResultSet results;
    std::vector<int> ranks(n, -1);  // -1 = out of vocabulary
    for (size_t i = 0; i < n; ++i) {
      if (rng() % 6 == 0) continue;
      const int len = 1 + static_cast<int>(rng() % 20);
      const int rank = static_cast<int>(rng() % (len + 1));
      ranks[i] = rank;
      results[gold.pairs[i].query] = list_with(gold.pairs[i], rank, len);
    }
    const size_t k = 1 + rng() % 20;
    for (auto policy : {OovPolicy::kSkip, OovPolicy::kCountAsMiss}) {
      double hits = 0, rr = 0, denom = 0;
      for (int rank : ranks) {
        if (rank < 0 && policy == OovPolicy::kSkip) continue;
        denom += 1;
        if (rank > 0 && static_cast<size_t>(rank) <= k) hits += 1;
        if (rank > 0) rr += 1.0 / rank;
      }
      const double want_recall = denom > 0 ? hits / denom : 0.0;
      const double want_mrr = denom > 0 ? rr / denom : 0.0;
      CHECK(recall_at_k(results, gold, k, policy) == doctest::Approx(want_recall).epsilon(1e-12));
      CHECK(mrr(results, gold, policy) == doctest::Approx(want_mrr).epsilon(1e-12));
    }
  }
}

TEST_CASE("gold pair files") {
  TempDir dir;
  const auto one = dir.path() / "one.tsv";
  std::ofstream(one) << "# comment\n\nbelge\tvesika\n";
  const auto g = load_gold_pairs(one);
  REQUIRE(g.pairs.size() == 1);
  CHECK(g.pairs[0].query == "belge");
  CHECK(g.pairs[0].counterpart == "vesika");

  const auto dup = dir.path() / "dup.tsv";
  std::ofstream(dup) << "a\tb\nc\td\na\te\n";
  try {
    load_gold_pairs(dup);
    FAIL("expected a duplicate error");
  } catch (const FormatError &e) {
    CHECK(e.line() == 3);
  }
  const auto cols = dir.path() / "cols.tsv";
  std::ofstream(cols) << "a b\n";
  CHECK_THROWS_AS(load_gold_pairs(cols), FormatError);
  CHECK_THROWS_AS(load_gold_pairs(dir.path() / "absent.tsv"), DataError);

  GoldPairSet many = gold_of(221);
  save_gold_pairs(many, dir.path() / "many.tsv");
  const auto back = load_gold_pairs(dir.path() / "many.tsv");
  CHECK(back.pairs.size() == 221);
  CHECK(back.pairs[220].counterpart == "c220");
}

TEST_CASE("filter pairs by vocabulary") {
  Matrix m = Matrix::Identity(3, 3);
  EmbeddingSpace a({"q0", "q1", "c2"}, m);
  EmbeddingSpace b({"q0", "c1", "c2"}, m);
  const auto gold = gold_of(3);
  const auto by_query = filter_pairs_present(gold, {&a, &b});
  CHECK(by_query.kept.pairs.size() == 1);
  CHECK(by_query.removed == 2);
  const auto by_counterpart = filter_pairs_present(gold, {&b}, PairField::kCounterpart);
  CHECK(by_counterpart.kept.pairs.size() == 2);
}

TEST_CASE("synthetic corpus is deterministic and planted") {
  SyntheticSpec spec;
  spec.n_pairs = 5;
  spec.docs_per_period = 400;
  spec.periods = {1930, 1940, 1950, 1960};
  const auto a = generate_synthetic_replacement_corpus(spec);
  const auto b = generate_synthetic_replacement_corpus(spec);
  CHECK(a.jsonl_lines == b.jsonl_lines);
  spec.seed = 8;
  CHECK(generate_synthetic_replacement_corpus(spec).jsonl_lines != a.jsonl_lines);
  REQUIRE(a.gold.pairs.size() == 5);
  CHECK(a.gold.pairs[0].query == "old0");
  CHECK(a.gold.pairs[0].counterpart == "new0");

  const auto periods = periods_of(a);
  REQUIRE(periods.size() == 4);
  std::set<int64_t> sizes;
  for (const auto &[p, pc] : periods) sizes.insert(pc.token_count());
  CHECK(sizes.size() == 1);
  CHECK(periods.begin()->second.count("new0") == 0);
  CHECK(periods.rbegin()->second.count("old0") == 0);
  for (const auto &pair : a.gold.pairs) {
    const auto q = frequency_series(pair.query, periods);
    const auto c = frequency_series(pair.counterpart, periods);
    CHECK(spearman(q.values, c.values) == doctest::Approx(-1.0));
  }

  TempDir dir;
  write_synthetic_corpus(a, dir.path());
  CHECK(std::filesystem::exists(dir.path() / "corpus.jsonl"));
  CHECK(load_gold_pairs(dir.path() / "gold.tsv").pairs.size() == 5);
}

TEST_CASE("document downsampling") {
  std::vector<Document> docs;
  for (int i = 0; i < 100; ++i) docs.push_back({1930, std::vector<std::string>(1 + i % 7, "t")});
  PeriodCorpus pc(TimePeriod{1930, 1939}, docs);
  const auto small = downsample_documents(pc, 150, 3);
  CHECK(small.token_count() <= 150);
  CHECK(small.token_count() > 140);
  CHECK(small.period() == pc.period());
  CHECK(downsample_documents(pc, 150, 3).token_count() == small.token_count());
  CHECK(downsample_documents(pc, 1000000, 3).token_count() == pc.token_count());
}

TEST_CASE("report serialization") {
  EvalReport report;
  EvalCell cell;
  cell.method = Method::kOPSC;
  cell.embedding = "svd";
  cell.base_period = "1930-1939";
  cell.target_period = "1980-1989";
  cell.recall_at = {{1, 0.5}, {10, 0.75}};
  cell.mrr = 0.625;
  cell.n_queries = 4;
  report.cells.push_back(cell);
  std::ostringstream csv;
  write_report_csv(csv, report);
  CHECK(csv.str() ==
        "method,embedding,base,target,k,recall,mrr\n"
        "OP+SC,svd,1930-1939,1980-1989,1,0.5,0.625\n"
        "OP+SC,svd,1930-1939,1980-1989,10,0.75,0.625\n");
  const auto j = to_json(report);
  CHECK(j.dump().find("0.625") != std::string::npos);
}

TEST_CASE("evaluation on a small synthetic run") {
  SyntheticSpec spec;
  spec.n_pairs = 5;
  spec.docs_per_period = 1000;
  spec.periods = {1930, 1980};
  const auto corpus = generate_synthetic_replacement_corpus(spec);
  const auto periods = periods_of(corpus);
  SvdEmbeddingConfig cfg;
  cfg.dim = 30;
  cfg.min_count = 5;
  const auto &base_pc = periods.begin()->second;
  const auto &target_pc = periods.rbegin()->second;
  const auto base = train_svd(base_pc, cfg);
  const auto target = train_svd(target_pc, cfg);
  FrequencyStore store(periods);
  EvalOptions options;
  options.ks = {1, 10};
  const auto cells = evaluate_pair(base, target, base_pc, target_pc, store, corpus.gold,
                                   {Method::kOP, Method::kOPSC, Method::kLT}, "svd", {}, options);
  REQUIRE(cells.size() == 3);
  for (const auto &c : cells) {
    CHECK(c.n_queries == 5);
    CHECK(c.recall_at.at(1) <= c.recall_at.at(10));
    CHECK(c.mrr >= 0.0);
    CHECK(c.mrr <= 1.0);
  }
  CHECK(cells[0].recall_at.at(10) >= 0.8);
}
