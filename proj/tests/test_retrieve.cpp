#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "diachron/align.h"
#include "diachron/error.h"
#include "diachron/retrieve.h"
#include "oracles.h"

using namespace diachron;

namespace {

double cos(const Eigen::RowVectorXd &a, const Vector &b) {
  return a.dot(b.transpose()) / (a.norm() * b.norm());
}

FrequencySeries series(std::vector<double> v) {
  FrequencySeries s;
  s.values = std::move(v);
  return s;
}

RankedCandidates pool_of(std::vector<std::pair<std::string, double>> items) {
  RankedCandidates c;
  for (auto &[t, cs] : items) c.items.push_back({t, cs, std::nullopt, 0});
  return c;
}

std::vector<std::string> tokens(const RankedCandidates &c) {
  std::vector<std::string> out;
  for (const auto &i : c.items) out.push_back(i.token);
  return out;
}

}  // namespace

TEST_CASE("knn equals a brute-force cosine sort") {
  std::mt19937 rng(1);
  std::vector<std::string> vocab;
  for (int i = 0; i < 60; ++i) vocab.push_back("t" + std::to_string(i));
  EmbeddingSpace space(vocab, oracle::gaussian(rng, 60, 5));
  for (int trial = 0; trial < 50; ++trial) {
    const Vector q = oracle::gaussian(rng, 5, 1);
    const std::string skip = vocab[rng() % 60];
    const auto got = knn(space, q, 10, {skip});
    std::vector<std::pair<double, std::string>> all;
    for (size_t i = 0; i < vocab.size(); ++i) {
      if (vocab[i] != skip) all.emplace_back(-cos(space.vectors().row(static_cast<Eigen::Index>(i)), q), vocab[i]);
    }
    std::sort(all.begin(), all.end());
    REQUIRE(got.items.size() == 10);
    for (size_t i = 0; i < 10; ++i) {
      CHECK(got.items[i].token == all[i].second);
      CHECK(got.items[i].cosine == doctest::Approx(-all[i].first).epsilon(1e-12));
      CHECK(got.items[i].final_rank == static_cast<int>(i + 1));
    }
    CHECK(knn(space, q, 10, {skip}).items[0].token == got.items[0].token);
  }
}

TEST_CASE("knn hand cases") {
  Matrix m(5, 2);
  m << 1, 0, 0, 1, 1, 1, -1, 0, 1, 0.5;
  EmbeddingSpace space({"e", "n", "ne", "w", "ene"}, m);
  Vector q(2);
  q << 1, 0;
  const auto all = knn(space, q, 5);
  CHECK(tokens(all) == std::vector<std::string>{"e", "ene", "ne", "n", "w"});
  CHECK(all.items[3].cosine == doctest::Approx(0.0));
  CHECK(all.items[4].cosine == doctest::Approx(-1.0));

  // exact ties go to the smaller token
  Matrix twins(2, 2);
  twins << 1, 0, 1, 0;
  EmbeddingSpace tied({"b", "a"}, twins);
  CHECK(tokens(knn(tied, q, 2)) == std::vector<std::string>{"a", "b"});

  const auto big = knn(space, q, 50, {"e"});
  CHECK(big.items.size() == 4);
  CHECK_FALSE(big.warnings.empty());
  CHECK(knn(space, Vector::Zero(2), 2).items[0].cosine == 0.0);
}

TEST_CASE("spearman hand values") {
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{1, 3, 2, 4};
  const std::vector<double> rev{4, 3, 2, 1};
  CHECK(spearman(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman(a, rev) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(spearman(a, b) == doctest::Approx(0.8).epsilon(1e-15));
  const std::vector<double> flat{2, 2, 2, 2};
  CHECK_THROWS_AS(spearman(a, flat), NumericError);
  CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{1}), NumericError);
  CHECK_THROWS_AS(spearman(a, std::vector<double>{1, 2}), NumericError);
}

TEST_CASE("spearman matches the brute-force rank formula") {
  std::mt19937 rng(2);
  int tie_free = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 2 + rng() % 12;
    const int range = (trial % 2 == 0) ? 1000000 : 4;
    std::vector<double> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng() % range);
      b[i] = static_cast<double>(rng() % range);
    }
    if (std::all_of(a.begin(), a.end(), [&](double x) { return x == a[0]; }) ||
        std::all_of(b.begin(), b.end(), [&](double x) { return x == b[0]; })) {
      CHECK_THROWS_AS(spearman(a, b), NumericError);
      continue;
    }
    const double got = spearman(a, b);
    if (!oracle::has_ties(a) && !oracle::has_ties(b)) {
      ++tie_free;
      CHECK(std::abs(got - oracle::spearman_no_ties(a, b)) < 1e-12);
    } else {
      CHECK(std::abs(got - oracle::pearson(oracle::average_ranks(a), oracle::average_ranks(b))) < 1e-12);
    }
    // strictly monotone transforms leave rho unchanged
    std::vector<double> ta(a);
    for (auto &x : ta) x = std::exp(x / 1e5) * 3.0 + 7.0;
    CHECK(std::abs(spearman(ta, b) - got) < 1e-12);
  }
  CHECK(tie_free > 100);
}

TEST_CASE("rerank by spearman") {
  const auto query = series({4, 3, 2, 1});
  std::map<std::string, std::vector<double>> table{
      {"same", {1, 2, 3, 4}}, {"up", {1, 2, 3, 4}}, {"down", {4, 3, 2, 1}}, {"mixed", {1, 3, 2, 4}}};
  const SeriesLookup lookup = [&](const std::string &t) -> std::optional<FrequencySeries> {
    auto it = table.find(t);
    if (it == table.end()) return std::nullopt;
    return series(it->second);
  };

  // equal rho: cosine order is kept
  auto flat = rerank_spearman(pool_of({{"up", 0.9}, {"same", 0.8}}), query, lookup,
                              RerankOrder::kAnticorrelatedFirst);
  CHECK(tokens(flat) == std::vector<std::string>{"up", "same"});
  CHECK(*flat.items[0].rho == doctest::Approx(-1.0));

  auto cands = pool_of({{"down", 0.9}, {"mixed", 0.8}, {"ghost", 0.75}, {"up", 0.7}});
  auto anti = rerank_spearman(cands, query, lookup, RerankOrder::kAnticorrelatedFirst);
  CHECK(tokens(anti) == std::vector<std::string>{"up", "mixed", "down", "ghost"});
  CHECK_FALSE(anti.items[3].rho.has_value());
  CHECK(anti.items[0].final_rank == 1);
  auto corr = rerank_spearman(cands, query, lookup, RerankOrder::kCorrelatedFirst);
  CHECK(tokens(corr) == std::vector<std::string>{"down", "mixed", "up", "ghost"});

  // a flat query series makes every rho undefined: no-op
  auto noop = rerank_spearman(cands, series({1, 1, 1, 1}), lookup, RerankOrder::kAnticorrelatedFirst);
  CHECK(tokens(noop) == tokens(cands));
}

TEST_CASE("rerank pool mapping") {
  CHECK(default_rerank_pool(1) == 5);
  CHECK(default_rerank_pool(10) == 15);
  CHECK(default_rerank_pool(100) == 150);
  for (size_t k = 1; k < 300; ++k) CHECK(default_rerank_pool(k) > k);
  CHECK(parse_method("opsc") == Method::kOPSC);
  CHECK(parse_method("op") == Method::kOP);
  CHECK(parse_method("lt") == Method::kLT);
  CHECK_THROWS_AS(parse_method("knn"), DataError);
  CHECK(parse_order("anti") == RerankOrder::kAnticorrelatedFirst);
  CHECK(parse_order("desc") == RerankOrder::kCorrelatedFirst);
}

TEST_CASE("counterpart retrieval on planted spaces") {
  std::mt19937 rng(3);
  std::vector<std::string> base_vocab, target_vocab;
  for (int i = 0; i < 40; ++i) {
    base_vocab.push_back("s" + std::to_string(i));
    target_vocab.push_back("s" + std::to_string(i));
  }
  base_vocab.push_back("oldword");
  target_vocab.push_back("newword");
  const Matrix base = oracle::gaussian(rng, 41, 8);
  const Matrix r = oracle::random_orthogonal(rng, 8);
  const Matrix target = base * r;
  EmbeddingSpace bs(base_vocab, base), ts(target_vocab, target);

  const auto map = orthogonal_procrustes(intersect(bs, ts, Preprocess::kL2Normalize));
  QueryOptions op;
  op.k = 5;
  const auto got = query_counterparts("oldword", bs, ts, map, op);
  CHECK(got.items[0].token == "newword");
  CHECK(got.items[0].cosine == doctest::Approx(1.0));

  // the query token itself is never returned
  const auto self = query_counterparts("s3", bs, ts, map, op);
  CHECK(self.rank_of("s3") == 0);
  op.exclude_query = false;
  CHECK(query_counterparts("s3", bs, ts, map, op).rank_of("s3") == 1);

  try {
    query_counterparts("oldwrd", bs, ts, map, op);
    FAIL("expected an OOV error");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("oldword") != std::string::npos);
  }

  QueryOptions lt;
  lt.method = Method::kLT;
  CHECK_THROWS_AS(query_counterparts("oldword", bs, ts, map, lt), DataError);
  QueryOptions opsc;
  opsc.method = Method::kOPSC;
  CHECK_THROWS_AS(query_counterparts("oldword", bs, ts, map, opsc), DataError);

  // frequencies: oldword falls while newword rises
  PeriodMap periods;
  for (int p = 0; p < 4; ++p) {
    Document d{1930 + 10 * p, {}};
    for (int i = 0; i < 3 - p; ++i) d.tokens.push_back("oldword");
    for (int i = 0; i < p; ++i) d.tokens.push_back("newword");
    for (int i = 0; i < 40; ++i) {
      for (int c = 0; c <= (i + p) % 3; ++c) d.tokens.push_back("s" + std::to_string(i));
    }
    const TimePeriod tp{1930 + 10 * p, 1939 + 10 * p};
    periods.emplace(tp, PeriodCorpus(tp, {d}));
  }
  FrequencyStore store(periods);
  opsc.k = 10;
  const auto reranked = query_counterparts("oldword", bs, ts, map, opsc, &store);
  CHECK(reranked.pool == 15);
  CHECK(reranked.items.size() == 10);
  CHECK(reranked.items[0].token == "newword");
  CHECK(*reranked.items[0].rho == doctest::Approx(-1.0));

  std::ostringstream tsv;
  write_candidates_tsv(tsv, reranked);
  CHECK(tsv.str().find("pool=15") != std::string::npos);
  CHECK(to_json(reranked)["pool"].get<size_t>() == 15);
}

TEST_CASE("nearest spellings") {
  const auto s = nearest_spellings("belge", {"belgeler", "vesika", "belga", "zzz"}, 2);
  CHECK(s == std::vector<std::string>{"belga", "belgeler"});
}
