#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "diachron/corpus.h"
#include "diachron/error.h"
#include "diachron/store.h"
#include "temp_dir.h"

using namespace diachron;

TEST_CASE("tokenize strips punctuation and lowercases") {
  CHECK(tokenize("Belge verildi.") == std::vector<std::string>{"belge", "verildi"});
  CHECK(tokenize("\"Vesika,\" dedi;  (1935)") == std::vector<std::string>{"vesika", "dedi"});
}

TEST_CASE("tokenize applies Turkish casing") {
  CHECK(tokenize("İSTANBUL") == std::vector<std::string>{"istanbul"});
  // dotless capital I lowers to U+0131
  CHECK(tokenize("IRMAK") == std::vector<std::string>{"ırmak"});
  CHECK(tokenize("ÇĞÖŞÜ") == std::vector<std::string>{"çğöşü"});
  CHECK(tokenize("Âli") == std::vector<std::string>{"âli"});
}

TEST_CASE("tokenize drops tokens without letters") {
  CHECK(tokenize("1935 --").empty());
  CHECK(tokenize("").empty());
  CHECK(tokenize("   \t\n").empty());
  CHECK(tokenize("3üncü 1.5") == std::vector<std::string>{"3üncü"});
}

TEST_CASE("tokenize is idempotent under whitespace joining") {
  std::mt19937 rng(11);
  const std::vector<std::string> pieces{"Kanun", "İŞ", "ırmak", ".", ",", "--", "1920", "a1",
                                        "«Söz»", "ÖDEV!", " ", "\t", "(x)", "Iğdır"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) {
      text += pieces[std::uniform_int_distribution<size_t>(0, pieces.size() - 1)(rng)];
      if (rng() % 2) text += ' ';
    }
    const auto once = tokenize(text);
    std::string joined;
    for (const auto &t : once) joined += t + " ";
    CHECK(tokenize(joined) == once);
  }
}

TEST_CASE("ingest reads jsonl and skips malformed records") {
  TempDir dir;
  {
    std::ofstream out(dir.path() / "one.jsonl");
    out << R"({"year":1935,"text":"vesika verildi"})" << "\n";
  }
  auto one = ingest(dir.path() / "one.jsonl", CorpusFormat::kJsonl);
  REQUIRE(one.documents.size() == 1);
  CHECK(one.documents[0].year == 1935);
  CHECK(one.documents[0].tokens == std::vector<std::string>{"vesika", "verildi"});
  CHECK(one.skipped == 0);

  {
    std::ofstream out(dir.path() / "mixed.jsonl");
    out << R"({"year":1935,"text":"a b"})" << "\n"
        << R"({"year":"1936","text":"c"})" << "\n"
        << R"({"year":1981,"text":"d"})" << "\n"
        << R"({"year":1990,"text":"e"})" << "\n";
  }
  auto mixed = ingest(dir.path() / "mixed.jsonl", CorpusFormat::kJsonl);
  CHECK(mixed.documents.size() == 3);
  CHECK(mixed.skipped == 1);
  CHECK(mixed.documents[2].year == 1990);

  {
    std::ofstream out(dir.path() / "broken.jsonl");
    out << R"({"year":1935,"text":"a b")" << "\n" << R"({"year":1935,"text":"ok"})" << "\n";
  }
  CHECK(ingest(dir.path() / "broken.jsonl", CorpusFormat::kJsonl).skipped == 1);
}

TEST_CASE("ingest errors") {
  TempDir dir;
  std::ofstream(dir.path() / "empty.jsonl").close();
  CHECK_THROWS_AS(ingest(dir.path() / "empty.jsonl", CorpusFormat::kJsonl), DataError);
  CHECK_THROWS_AS(ingest(dir.path() / "missing.jsonl", CorpusFormat::kJsonl), DataError);
}

TEST_CASE("ingest year directories") {
  TempDir dir;
  std::filesystem::create_directories(dir.path() / "1935");
  std::filesystem::create_directories(dir.path() / "1982");
  std::ofstream(dir.path() / "1935" / "b.txt") << "İkinci belge";
  std::ofstream(dir.path() / "1935" / "a.txt") << "Birinci";
  std::ofstream(dir.path() / "1982" / "c.txt") << "son";
  std::ofstream(dir.path() / "1982" / "skip.md") << "ignored";
  const auto r = ingest(dir.path(), CorpusFormat::kYearDirs);
  REQUIRE(r.documents.size() == 3);
  CHECK(r.documents[0].tokens == std::vector<std::string>{"birinci"});
  CHECK(r.documents[1].tokens == std::vector<std::string>{"ikinci", "belge"});
  CHECK(r.documents[2].year == 1982);
}

TEST_CASE("decade bucketing") {
  std::vector<Document> docs{{1935, {"a"}}, {1936, {"b", "c"}}, {1981, {"d"}}};
  auto periods = bucket_by_decade(docs, 1920);
  REQUIRE(periods.size() == 2);
  const auto &thirties = periods.at(TimePeriod{1930, 1939});
  CHECK(thirties.documents().size() == 2);
  CHECK(thirties.token_count() == 3);
  CHECK(periods.at(TimePeriod{1980, 1989}).documents().size() == 1);

  auto boundary = bucket_by_decade({{1940, {"x"}}}, 1920);
  CHECK(boundary.count(TimePeriod{1940, 1949}) == 1);
  CHECK(boundary.count(TimePeriod{1930, 1939}) == 0);

  CHECK(bucket_by_decade({}, 1920).empty());

  // an epoch off the round decade shifts the grid
  auto shifted = bucket_by_decade({{1921, {"x"}}, {1930, {"y"}}, {1931, {"z"}}}, 1921);
  CHECK(shifted.count(TimePeriod{1921, 1930}) == 1);
  CHECK(shifted.at(TimePeriod{1921, 1930}).documents().size() == 2);
  CHECK(TimePeriod{1930, 1939}.label() == "1930-1939");
}

TEST_CASE("bucketing partitions documents and conserves counts") {
  std::mt19937 rng(5);
  std::vector<Document> docs;
  for (int i = 0; i < 400; ++i) {
    Document d;
    d.year = std::uniform_int_distribution<int>(1920, 2022)(rng);
    const int n = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int t = 0; t < n; ++t) d.tokens.push_back(std::string(1, static_cast<char>('a' + rng() % 5)));
    docs.push_back(std::move(d));
  }
  const auto periods = bucket_by_decade(docs, 1920);
  size_t total = 0;
  for (const auto &[period, pc] : periods) {
    CHECK(period.end_year - period.start_year == 9);
    CHECK((period.start_year - 1920) % 10 == 0);
    total += pc.documents().size();
    int64_t vocab_sum = 0;
    for (const auto &[w, c] : pc.vocabulary()) vocab_sum += c;
    CHECK(vocab_sum == pc.token_count());
    for (const auto &d : pc.documents()) CHECK(period.contains(d.year));
  }
  CHECK(total == docs.size());
}

TEST_CASE("frequency series") {
  PeriodCorpus a(TimePeriod{1930, 1939}, {{1930, {"x", "x", "y"}}});
  PeriodCorpus b(TimePeriod{1940, 1949}, {{1941, {"y"}}});
  auto absent = frequency_series("zz", std::vector<const PeriodCorpus *>{&a, &b});
  CHECK(absent.values == std::vector<double>{0.0, 0.0});

  PeriodCorpus only(TimePeriod{1930, 1939}, {{1930, {"q", "q"}}});
  CHECK(frequency_series("q", std::vector<const PeriodCorpus *>{&only}).values == std::vector<double>{1.0});

  auto x = frequency_series("x", std::vector<const PeriodCorpus *>{&a, &b});
  CHECK(x.values[0] == doctest::Approx(2.0 / 3.0));
  CHECK(x.counts == std::vector<int64_t>{2, 0});

  std::ostringstream tsv;
  write_frequency_tsv(tsv, std::vector<FrequencySeries>{x});
  CHECK(tsv.str() ==
        "word\tperiod_label\tcount\trelative_frequency\n"
        "x\t1930-1939\t2\t0.666667\n"
        "x\t1940-1949\t0\t0\n");
}

TEST_CASE("period store round trip is exact") {
  TempDir dir;
  std::vector<Document> docs{{1935, {"vesika", "verildi"}}, {1936, {"ırmak"}}, {1981, {"belge"}}, {1982, {}}};
  const auto periods = bucket_by_decade(docs, 1920);
  save_store(dir.path() / "store", periods);
  const auto loaded = load_store(dir.path() / "store");
  REQUIRE(loaded.size() == periods.size());
  for (const auto &[period, pc] : periods) {
    const auto &other = loaded.at(period);
    REQUIRE(other.documents().size() == pc.documents().size());
    for (size_t i = 0; i < pc.documents().size(); ++i) {
      CHECK(other.documents()[i].year == pc.documents()[i].year);
      CHECK(other.documents()[i].tokens == pc.documents()[i].tokens);
    }
  }
  CHECK(find_period(loaded, "1930").period() == TimePeriod{1930, 1939});
  CHECK(find_period(loaded, "1980-1989").token_count() == 1);
  CHECK_THROWS_AS(find_period(loaded, "1950"), DataError);
}
