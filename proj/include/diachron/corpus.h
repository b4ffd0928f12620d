#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace diachron {

// Closed year interval, e.g. 1930-1939.
struct TimePeriod {
  int start_year = 0;
  int end_year = 0;

  std::string label() const;
  bool contains(int year) const { return year >= start_year && year <= end_year; }

  // Parses "1930-1939" or a bare decade start "1930" (10-year span).
  static TimePeriod parse(std::string_view text);
  static TimePeriod decade_of(int year, int epoch_year);

  auto operator<=>(const TimePeriod &) const = default;
};

struct Document {
  int year = 0;
  std::vector<std::string> tokens;
};

using Vocabulary = std::unordered_map<std::string, int64_t>;

class PeriodCorpus {
 public:
  PeriodCorpus() = default;
  PeriodCorpus(TimePeriod period, std::vector<Document> documents);

  const TimePeriod &period() const { return period_; }
  const std::vector<Document> &documents() const { return documents_; }
  int64_t token_count() const { return token_count_; }
  const Vocabulary &vocabulary() const { return vocabulary_; }
  int64_t count(const std::string &token) const;

 private:
  TimePeriod period_;
  std::vector<Document> documents_;
  int64_t token_count_ = 0;
  Vocabulary vocabulary_;
};

using PeriodMap = std::map<TimePeriod, PeriodCorpus>;

enum class CorpusFormat { kJsonl, kYearDirs };

struct IngestResult {
  std::vector<Document> documents;
  size_t skipped = 0;
};

// Lowercases with Turkish casing rules (I -> dotless i, dotted I -> i),
// splits on whitespace, trims punctuation from both ends, and drops tokens
// without a letter.
std::vector<std::string> tokenize(std::string_view text);

IngestResult ingest(const std::filesystem::path &source, CorpusFormat format);

PeriodMap bucket_by_decade(const std::vector<Document> &docs, int epoch_year = 1920);

// Relative frequencies of one word across an ordered run of periods.
struct FrequencySeries {
  std::string word;
  std::vector<TimePeriod> periods;
  std::vector<int64_t> counts;
  std::vector<double> values;
};

FrequencySeries frequency_series(const std::string &word,
                                 const std::vector<const PeriodCorpus *> &periods);
FrequencySeries frequency_series(const std::string &word, const PeriodMap &periods);

// Columns: word, period_label, count, relative_frequency.
void write_frequency_tsv(std::ostream &out, const std::vector<FrequencySeries> &series);

}  // namespace diachron
