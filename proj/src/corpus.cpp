#include "diachron/corpus.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "diachron/error.h"

namespace diachron {

namespace {

// Decodes one UTF-8 code point starting at text[pos]; advances pos.
// Invalid bytes decode as U+FFFD and consume one byte.
char32_t decode_utf8(std::string_view text, size_t &pos) {
  const auto byte = [&](size_t i) { return static_cast<unsigned char>(text[i]); };
  const unsigned char lead = byte(pos);
  if (lead < 0x80) {
    ++pos;
    return lead;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  for (int i = 1; i <= extra; ++i) {
    if (pos + i >= text.size() || (byte(pos + i) & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (byte(pos + i) & 0x3F);
  }
  pos += extra + 1;
  return cp;
}

void encode_utf8(char32_t cp, std::string &out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Turkish lowercase. Covers ASCII, Latin-1 and Latin Extended-A, which is
// the full alphabet of modern and Ottoman-transliterated Turkish.
char32_t turkish_lower(char32_t cp) {
  if (cp == U'I') return 0x0131;   // dotless i
  if (cp == 0x0130) return U'i';   // dotted capital I
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if ((cp >= 0x0100 && cp <= 0x012F) || (cp >= 0x0132 && cp <= 0x0137) ||
      (cp >= 0x014A && cp <= 0x0177)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if ((cp >= 0x0139 && cp <= 0x0148) || (cp >= 0x0179 && cp <= 0x017E)) {
    return (cp % 2 == 1) ? cp + 1 : cp;
  }
  if (cp == 0x0178) return 0xFF;
  return cp;
}

bool is_letter(char32_t cp) {
  if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
  if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) return true;
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  // Greek, Cyrillic, Armenian, Hebrew, Arabic and beyond: treat as letters
  // unless they fall in the general punctuation / symbol blocks.
  if (cp >= 0x370 && cp < 0x2000) return true;
  if (cp >= 0x3040 && cp != 0xFFFD && !(cp >= 0xFE30 && cp <= 0xFE4F) &&
      !(cp >= 0xFF00 && cp <= 0xFF0F)) {
    return true;
  }
  return false;
}

bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
         cp == U'\v' || cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x202F ||
         cp == 0x205F || cp == 0x3000 || cp == 0xFEFF;
}

std::string finish_token(const std::u32string &cps) {
  size_t begin = 0;
  size_t end = cps.size();
  const auto keep = [](char32_t cp) { return is_letter(cp) || is_digit(cp); };
  while (begin < end && !keep(cps[begin])) ++begin;
  while (end > begin && !keep(cps[end - 1])) --end;
  bool has_letter = false;
  std::string out;
  for (size_t i = begin; i < end; ++i) {
    has_letter = has_letter || is_letter(cps[i]);
    encode_utf8(turkish_lower(cps[i]), out);
  }
  if (!has_letter) out.clear();
  return out;
}

int parse_int(std::string_view text) {
  int value = 0;
  const auto *first = text.data();
  const auto *last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DataError("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::string TimePeriod::label() const {
  return std::to_string(start_year) + "-" + std::to_string(end_year);
}

TimePeriod TimePeriod::parse(std::string_view text) {
  const auto dash = text.find('-', 1);
  TimePeriod p;
  if (dash == std::string_view::npos) {
    p.start_year = parse_int(text);
    p.end_year = p.start_year + 9;
  } else {
    p.start_year = parse_int(text.substr(0, dash));
    p.end_year = parse_int(text.substr(dash + 1));
  }
  if (p.start_year > p.end_year) {
    throw DataError("period ends before it starts: '" + std::string(text) + "'");
  }
  return p;
}

TimePeriod TimePeriod::decade_of(int year, int epoch_year) {
  const int offset = year - epoch_year;
  // floor division so years before the epoch still land in a proper decade
  const int decade = (offset >= 0) ? offset / 10 : -((-offset + 9) / 10);
  const int start = epoch_year + decade * 10;
  return {start, start + 9};
}

PeriodCorpus::PeriodCorpus(TimePeriod period, std::vector<Document> documents)
    : period_(period), documents_(std::move(documents)) {
  for (const auto &doc : documents_) {
    token_count_ += static_cast<int64_t>(doc.tokens.size());
    for (const auto &tok : doc.tokens) ++vocabulary_[tok];
  }
}

int64_t PeriodCorpus::count(const std::string &token) const {
  auto it = vocabulary_.find(token);
  return it == vocabulary_.end() ? 0 : it->second;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::u32string current;
  size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = decode_utf8(text, pos);
    if (is_space(cp)) {
      if (!current.empty()) {
        auto tok = finish_token(current);
        if (!tok.empty()) tokens.push_back(std::move(tok));
        current.clear();
      }
    } else {
      current.push_back(cp);
    }
  }
  if (!current.empty()) {
    auto tok = finish_token(current);
    if (!tok.empty()) tokens.push_back(std::move(tok));
  }
  return tokens;
}

IngestResult ingest(const std::filesystem::path &source, CorpusFormat format) {
  namespace fs = std::filesystem;
  IngestResult result;
  if (!fs::exists(source)) throw DataError("corpus source does not exist: " + source.string());

  if (format == CorpusFormat::kJsonl) {
    std::ifstream in(source);
    if (!in) throw DataError("cannot read " + source.string());
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto record = nlohmann::json::parse(line);
        if (!record.is_object() || !record.contains("year") || !record.contains("text") ||
            !record["year"].is_number_integer() || !record["text"].is_string()) {
          ++result.skipped;
          continue;
        }
        result.documents.push_back(
            {record["year"].get<int>(), tokenize(record["text"].get<std::string>())});
      } catch (const nlohmann::json::exception &) {
        ++result.skipped;
      }
    }
  } else {
    if (!fs::is_directory(source)) throw DataError("not a directory: " + source.string());
    std::vector<std::pair<int, fs::path>> files;
    for (const auto &year_dir : fs::directory_iterator(source)) {
      if (!year_dir.is_directory()) continue;
      int year = 0;
      try {
        year = parse_int(year_dir.path().filename().string());
      } catch (const DataError &) {
        ++result.skipped;
        continue;
      }
      for (const auto &file : fs::directory_iterator(year_dir.path())) {
        if (file.is_regular_file() && file.path().extension() == ".txt") {
          files.emplace_back(year, file.path());
        }
      }
    }
    // directory iteration order is unspecified
    std::sort(files.begin(), files.end());
    for (const auto &[year, path] : files) {
      result.documents.push_back({year, tokenize(read_file(path))});
    }
  }

  if (result.documents.empty()) {
    throw DataError("no valid documents in " + source.string() + " (" +
                    std::to_string(result.skipped) + " malformed records skipped)");
  }
  return result;
}

PeriodMap bucket_by_decade(const std::vector<Document> &docs, int epoch_year) {
  std::map<TimePeriod, std::vector<Document>> grouped;
  for (const auto &doc : docs) grouped[TimePeriod::decade_of(doc.year, epoch_year)].push_back(doc);
  PeriodMap periods;
  for (auto &[period, group] : grouped) {
    periods.emplace(period, PeriodCorpus(period, std::move(group)));
  }
  return periods;
}

FrequencySeries frequency_series(const std::string &word,
                                 const std::vector<const PeriodCorpus *> &periods) {
  FrequencySeries series;
  series.word = word;
  for (const auto *pc : periods) {
    const int64_t c = pc->count(word);
    series.periods.push_back(pc->period());
    series.counts.push_back(c);
    series.values.push_back(pc->token_count() > 0
                                ? static_cast<double>(c) / static_cast<double>(pc->token_count())
                                : 0.0);
  }
  return series;
}

FrequencySeries frequency_series(const std::string &word, const PeriodMap &periods) {
  std::vector<const PeriodCorpus *> ordered;
  ordered.reserve(periods.size());
  for (const auto &[period, pc] : periods) ordered.push_back(&pc);
  return frequency_series(word, ordered);
}

void write_frequency_tsv(std::ostream &out, const std::vector<FrequencySeries> &series) {
  out << "word\tperiod_label\tcount\trelative_frequency\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(6);
  for (const auto &s : series) {
    for (size_t i = 0; i < s.periods.size(); ++i) {
      out << s.word << '\t' << s.periods[i].label() << '\t' << s.counts[i] << '\t'
          << s.values[i] << '\n';
    }
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace diachron
