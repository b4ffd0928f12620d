#include "diachron/store.h"

#include <fstream>
#include <sstream>

#include "diachron/error.h"

namespace diachron {

namespace fs = std::filesystem;

void save_store(const fs::path &dir, const PeriodMap &periods) {
  fs::create_directories(dir);
  std::ofstream index(dir / "periods.tsv");
  if (!index) throw DataError("cannot write " + (dir / "periods.tsv").string());
  index << "# label\tstart_year\tend_year\tdocuments\ttokens\n";
  for (const auto &[period, pc] : periods) {
    index << period.label() << '\t' << period.start_year << '\t' << period.end_year << '\t'
          << pc.documents().size() << '\t' << pc.token_count() << '\n';
    std::ofstream out(dir / (period.label() + ".tok"));
    if (!out) throw DataError("cannot write period file for " + period.label());
    for (const auto &doc : pc.documents()) {
      out << doc.year << '\t';
      for (size_t i = 0; i < doc.tokens.size(); ++i) {
        if (i) out << ' ';
        out << doc.tokens[i];
      }
      out << '\n';
    }
  }
}

PeriodMap load_store(const fs::path &dir) {
  const auto index_path = dir / "periods.tsv";
  std::ifstream index(index_path);
  if (!index) throw DataError("not a period store (missing periods.tsv): " + dir.string());
  PeriodMap periods;
  std::string line;
  size_t line_no = 0;
  while (std::getline(index, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string label;
    TimePeriod period;
    size_t n_docs = 0;
    int64_t n_tokens = 0;
    if (!(fields >> label >> period.start_year >> period.end_year >> n_docs >> n_tokens)) {
      throw FormatError(index_path.string(), line_no, "expected 5 fields");
    }
    const auto tok_path = dir / (label + ".tok");
    std::ifstream in(tok_path);
    if (!in) throw DataError("missing period file " + tok_path.string());
    std::vector<Document> docs;
    std::string doc_line;
    size_t doc_line_no = 0;
    while (std::getline(in, doc_line)) {
      ++doc_line_no;
      const auto tab = doc_line.find('\t');
      if (tab == std::string::npos) {
        throw FormatError(tok_path.string(), doc_line_no, "expected year TAB tokens");
      }
      Document doc;
      try {
        doc.year = std::stoi(doc_line.substr(0, tab));
      } catch (const std::exception &) {
        throw FormatError(tok_path.string(), doc_line_no, "bad year");
      }
      std::istringstream toks(doc_line.substr(tab + 1));
      std::string tok;
      while (toks >> tok) doc.tokens.push_back(std::move(tok));
      docs.push_back(std::move(doc));
    }
    PeriodCorpus pc(period, std::move(docs));
    if (pc.documents().size() != n_docs || pc.token_count() != n_tokens) {
      throw FormatError(index_path.string(), line_no,
                        "counts in index disagree with " + tok_path.filename().string());
    }
    periods.emplace(period, std::move(pc));
  }
  if (periods.empty()) throw DataError("period store is empty: " + dir.string());
  return periods;
}

const PeriodCorpus &find_period(const PeriodMap &periods, std::string_view key) {
  for (const auto &[period, pc] : periods) {
    if (period.label() == key || std::to_string(period.start_year) == key) return pc;
  }
  std::string known;
  for (const auto &[period, pc] : periods) known += " " + period.label();
  throw DataError("period '" + std::string(key) + "' not in store; available:" + known);
}

}  // namespace diachron
