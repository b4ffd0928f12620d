#include "diachron/embedding.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "diachron/error.h"

namespace diachron {

EmbeddingSpace::EmbeddingSpace(std::vector<std::string> vocabulary, Matrix vectors,
                               std::map<std::string, std::string> metadata)
    : vocabulary_(std::move(vocabulary)),
      vectors_(std::move(vectors)),
      metadata_(std::move(metadata)) {
  if (static_cast<Eigen::Index>(vocabulary_.size()) != vectors_.rows()) {
    throw DataError("embedding space has " + std::to_string(vocabulary_.size()) +
                    " tokens but " + std::to_string(vectors_.rows()) + " rows");
  }
  index_.reserve(vocabulary_.size());
  for (size_t i = 0; i < vocabulary_.size(); ++i) {
    if (!index_.emplace(vocabulary_[i], i).second) {
      throw DataError("duplicate token in embedding vocabulary: '" + vocabulary_[i] + "'");
    }
  }
}

std::optional<size_t> EmbeddingSpace::index_of(const std::string &token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::RowVectorXd EmbeddingSpace::vector(const std::string &token) const {
  auto i = index_of(token);
  if (!i) throw DataError("'" + token + "' is not in the embedding vocabulary");
  return vectors_.row(static_cast<Eigen::Index>(*i));
}

void save_embeddings(const EmbeddingSpace &space, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << space.size() << ' ' << space.dim() << '\n';
  char buf[32];
  for (size_t i = 0; i < space.size(); ++i) {
    out << space.vocabulary()[i];
    for (Eigen::Index j = 0; j < space.dim(); ++j) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), space.vectors()(i, j));
      out << ' ' << std::string_view(buf, end - buf);
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

EmbeddingSpace load_embeddings(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  const std::string name = path.string();

  std::string line;
  if (!std::getline(in, line)) throw FormatError(name, 1, "missing header");
  std::istringstream header(line);
  long long n_words = -1, dim = -1;
  std::string extra;
  if (!(header >> n_words >> dim) || (header >> extra) || n_words < 0 || dim <= 0) {
    throw FormatError(name, 1, "header must be '<vocabulary size> <dimension>'");
  }

  std::vector<std::string> vocab;
  vocab.reserve(static_cast<size_t>(n_words));
  Matrix vectors(n_words, dim);
  size_t line_no = 1;
  while (static_cast<long long>(vocab.size()) < n_words && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto space = line.find(' ');
    if (space == 0 || space == std::string::npos) {
      throw FormatError(name, line_no, "expected '<token> <" + std::to_string(dim) + " floats>'");
    }
    const auto row = static_cast<Eigen::Index>(vocab.size());
    vocab.push_back(line.substr(0, space));
    const char *p = line.data() + space;
    const char *end = line.data() + line.size();
    long long col = 0;
    while (true) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double value = 0.0;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc()) throw FormatError(name, line_no, "unparsable number");
      if (col >= dim) break;
      vectors(row, col++) = value;
      p = next;
    }
    if (col != dim || p != end) {
      size_t found = static_cast<size_t>(col);
      if (p != end) {
        std::istringstream rest(std::string(p, end));
        std::string tok;
        while (rest >> tok) ++found;
      }
      throw FormatError(name, line_no, "row for '" + vocab.back() + "' has " +
                                           std::to_string(found) + " values, header says " +
                                           std::to_string(dim));
    }
  }
  if (static_cast<long long>(vocab.size()) < n_words) {
    throw FormatError(name, line_no + 1,
                      "header declares " + std::to_string(n_words) + " rows but file ends after " +
                          std::to_string(vocab.size()) + "; row " +
                          std::to_string(vocab.size() + 1) + " is missing");
  }
  try {
    return EmbeddingSpace(std::move(vocab), std::move(vectors));
  } catch (const DataError &e) {
    throw DataError(name + ": " + e.what());
  }
}

}  // namespace diachron
