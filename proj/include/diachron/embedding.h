#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace diachron {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A vocabulary with one row vector per token. Row order follows vocabulary
// order and tokens are unique.
class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;
  EmbeddingSpace(std::vector<std::string> vocabulary, Matrix vectors,
                 std::map<std::string, std::string> metadata = {});

  size_t size() const { return vocabulary_.size(); }
  Eigen::Index dim() const { return vectors_.cols(); }
  const std::vector<std::string> &vocabulary() const { return vocabulary_; }
  const Matrix &vectors() const { return vectors_; }
  Matrix &mutable_vectors() { return vectors_; }

  std::optional<size_t> index_of(const std::string &token) const;
  bool contains(const std::string &token) const { return index_.count(token) > 0; }
  // Throws DataError for out-of-vocabulary tokens.
  Eigen::RowVectorXd vector(const std::string &token) const;

  std::map<std::string, std::string> &metadata() { return metadata_; }
  const std::map<std::string, std::string> &metadata() const { return metadata_; }

 private:
  std::vector<std::string> vocabulary_;
  Matrix vectors_;
  std::unordered_map<std::string, size_t> index_;
  std::map<std::string, std::string> metadata_;
};

// Plain-text word-vector format: "<|V|> <d>" header, then "<token> v1 ... vd".
void save_embeddings(const EmbeddingSpace &space, const std::filesystem::path &path);
EmbeddingSpace load_embeddings(const std::filesystem::path &path);

}  // namespace diachron
