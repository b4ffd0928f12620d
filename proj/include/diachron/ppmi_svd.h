#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "diachron/corpus.h"
#include "diachron/embedding.h"

namespace diachron {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Word-context counts with an unweighted symmetric window. Rows and columns
// share `vocabulary`, ordered by corpus frequency then token.
struct CooccurrenceMatrix {
  std::vector<std::string> vocabulary;
  SparseMatrix counts;
  int window = 0;
  int64_t total_pairs = 0;
};

// Pairs never cross document boundaries. Tokens below min_count are dropped
// from the vocabulary but still occupy their position in the window.
CooccurrenceMatrix count_cooccurrences(const PeriodCorpus &pc, int window, int64_t min_count = 1);

// max(0, ln p(w,c) / (p(w) p_alpha(c))) with context counts raised to alpha.
SparseMatrix ppmi(const CooccurrenceMatrix &cooc, double alpha = 0.75);

struct TruncatedSvd {
  Matrix u;                // rows x k, orthonormal columns
  Vector singular_values;  // k, descending
  Matrix v;                // cols x k
  bool rank_limited = false;  // fewer than the requested dimensions survived
};

// Top-d singular triplets. Matrices whose smaller side is at most
// dense_limit use a full dense SVD; larger ones use randomized subspace
// iteration. Column signs are fixed so the largest |entry| of each left
// singular vector is positive.
TruncatedSvd truncated_svd(const SparseMatrix &m, Eigen::Index d, Eigen::Index dense_limit = 2000);

struct SvdEmbeddingConfig {
  int dim = 300;
  int window = 2;
  int64_t min_count = 10;
  double alpha = 0.75;
  double sigma_exponent = 0.5;
};

// Word matrix U_d * Sigma_d^sigma_exponent. Words whose row is entirely
// zero are removed. Hyperparameters and singular values go to metadata.
EmbeddingSpace svd_embeddings(const CooccurrenceMatrix &cooc, const SparseMatrix &ppmi_matrix,
                              const SvdEmbeddingConfig &cfg);
EmbeddingSpace train_svd(const PeriodCorpus &pc, const SvdEmbeddingConfig &cfg);

}  // namespace diachron
