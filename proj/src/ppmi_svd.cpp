#include "diachron/ppmi_svd.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

#include <Eigen/SVD>

#include "diachron/error.h"

namespace diachron {

namespace {

std::string format_double(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

// Thin SVD of a dense matrix, first k triplets.
void dense_svd(const Matrix &a, Eigen::Index k, TruncatedSvd &out) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  k = std::min<Eigen::Index>(k, svd.singularValues().size());
  out.u = svd.matrixU().leftCols(k);
  out.singular_values = svd.singularValues().head(k);
  out.v = svd.matrixV().leftCols(k);
}

Matrix orthonormal_basis(const Matrix &a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace

CooccurrenceMatrix count_cooccurrences(const PeriodCorpus &pc, int window, int64_t min_count) {
  if (window < 1) throw DataError("co-occurrence window must be at least 1");

  std::vector<std::pair<std::string, int64_t>> kept;
  for (const auto &[tok, c] : pc.vocabulary()) {
    if (c >= min_count) kept.emplace_back(tok, c);
  }
  if (kept.empty()) {
    throw DataError("no token of " + pc.period().label() + " reaches min_count " +
                    std::to_string(min_count));
  }
  std::sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  CooccurrenceMatrix cooc;
  cooc.window = window;
  std::unordered_map<std::string, int> index;
  index.reserve(kept.size());
  for (const auto &[tok, c] : kept) {
    index.emplace(tok, static_cast<int>(cooc.vocabulary.size()));
    cooc.vocabulary.push_back(tok);
  }

  std::unordered_map<uint64_t, int64_t> pair_counts;
  std::vector<int> ids;
  for (const auto &doc : pc.documents()) {
    ids.clear();
    for (const auto &tok : doc.tokens) {
      auto it = index.find(tok);
      ids.push_back(it == index.end() ? -1 : it->second);
    }
    const auto n = static_cast<int>(ids.size());
    for (int i = 0; i < n; ++i) {
      if (ids[i] < 0) continue;
      const int lo = std::max(0, i - window);
      const int hi = std::min(n - 1, i + window);
      for (int j = lo; j <= hi; ++j) {
        if (j == i || ids[j] < 0) continue;
        const uint64_t key = (static_cast<uint64_t>(ids[i]) << 32) | static_cast<uint32_t>(ids[j]);
        ++pair_counts[key];
      }
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(pair_counts.size());
  for (const auto &[key, c] : pair_counts) {
    triplets.emplace_back(static_cast<int>(key >> 32), static_cast<int>(key & 0xFFFFFFFFu),
                          static_cast<double>(c));
    cooc.total_pairs += c;
  }
  const auto v = static_cast<Eigen::Index>(cooc.vocabulary.size());
  cooc.counts.resize(v, v);
  cooc.counts.setFromTriplets(triplets.begin(), triplets.end());
  cooc.counts.makeCompressed();
  return cooc;
}

SparseMatrix ppmi(const CooccurrenceMatrix &cooc, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DataError("context smoothing alpha must be in (0, 1]");
  if (cooc.total_pairs <= 0) throw DataError("co-occurrence matrix has no pairs");

  const SparseMatrix &counts = cooc.counts;
  const double total = static_cast<double>(cooc.total_pairs);
  Vector row_sums = Vector::Zero(counts.rows());
  Vector col_sums = Vector::Zero(counts.cols());
  for (Eigen::Index r = 0; r < counts.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(counts, r); it; ++it) {
      row_sums(it.row()) += it.value();
      col_sums(it.col()) += it.value();
    }
  }
  Vector context_weight = col_sums.array().pow(alpha);
  const double context_norm = context_weight.sum();

  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index r = 0; r < counts.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(counts, r); it; ++it) {
      const double p_wc = it.value() / total;
      const double p_w = row_sums(it.row()) / total;
      const double p_c = context_weight(it.col()) / context_norm;
      const double pmi = std::log(p_wc / (p_w * p_c));
      if (pmi > 0.0) triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), pmi);
    }
  }
  SparseMatrix out(counts.rows(), counts.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

TruncatedSvd truncated_svd(const SparseMatrix &m, Eigen::Index d, Eigen::Index dense_limit) {
  if (d < 1) throw DataError("SVD dimension must be at least 1");
  if (m.nonZeros() == 0) throw NumericError("cannot take the SVD of an all-zero matrix");

  TruncatedSvd out;
  const Eigen::Index small_side = std::min(m.rows(), m.cols());
  Eigen::Index k = d;
  if (k > small_side) {
    k = small_side;
    out.rank_limited = true;
  }

  if (small_side <= dense_limit) {
    dense_svd(Matrix(m), k, out);
  } else {
    // Randomized range finder with power iterations.
    const Eigen::Index sketch = std::min<Eigen::Index>(small_side, k + 10);
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    Matrix omega(m.cols(), sketch);
    for (Eigen::Index j = 0; j < omega.cols(); ++j) {
      for (Eigen::Index i = 0; i < omega.rows(); ++i) omega(i, j) = normal(rng);
    }
    Matrix q = orthonormal_basis(m * omega);
    for (int iter = 0; iter < 4; ++iter) {
      Matrix z = orthonormal_basis(m.transpose() * q);
      q = orthonormal_basis(m * z);
    }
    const Matrix b = q.transpose() * m;  // sketch x cols
    TruncatedSvd small;
    dense_svd(b, k, small);
    out.u = q * small.u;
    out.singular_values = small.singular_values;
    out.v = small.v;
  }

  // drop numerically null directions
  const double tol = out.singular_values.size() > 0
                         ? out.singular_values(0) * 1e-12 * static_cast<double>(std::max(m.rows(), m.cols()))
                         : 0.0;
  Eigen::Index rank = 0;
  while (rank < out.singular_values.size() && out.singular_values(rank) > tol) ++rank;
  if (rank < out.singular_values.size()) {
    out.u.conservativeResize(Eigen::NoChange, rank);
    out.v.conservativeResize(Eigen::NoChange, rank);
    out.singular_values.conservativeResize(rank);
    out.rank_limited = true;
  }

  for (Eigen::Index j = 0; j < out.u.cols(); ++j) {
    Eigen::Index arg = 0;
    out.u.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.u(arg, j) < 0.0) {
      out.u.col(j) *= -1.0;
      out.v.col(j) *= -1.0;
    }
  }
  return out;
}

EmbeddingSpace svd_embeddings(const CooccurrenceMatrix &cooc, const SparseMatrix &ppmi_matrix,
                              const SvdEmbeddingConfig &cfg) {
  const TruncatedSvd svd = truncated_svd(ppmi_matrix, cfg.dim);
  Vector weights = svd.singular_values.array().pow(cfg.sigma_exponent);
  Matrix words = svd.u * weights.asDiagonal();

  std::vector<std::string> vocab;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < words.rows(); ++i) {
    if (words.row(i).squaredNorm() > 0.0) {
      rows.push_back(i);
      vocab.push_back(cooc.vocabulary[static_cast<size_t>(i)]);
    }
  }
  Matrix kept(static_cast<Eigen::Index>(rows.size()), words.cols());
  for (size_t r = 0; r < rows.size(); ++r) kept.row(static_cast<Eigen::Index>(r)) = words.row(rows[r]);

  std::map<std::string, std::string> meta;
  meta["method"] = "ppmi_svd";
  meta["dim"] = std::to_string(words.cols());
  meta["requested_dim"] = std::to_string(cfg.dim);
  meta["window"] = std::to_string(cfg.window);
  meta["min_count"] = std::to_string(cfg.min_count);
  meta["alpha"] = format_double(cfg.alpha);
  meta["sigma_exponent"] = format_double(cfg.sigma_exponent);
  meta["rank_limited"] = svd.rank_limited ? "true" : "false";
  meta["dropped_zero_rows"] = std::to_string(words.rows() - kept.rows());
  std::string sv;
  for (Eigen::Index i = 0; i < svd.singular_values.size(); ++i) {
    if (i) sv += ',';
    sv += format_double(svd.singular_values(i));
  }
  meta["singular_values"] = sv;
  return EmbeddingSpace(std::move(vocab), std::move(kept), std::move(meta));
}

EmbeddingSpace train_svd(const PeriodCorpus &pc, const SvdEmbeddingConfig &cfg) {
  const auto cooc = count_cooccurrences(pc, cfg.window, cfg.min_count);
  const auto matrix = ppmi(cooc, cfg.alpha);
  auto space = svd_embeddings(cooc, matrix, cfg);
  space.metadata()["period"] = pc.period().label();
  return space;
}

}  // namespace diachron
