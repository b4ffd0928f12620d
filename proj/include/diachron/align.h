#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "diachron/corpus.h"
#include "diachron/embedding.h"

namespace diachron {

enum class Preprocess { kNone, kL2Normalize, kCenterThenL2 };

Preprocess parse_preprocess(const std::string &name);
const char *to_string(Preprocess p);

// Applies the row preprocessing to a whole space.
EmbeddingSpace preprocess(const EmbeddingSpace &space, Preprocess mode);

// Row-aligned vectors of the tokens both spaces know, in sorted token order.
struct IntersectionEmbeddings {
  std::vector<std::string> shared_vocabulary;
  Matrix base;
  Matrix target;
  Preprocess preprocessing = Preprocess::kNone;
};

IntersectionEmbeddings intersect(const EmbeddingSpace &base, const EmbeddingSpace &target,
                                 Preprocess mode = Preprocess::kL2Normalize);

enum class MapKind { kOrthogonal, kLinear };

struct AlignmentMap {
  MapKind kind = MapKind::kOrthogonal;
  // Orthogonal: Q, applied to row vectors as v^T Q.
  // Linear: M, applied to column vectors as M v.
  Matrix matrix;
  Preprocess preprocessing = Preprocess::kNone;  // applied to both spaces before fitting
  size_t fit_size = 0;  // shared vocabulary size or seed count
  double residual = 0.0;
  std::string base_period;
  std::string target_period;
  std::vector<std::string> warnings;
};

// argmin_{Q^T Q = I} ||E_base Q - E_target||_F^2 via the SVD of E_base^T E_target.
AlignmentMap orthogonal_procrustes(const IntersectionEmbeddings &ie);

struct SeedPairSet {
  std::vector<std::string> tokens;
  Preprocess preprocessing = Preprocess::kNone;
  Matrix base;    // one row per seed
  Matrix target;
  std::vector<std::string> warnings;
};

// Tokens among the top_n most frequent of both periods (frequency ties by
// token) that both spaces contain, in sorted order.
SeedPairSet select_seed_pairs(const EmbeddingSpace &base, const EmbeddingSpace &target,
                              const Vocabulary &base_freq, const Vocabulary &target_freq,
                              size_t top_n = 1000, Preprocess mode = Preprocess::kL2Normalize);

// argmin_M sum ||M x_b - x_t||^2 + alpha ||M||_F^2.
AlignmentMap ridge_linear_map(const SeedPairSet &seeds, double ridge_alpha = 0.2);

Vector align_vector(const AlignmentMap &map, const Eigen::Ref<const Vector> &v);

// Header line "kind=<orthogonal|linear> d=<d> base=<label> target=<label>
// preprocess=<mode> fit_size=<n> residual=<value>", then d rows of d numbers.
void save_alignment(const AlignmentMap &map, const std::filesystem::path &path);
AlignmentMap load_alignment(const std::filesystem::path &path);

}  // namespace diachron
