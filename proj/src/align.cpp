#include "diachron/align.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "diachron/error.h"

namespace diachron {

namespace {

std::vector<std::string> top_by_frequency(const Vocabulary &freq, size_t n) {
  std::vector<std::pair<std::string, int64_t>> items(freq.begin(), freq.end());
  std::sort(items.begin(), items.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (items.size() > n) items.resize(n);
  std::vector<std::string> words;
  words.reserve(items.size());
  for (auto &[w, c] : items) words.push_back(std::move(w));
  return words;
}

const char *to_string(MapKind kind) { return kind == MapKind::kOrthogonal ? "orthogonal" : "linear"; }

}  // namespace

Preprocess parse_preprocess(const std::string &name) {
  if (name == "none") return Preprocess::kNone;
  if (name == "l2" || name == "l2_normalize") return Preprocess::kL2Normalize;
  if (name == "center_l2" || name == "center_then_l2") return Preprocess::kCenterThenL2;
  throw DataError("unknown preprocessing '" + name + "' (none, l2_normalize, center_then_l2)");
}

const char *to_string(Preprocess p) {
  switch (p) {
    case Preprocess::kNone: return "none";
    case Preprocess::kL2Normalize: return "l2_normalize";
    case Preprocess::kCenterThenL2: return "center_then_l2";
  }
  return "none";
}

EmbeddingSpace preprocess(const EmbeddingSpace &space, Preprocess mode) {
  Matrix m = space.vectors();
  if (mode == Preprocess::kCenterThenL2 && m.rows() > 0) {
    const Eigen::RowVectorXd mean = m.colwise().mean();
    m.rowwise() -= mean;
  }
  if (mode != Preprocess::kNone) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double norm = m.row(i).norm();
      if (norm > 0.0) m.row(i) /= norm;
    }
  }
  auto meta = space.metadata();
  meta["preprocess"] = to_string(mode);
  return EmbeddingSpace(space.vocabulary(), std::move(m), std::move(meta));
}

IntersectionEmbeddings intersect(const EmbeddingSpace &base, const EmbeddingSpace &target,
                                 Preprocess mode) {
  if (base.dim() != target.dim()) {
    throw DataError("cannot intersect spaces of dimension " + std::to_string(base.dim()) +
                    " and " + std::to_string(target.dim()));
  }
  const EmbeddingSpace b = preprocess(base, mode);
  const EmbeddingSpace t = preprocess(target, mode);

  IntersectionEmbeddings ie;
  ie.preprocessing = mode;
  for (const auto &tok : b.vocabulary()) {
    if (t.contains(tok)) ie.shared_vocabulary.push_back(tok);
  }
  if (ie.shared_vocabulary.empty()) {
    throw DataError("the two vocabularies share no token; alignment is impossible");
  }
  std::sort(ie.shared_vocabulary.begin(), ie.shared_vocabulary.end());
  const auto n = static_cast<Eigen::Index>(ie.shared_vocabulary.size());
  ie.base.resize(n, b.dim());
  ie.target.resize(n, t.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &tok = ie.shared_vocabulary[static_cast<size_t>(i)];
    ie.base.row(i) = b.vectors().row(static_cast<Eigen::Index>(*b.index_of(tok)));
    ie.target.row(i) = t.vectors().row(static_cast<Eigen::Index>(*t.index_of(tok)));
  }
  return ie;
}

AlignmentMap orthogonal_procrustes(const IntersectionEmbeddings &ie) {
  const Matrix k = ie.base.transpose() * ie.target;
  if (k.cwiseAbs().maxCoeff() == 0.0) {
    throw NumericError("cross-covariance of the intersection embeddings is zero");
  }
  Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);

  AlignmentMap map;
  map.kind = MapKind::kOrthogonal;
  map.preprocessing = ie.preprocessing;
  map.matrix = svd.matrixU() * svd.matrixV().transpose();
  map.fit_size = ie.shared_vocabulary.size();
  map.residual = (ie.base * map.matrix - ie.target).squaredNorm();
  if (ie.base.rows() < ie.base.cols()) {
    map.warnings.push_back("only " + std::to_string(ie.base.rows()) +
                           " shared words for dimension " + std::to_string(ie.base.cols()));
  }
  return map;
}

SeedPairSet select_seed_pairs(const EmbeddingSpace &base, const EmbeddingSpace &target,
                              const Vocabulary &base_freq, const Vocabulary &target_freq,
                              size_t top_n, Preprocess mode) {
  if (base.dim() != target.dim()) throw DataError("seed spaces differ in dimension");
  const auto base_top = top_by_frequency(base_freq, top_n);
  const auto target_top = top_by_frequency(target_freq, top_n);
  const std::set<std::string> target_set(target_top.begin(), target_top.end());

  const EmbeddingSpace b = preprocess(base, mode);
  const EmbeddingSpace t = preprocess(target, mode);

  SeedPairSet seeds;
  seeds.preprocessing = mode;
  for (const auto &tok : base_top) {
    if (target_set.count(tok) && b.contains(tok) && t.contains(tok)) seeds.tokens.push_back(tok);
  }
  std::sort(seeds.tokens.begin(), seeds.tokens.end());
  const auto n = static_cast<Eigen::Index>(seeds.tokens.size());
  seeds.base.resize(n, b.dim());
  seeds.target.resize(n, t.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &tok = seeds.tokens[static_cast<size_t>(i)];
    seeds.base.row(i) = b.vector(tok);
    seeds.target.row(i) = t.vector(tok);
  }
  if (n < b.dim()) {
    seeds.warnings.push_back("only " + std::to_string(n) + " seed pairs for dimension " +
                             std::to_string(b.dim()));
  }
  return seeds;
}

AlignmentMap ridge_linear_map(const SeedPairSet &seeds, double ridge_alpha) {
  if (seeds.tokens.empty()) throw DataError("ridge regression needs at least one seed pair");
  if (ridge_alpha < 0.0) throw DataError("ridge alpha must be non-negative");
  const Eigen::Index n = seeds.base.rows();
  const Eigen::Index d = seeds.base.cols();

  // Least squares on the augmented system [X; sqrt(a) I] B = [Y; 0].
  Matrix a(n + d, d);
  a.topRows(n) = seeds.base;
  a.bottomRows(d) = std::sqrt(ridge_alpha) * Matrix::Identity(d, d);
  Matrix rhs = Matrix::Zero(n + d, seeds.target.cols());
  rhs.topRows(n) = seeds.target;

  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < d) {
    throw NumericError("ridge system is singular (seed vectors are rank " + std::to_string(qr.rank()) +
                       " in dimension " + std::to_string(d) + "); use a ridge alpha > 0");
  }
  const Matrix b = qr.solve(rhs);

  AlignmentMap map;
  map.kind = MapKind::kLinear;
  map.preprocessing = seeds.preprocessing;
  map.matrix = b.transpose();
  map.fit_size = seeds.tokens.size();
  map.residual = (seeds.base * b - seeds.target).squaredNorm();
  map.warnings = seeds.warnings;
  return map;
}

Vector align_vector(const AlignmentMap &map, const Eigen::Ref<const Vector> &v) {
  if (v.size() != map.matrix.rows()) {
    throw DataError("vector of dimension " + std::to_string(v.size()) + " given to a " +
                    std::to_string(map.matrix.rows()) + "-dimensional alignment");
  }
  if (map.kind == MapKind::kOrthogonal) return map.matrix.transpose() * v;
  return map.matrix * v;
}

void save_alignment(const AlignmentMap &map, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << "kind=" << to_string(map.kind) << " d=" << map.matrix.rows()
      << " base=" << (map.base_period.empty() ? "-" : map.base_period)
      << " target=" << (map.target_period.empty() ? "-" : map.target_period)
      << " preprocess=" << to_string(map.preprocessing) << " fit_size=" << map.fit_size
      << " residual=" << map.residual << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < map.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < map.matrix.cols(); ++j) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), map.matrix(i, j));
      if (j) out << ' ';
      out << std::string_view(buf, end - buf);
    }
    out << '\n';
  }
}

AlignmentMap load_alignment(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  const std::string name = path.string();
  std::string line;
  if (!std::getline(in, line)) throw FormatError(name, 1, "missing header");

  std::map<std::string, std::string> fields;
  std::istringstream header(line);
  std::string field;
  while (header >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw FormatError(name, 1, "header field without '=': " + field);
    fields[field.substr(0, eq)] = field.substr(eq + 1);
  }
  for (const char *key : {"kind", "d", "preprocess", "fit_size", "residual"}) {
    if (!fields.count(key)) throw FormatError(name, 1, std::string("header lacks ") + key);
  }

  AlignmentMap map;
  if (fields["kind"] == "orthogonal") map.kind = MapKind::kOrthogonal;
  else if (fields["kind"] == "linear") map.kind = MapKind::kLinear;
  else throw FormatError(name, 1, "unknown kind '" + fields["kind"] + "'");
  try {
    map.preprocessing = parse_preprocess(fields["preprocess"]);
    map.fit_size = std::stoul(fields["fit_size"]);
    map.residual = std::stod(fields["residual"]);
  } catch (const std::exception &e) {
    throw FormatError(name, 1, e.what());
  }
  map.base_period = fields.count("base") && fields["base"] != "-" ? fields["base"] : "";
  map.target_period = fields.count("target") && fields["target"] != "-" ? fields["target"] : "";
  const long d = std::stol(fields["d"]);
  if (d <= 0) throw FormatError(name, 1, "dimension must be positive");
  map.matrix.resize(d, d);
  for (long i = 0; i < d; ++i) {
    if (!std::getline(in, line)) throw FormatError(name, i + 2, "missing matrix row");
    std::istringstream row(line);
    for (long j = 0; j < d; ++j) {
      if (!(row >> map.matrix(i, j))) throw FormatError(name, i + 2, "row has fewer than d values");
    }
    std::string extra;
    if (row >> extra) throw FormatError(name, i + 2, "row has more than d values");
  }
  return map;
}

}  // namespace diachron
