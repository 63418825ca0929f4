#pragma once

// Ground-truth subspace arrangements, masked datasets and the per-anchor data
// views (zero-filled, projected, projected-zero-filled, unobserved).

#include "ssc/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace ssc {

struct SubspaceArrangement {
  Index ambient_dim = 0;
  std::vector<Matrix> bases;  // D x d_i, orthonormal columns

  Index size() const { return static_cast<Index>(bases.size()); }
  Index dim(Index i) const { return bases[static_cast<std::size_t>(i)].cols(); }
  const Matrix& basis(Index i) const { return bases[static_cast<std::size_t>(i)]; }

  static SubspaceArrangement from_bases(std::vector<Matrix> bases) {
    require(!bases.empty(), ErrorCode::InvalidArgument, "arrangement needs at least one subspace");
    SubspaceArrangement arr;
    arr.ambient_dim = bases.front().rows();
    for (const Matrix& b : bases) {
      require(b.rows() == arr.ambient_dim, ErrorCode::InvalidArgument, "bases differ in ambient dimension");
      require(b.cols() > 0 && b.cols() < arr.ambient_dim, ErrorCode::InvalidArgument,
              "subspace dimension must satisfy 0 < d < D");
      const Matrix gram = b.transpose() * b - Matrix::Identity(b.cols(), b.cols());
      require(gram.cwiseAbs().maxCoeff() <= 1e-12, ErrorCode::InvalidArgument, "basis columns are not orthonormal");
    }
    arr.bases = std::move(bases);
    return arr;
  }
};

/// Orthogonal projector B B^T.
inline Matrix projector(const Matrix& basis) { return basis * basis.transpose(); }

enum class ViewTag { Complete, ZeroFilled, Projected, ProjectedZeroFilled, Unobserved, ProjectedUnobserved };

inline const char* to_string(ViewTag tag) {
  switch (tag) {
    case ViewTag::Complete: return "COMPLETE";
    case ViewTag::ZeroFilled: return "ZF";
    case ViewTag::Projected: return "PROJECTED";
    case ViewTag::ProjectedZeroFilled: return "PZF";
    case ViewTag::Unobserved: return "UNOBSERVED";
    case ViewTag::ProjectedUnobserved: return "PROJECTED_UNOBSERVED";
  }
  return "?";
}

struct DataView {
  ViewTag tag;
  Index anchor;
  Matrix matrix;
};

/// Unit-norm points with labels and per-point observation patterns (1 =
/// observed). Immutable once built; views are derived per anchor on demand.
class MaskedDataset {
 public:
  MaskedDataset() = default;

  /// Builds the dataset, validating unit norms and the common zero count m.
  MaskedDataset(Matrix points, Labels labels, Matrix patterns)
      : points_(std::move(points)), labels_(std::move(labels)), patterns_(std::move(patterns)) {
    const Index n_points = points_.cols();
    require(n_points > 0, ErrorCode::InvalidArgument, "dataset needs at least one point");
    require(static_cast<Index>(labels_.size()) == n_points, ErrorCode::InvalidArgument,
            "label count differs from point count");
    require(patterns_.rows() == points_.rows() && patterns_.cols() == n_points, ErrorCode::PatternLengthMismatch,
            "patterns must be D x N matching the points");
    for (Index j = 0; j < n_points; ++j) {
      const double norm = points_.col(j).norm();
      require(std::abs(norm - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
              "point " + std::to_string(j) + " is not unit norm");
      require(labels_[static_cast<std::size_t>(j)] >= 0, ErrorCode::InvalidArgument, "labels must be >= 0");
    }
    Index m = -1;
    for (Index j = 0; j < n_points; ++j) {
      Index zeros = 0;
      for (Index i = 0; i < patterns_.rows(); ++i) {
        const double w = patterns_(i, j);
        require(w == 0.0 || w == 1.0, ErrorCode::InvalidArgument, "patterns must be binary");
        if (w == 0.0) ++zeros;
      }
      if (m < 0) m = zeros;
      require(zeros == m, ErrorCode::UnequalMaskCount, "every pattern must have the same number of zeros");
    }
    require(m < points_.rows(), ErrorCode::FullMask, "m must be smaller than D");
    missing_ = m;
    zero_filled_ = points_.cwiseProduct(patterns_);
    n_clusters_ = *std::max_element(labels_.begin(), labels_.end()) + 1;
  }

  Index ambient_dim() const { return points_.rows(); }
  Index size() const { return points_.cols(); }
  Index missing_per_point() const { return missing_; }
  int cluster_count() const { return n_clusters_; }
  double missing_ratio() const { return static_cast<double>(missing_) / static_cast<double>(ambient_dim()); }

  const Matrix& points() const { return points_; }
  const Labels& labels() const { return labels_; }
  int label(Index j) const { return labels_[static_cast<std::size_t>(j)]; }
  const Matrix& patterns() const { return patterns_; }
  auto pattern(Index j) const { return patterns_.col(j); }
  const Matrix& zero_filled() const { return zero_filled_; }
  Matrix unobserved() const { return points_ - zero_filled_; }

  /// Derived D x N matrix for `anchor`. The anchor only matters for the
  /// projected views, which mask every column with the anchor's pattern.
  DataView view(ViewTag tag, Index anchor) const {
    require(anchor >= 0 && anchor < size(), ErrorCode::InvalidArgument, "anchor out of range");
    const auto mask = patterns_.col(anchor).asDiagonal();
    Matrix m;
    switch (tag) {
      case ViewTag::Complete: m = points_; break;
      case ViewTag::ZeroFilled: m = zero_filled_; break;
      case ViewTag::Projected: m = mask * points_; break;
      case ViewTag::ProjectedZeroFilled: m = mask * zero_filled_; break;
      case ViewTag::Unobserved: m = unobserved(); break;
      case ViewTag::ProjectedUnobserved: m = mask * unobserved(); break;
    }
    return DataView{tag, anchor, std::move(m)};
  }

  std::vector<Index> members(int cluster) const {
    std::vector<Index> out;
    for (Index j = 0; j < size(); ++j)
      if (label(j) == cluster) out.push_back(j);
    return out;
  }

  /// Same-cluster points other than `anchor`, in column order.
  std::vector<Index> companions(Index anchor) const {
    std::vector<Index> out;
    for (Index j = 0; j < size(); ++j)
      if (j != anchor && label(j) == label(anchor)) out.push_back(j);
    return out;
  }

  std::vector<Index> others(Index anchor) const {
    std::vector<Index> out;
    for (Index j = 0; j < size(); ++j)
      if (label(j) != label(anchor)) out.push_back(j);
    return out;
  }

  /// Same points and labels under new observation patterns.
  MaskedDataset with_patterns(Matrix patterns) const { return MaskedDataset(points_, labels_, std::move(patterns)); }

  /// Column permutation: column k of the result is column perm[k] of this.
  MaskedDataset permuted(const std::vector<Index>& perm) const {
    Labels labels(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) labels[k] = label(perm[k]);
    return MaskedDataset(select_columns(points_, perm), std::move(labels), select_columns(patterns_, perm));
  }

 private:
  Matrix points_;
  Labels labels_;
  Matrix patterns_;
  Matrix zero_filled_;
  Index missing_ = 0;
  int n_clusters_ = 0;
};

/// Validating constructor matching the dataset contract; patterns given as one
/// binary D-vector per point.
inline MaskedDataset apply_patterns(const Matrix& points, const Labels& labels, const std::vector<Vector>& patterns) {
  require(static_cast<Index>(patterns.size()) == points.cols(), ErrorCode::PatternLengthMismatch,
          "need one pattern per point");
  Matrix p(points.rows(), points.cols());
  for (std::size_t j = 0; j < patterns.size(); ++j) {
    require(patterns[j].size() == points.rows(), ErrorCode::PatternLengthMismatch,
            "pattern " + std::to_string(j) + " has length " + std::to_string(patterns[j].size()));
    p.col(static_cast<Index>(j)) = patterns[j];
  }
  return MaskedDataset(points, labels, std::move(p));
}

/// Basis of the span of diag(pattern) * basis. Throws DegenerateSubspace when
/// the masked basis vanishes.
inline Matrix project_basis(const Matrix& basis, const Eigen::Ref<const Vector>& pattern, double rel_tol = 1e-10) {
  require(pattern.size() == basis.rows(), ErrorCode::PatternLengthMismatch, "pattern length differs from D");
  Matrix masked = pattern.asDiagonal() * basis;
  // Column norms of an orthonormal basis are 1, so the masked norm is an
  // absolute scale for the rank decision as well.
  Matrix out = range_basis(masked, rel_tol);
  require(out.cols() > 0, ErrorCode::DegenerateSubspace, "projected subspace has rank 0");
  return out;
}

inline SubspaceArrangement project_subspaces(const SubspaceArrangement& arr, const Eigen::Ref<const Vector>& pattern) {
  require(pattern.size() == arr.ambient_dim, ErrorCode::PatternLengthMismatch, "pattern length differs from D");
  const Index zeros = (pattern.array() == 0.0).count();
  require(zeros < arr.ambient_dim, ErrorCode::FullMask, "pattern masks every coordinate");
  SubspaceArrangement out;
  out.ambient_dim = arr.ambient_dim;
  for (const Matrix& b : arr.bases) out.bases.push_back(project_basis(b, pattern));
  return out;
}

/// Per-cluster orthonormal span of the labeled complete points; used when no
/// ground-truth arrangement is available.
inline SubspaceArrangement estimate_arrangement(const MaskedDataset& data, double rel_tol = 1e-10) {
  SubspaceArrangement arr;
  arr.ambient_dim = data.ambient_dim();
  for (int c = 0; c < data.cluster_count(); ++c) {
    const auto cols = data.members(c);
    require(!cols.empty(), ErrorCode::MissingBasis, "cluster " + std::to_string(c) + " has no points");
    arr.bases.push_back(range_basis(select_columns(data.points(), cols), rel_tol));
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Plain-text dataset format:
//   D N n
//   D rows of N floats (points)
//   1 row of N labels
//   D rows of N {0,1} (patterns)
// Floats use 17 significant digits, so a write/read cycle is bit exact.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_dataset(std::ostream& os, const MaskedDataset& data) {
  const Index d = data.ambient_dim(), n = data.size();
  os << d << ' ' << n << ' ' << data.cluster_count() << '\n';
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < n; ++j) os << (j ? " " : "") << format_double(data.points()(i, j));
    os << '\n';
  }
  for (Index j = 0; j < n; ++j) os << (j ? " " : "") << data.label(j);
  os << '\n';
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < n; ++j) os << (j ? " " : "") << (data.patterns()(i, j) != 0.0 ? 1 : 0);
    os << '\n';
  }
}

inline MaskedDataset read_dataset(std::istream& is) {
  long long d = 0, n = 0, k = 0;
  require(static_cast<bool>(is >> d >> n >> k), ErrorCode::Parse, "missing 'D N n' header");
  require(d > 0 && n > 0 && k > 0, ErrorCode::Parse, "header values must be positive");
  Matrix points(d, n), patterns(d, n);
  Labels labels(static_cast<std::size_t>(n));
  std::string tok;
  for (long long i = 0; i < d; ++i)
    for (long long j = 0; j < n; ++j) {
      require(static_cast<bool>(is >> tok), ErrorCode::Parse, "truncated point block");
      char* end = nullptr;
      points(i, j) = std::strtod(tok.c_str(), &end);
      require(end && *end == '\0', ErrorCode::Parse, "bad float '" + tok + "'");
    }
  for (long long j = 0; j < n; ++j) {
    int l = 0;
    require(static_cast<bool>(is >> l), ErrorCode::Parse, "truncated label row");
    require(l >= 0 && l < k, ErrorCode::Parse, "label out of range");
    labels[static_cast<std::size_t>(j)] = l;
  }
  for (long long i = 0; i < d; ++i)
    for (long long j = 0; j < n; ++j) {
      int w = 0;
      require(static_cast<bool>(is >> w), ErrorCode::Parse, "truncated pattern block");
      require(w == 0 || w == 1, ErrorCode::Parse, "pattern entries must be 0 or 1");
      patterns(i, j) = w;
    }
  return MaskedDataset(std::move(points), std::move(labels), std::move(patterns));
}

inline void save_dataset(const std::string& path, const MaskedDataset& data) {
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorCode::Io, "cannot open " + path + " for writing");
  write_dataset(os, data);
  require(static_cast<bool>(os), ErrorCode::Io, "write failed for " + path);
}

inline MaskedDataset load_dataset(const std::string& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorCode::Io, "cannot open " + path);
  return read_dataset(is);
}

}  // namespace ssc
