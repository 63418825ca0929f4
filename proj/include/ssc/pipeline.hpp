#pragma once

// End-to-end clustering: per-point self-expression under one of the three
// variants, affinity W = |C| + |C|^T, normalized spectral clustering and the
// usual quality metrics.

#include "ssc/geometry.hpp"
#include "ssc/parallel.hpp"
#include "ssc/random_model.hpp"

#include <limits>
#include <optional>
#include <string>

namespace ssc {

/// FIXED uses one lambda everywhere; ADAPTIVE sets lambda_j = a / ||Y_j^T y_j||_inf.
struct LambdaRule {
  enum class Kind { Fixed, Adaptive };
  Kind kind = Kind::Adaptive;
  double value = 2.0;

  static LambdaRule fixed(double lambda) { return {Kind::Fixed, lambda}; }
  static LambdaRule adaptive(double a = 2.0) { return {Kind::Adaptive, a}; }

  double resolve(double max_corr) const {
    if (kind == Kind::Fixed) return value;
    return max_corr > 0.0 ? value / max_corr : std::numeric_limits<double>::infinity();
  }
  std::string describe() const {
    return (kind == Kind::Fixed ? "fixed:" : "adaptive:") + format_double(value);
  }
};

struct SelfExpressOptions {
  LassoOptions lasso{};
  unsigned threads = 1;
  double sp_rel_threshold = 1e-6;
};

struct SelfExpression {
  Matrix coeffs;  // N x N, zero diagonal
  Variant variant = Variant::Complete;
  std::vector<double> lambdas;
  std::vector<bool> sp_flags;
  std::vector<bool> converged;
  std::vector<std::string> failures;  // empty string when the column solved
};

/// True iff column `c` (coefficients of point j over all N points) is nonzero
/// and every entry above threshold * ||c||_inf sits on a same-label point.
inline bool subspace_preserving(const Eigen::Ref<const Vector>& c, const Labels& labels, Index j,
                                double rel_threshold = 1e-6) {
  const double peak = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
  if (!(peak > 0.0)) return false;
  const double cut = rel_threshold * peak;
  const int own = labels[static_cast<std::size_t>(j)];
  for (Index k = 0; k < c.size(); ++k)
    if (std::abs(c(k)) > cut && labels[static_cast<std::size_t>(k)] != own) return false;
  return true;
}

namespace detail {

inline std::vector<Index> all_but(Index n, Index skip) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
  for (Index k = 0; k < n; ++k)
    if (k != skip) out.push_back(k);
  return out;
}

}  // namespace detail

/// Full-dictionary solve for one column at a given lambda; the returned
/// vector has length N with a zero at `j`.
inline LassoSolution express_column(const MaskedDataset& data, Variant variant, Index j, double lambda,
                                    const LassoOptions& opts = {}) {
  require(j >= 0 && j < data.size(), ErrorCode::InvalidArgument, "column out of range");
  const Matrix& base = variant == Variant::Complete ? data.points() : data.zero_filled();
  const Matrix view = variant == Variant::ProjectedZeroFilled ? Matrix(data.pattern(j).asDiagonal() * base) : base;
  const auto idx = detail::all_but(data.size(), j);
  LassoSolution s = solve_lasso(view(Eigen::all, idx), view.col(j), lambda, opts);
  Vector full = Vector::Zero(data.size());
  for (std::size_t a = 0; a < idx.size(); ++a) full(idx[a]) = s.coeffs(static_cast<Index>(a));
  s.coeffs = std::move(full);
  return s;
}

/// Solves every column. Complete and ZF share one Gram matrix; PZF masks the
/// zero-filled data with each anchor's pattern and rebuilds the Gram per column.
inline SelfExpression self_express(const MaskedDataset& data, Variant variant, const LambdaRule& rule,
                                   const SelfExpressOptions& opts = {}) {
  const Index n = data.size();
  require(n >= 2, ErrorCode::InvalidArgument, "self-expression needs at least two points");
  require(rule.kind == LambdaRule::Kind::Adaptive ? rule.value > 1.0 : rule.value > 0.0, ErrorCode::InvalidArgument,
          rule.kind == LambdaRule::Kind::Adaptive ? "adaptive factor must exceed 1" : "lambda must be positive");
  SelfExpression out;
  out.variant = variant;
  out.coeffs = Matrix::Zero(n, n);
  out.lambdas.assign(static_cast<std::size_t>(n), std::nan(""));
  out.sp_flags.assign(static_cast<std::size_t>(n), false);
  out.converged.assign(static_cast<std::size_t>(n), false);
  out.failures.assign(static_cast<std::size_t>(n), std::string());

  const Matrix& base = variant == Variant::Complete ? data.points() : data.zero_filled();
  Matrix shared_gram;
  if (variant != Variant::ProjectedZeroFilled) shared_gram = base.transpose() * base;

  // vector<bool> is not safe to write concurrently; collect per column first.
  std::vector<char> sp(static_cast<std::size_t>(n), 0), conv(static_cast<std::size_t>(n), 0);
  parallel_for(static_cast<std::size_t>(n), opts.threads, [&](std::size_t jj) {
    const Index j = static_cast<Index>(jj);
    const auto idx = detail::all_but(n, j);
    try {
      Matrix view;
      Matrix gram;
      if (variant == Variant::ProjectedZeroFilled) {
        view = data.pattern(j).asDiagonal() * base;
        gram = view.transpose() * view;
      }
      const Matrix& v = variant == Variant::ProjectedZeroFilled ? view : base;
      const Matrix& g = variant == Variant::ProjectedZeroFilled ? gram : shared_gram;
      const Matrix dict = v(Eigen::all, idx);
      const Vector y = v.col(j);
      const Matrix sub_gram = g(idx, idx);
      const Vector corr = g(idx, j);
      const double lambda = rule.resolve(corr.cwiseAbs().maxCoeff());
      out.lambdas[jj] = lambda;
      require(std::isfinite(lambda), ErrorCode::DegeneratePoint, "anchor is orthogonal to every other point");
      const LassoSolution s = solve_lasso_gram(dict, y, sub_gram, corr, lambda, opts.lasso);
      for (std::size_t a = 0; a < idx.size(); ++a) out.coeffs(idx[a], j) = s.coeffs(static_cast<Index>(a));
      conv[jj] = s.converged;
      if (!s.converged) out.failures[jj] = to_string(ErrorCode::NonConvergence);
      sp[jj] = subspace_preserving(out.coeffs.col(j), data.labels(), j, opts.sp_rel_threshold);
    } catch (const Error& e) {
      out.failures[jj] = to_string(e.code());
    }
  });
  for (Index j = 0; j < n; ++j) {
    out.sp_flags[static_cast<std::size_t>(j)] = sp[static_cast<std::size_t>(j)] != 0;
    out.converged[static_cast<std::size_t>(j)] = conv[static_cast<std::size_t>(j)] != 0;
  }
  return out;
}

/// Recomputes sp flags against `labels` (e.g. after relabeling).
inline std::vector<bool> sp_flags(const Matrix& coeffs, const Labels& labels, double rel_threshold = 1e-6) {
  std::vector<bool> flags(static_cast<std::size_t>(coeffs.cols()));
  for (Index j = 0; j < coeffs.cols(); ++j)
    flags[static_cast<std::size_t>(j)] = subspace_preserving(coeffs.col(j), labels, j, rel_threshold);
  return flags;
}

inline double sp_rate(const std::vector<bool>& flags) {
  if (flags.empty()) return 0.0;
  std::size_t good = 0;
  for (bool f : flags) good += f ? 1 : 0;
  return static_cast<double>(good) / static_cast<double>(flags.size());
}

inline double sp_rate(const SelfExpression& expr) { return sp_rate(expr.sp_flags); }

inline Matrix build_affinity(const Matrix& coeffs) {
  require(coeffs.rows() == coeffs.cols(), ErrorCode::InvalidArgument, "coefficient matrix must be square");
  Matrix w = coeffs.cwiseAbs() + coeffs.cwiseAbs().transpose();
  w.diagonal().setZero();
  return w;
}

inline Matrix build_affinity(const SelfExpression& expr) { return build_affinity(expr.coeffs); }

// ---------------------------------------------------------------------------
// Label matching

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method,
/// potentials form). Returns row -> column.
inline std::vector<int> hungarian(const Matrix& cost) {
  require(cost.rows() == cost.cols(), ErrorCode::InvalidArgument, "assignment needs a square cost matrix");
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  return row_to_col;
}

/// Misclassification rate under the best one-to-one matching of predicted to
/// true labels.
inline double clustering_error(const Labels& truth, const Labels& predicted) {
  require(truth.size() == predicted.size() && !truth.empty(), ErrorCode::InvalidArgument,
          "label vectors must be nonempty and of equal length");
  const int k = std::max(*std::max_element(truth.begin(), truth.end()),
                         *std::max_element(predicted.begin(), predicted.end())) + 1;
  Matrix agree = Matrix::Zero(k, k);
  for (std::size_t j = 0; j < truth.size(); ++j) agree(predicted[j], truth[j]) += 1.0;
  const auto match = hungarian(-agree);
  double hits = 0.0;
  for (int r = 0; r < k; ++r) hits += agree(r, match[static_cast<std::size_t>(r)]);
  return 1.0 - hits / static_cast<double>(truth.size());
}

// ---------------------------------------------------------------------------
// Spectral clustering

struct ClusteringResult {
  Labels assignments;
  double sp_rate = std::nan("");
  double clustering_error = std::nan("");  // nan without ground truth
  std::vector<double> connectivity;        // per true cluster, empty without ground truth
  std::vector<Index> isolated;             // zero-degree points
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }
};

struct SpectralOptions {
  std::uint64_t seed = 0;
  int restarts = 20;
  int max_iterations = 300;
};

/// Second-smallest eigenvalue of the unnormalized Laplacian of W restricted to
/// `nodes`; 0 for a single node.
inline double algebraic_connectivity(const Matrix& w, const std::vector<Index>& nodes) {
  if (nodes.size() < 2) return 0.0;
  const Matrix sub = w(nodes, nodes);
  Matrix lap = -sub;
  lap.diagonal() = sub.rowwise().sum();
  Eigen::SelfAdjointEigenSolver<Matrix> es(lap, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues()(1));
}

namespace detail {

struct KMeansResult {
  Labels labels;
  double inertia = std::numeric_limits<double>::infinity();
};

// k-means++ seeding followed by Lloyd iterations on the rows of x.
inline KMeansResult kmeans_once(const Matrix& x, int k, Rng& rng, int max_iterations) {
  const Index n = x.rows();
  Matrix centers(k, x.cols());
  std::uniform_int_distribution<Index> first(0, n - 1);
  centers.row(0) = x.row(first(rng));
  Vector d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (x.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> unif(0.0, total);
      double target = unif(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        target -= d2(pick);
        if (target <= 0.0) break;
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = x.row(pick);
    for (Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), (x.row(i) - centers.row(c)).squaredNorm());
  }
  KMeansResult r;
  r.labels.assign(static_cast<std::size_t>(n), 0);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = it == 0;
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dist = (x.row(i) - centers.row(c)).squaredNorm();
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      if (r.labels[static_cast<std::size_t>(i)] != best) changed = true;
      r.labels[static_cast<std::size_t>(i)] = best;
      inertia += best_d;
    }
    r.inertia = inertia;
    if (!changed) break;
    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(r.labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0) centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
  }
  return r;
}

}  // namespace detail

/// Normalized-Laplacian embedding into the n smallest eigenvectors, rows
/// normalized, then k-means++ with seeded restarts. Zero-degree points are
/// left out of the embedding and take the assignment of their nearest
/// neighbour: by |<x_i, x_j>| when `points` is given, else the first
/// connected point. `truth`, when given, fills the error and connectivity.
inline ClusteringResult spectral_cluster(const Matrix& w, int n_clusters, const SpectralOptions& opts = {},
                                         const std::optional<Labels>& truth = std::nullopt,
                                         const std::optional<Matrix>& points = std::nullopt) {
  require(w.rows() == w.cols(), ErrorCode::InvalidArgument, "affinity must be square");
  require(n_clusters >= 1, ErrorCode::InvalidArgument, "need at least one cluster");
  require(w.minCoeff() >= 0.0, ErrorCode::InvalidArgument, "affinity must be nonnegative");
  require((w - w.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, w.cwiseAbs().maxCoeff()),
          ErrorCode::InvalidArgument, "affinity must be symmetric");
  const Index n = w.rows();
  ClusteringResult out;
  out.assignments.assign(static_cast<std::size_t>(n), 0);

  const Vector degree = w.rowwise().sum();
  std::vector<Index> live;
  for (Index i = 0; i < n; ++i) {
    if (degree(i) > 0.0)
      live.push_back(i);
    else
      out.isolated.push_back(i);
  }
  if (!out.isolated.empty()) out.flags.emplace_back("ZERO_DEGREE");

  const int k = static_cast<int>(std::min<Index>(n_clusters, static_cast<Index>(live.size())));
  if (k >= 1) {
    const Index m = static_cast<Index>(live.size());
    Vector inv_sqrt(m);
    for (Index a = 0; a < m; ++a) inv_sqrt(a) = 1.0 / std::sqrt(degree(live[static_cast<std::size_t>(a)]));
    // Smallest eigenvectors of I - D^-1/2 W D^-1/2 are the largest of the
    // normalized affinity.
    const Matrix norm_aff = inv_sqrt.asDiagonal() * w(live, live) * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(norm_aff);
    Matrix embed = es.eigenvectors().rightCols(k);
    for (Index a = 0; a < m; ++a) {
      const double rn = embed.row(a).norm();
      if (rn > 0.0) embed.row(a) /= rn;
    }
    detail::KMeansResult best;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
      Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(r)));
      auto km = detail::kmeans_once(embed, k, rng, opts.max_iterations);
      if (km.inertia < best.inertia) best = std::move(km);
    }
    for (Index a = 0; a < m; ++a)
      out.assignments[static_cast<std::size_t>(live[static_cast<std::size_t>(a)])] =
          best.labels[static_cast<std::size_t>(a)];
  }
  if (live.empty()) {
    out.flags.emplace_back("DEGENERATE_AFFINITY");
  } else {
    for (Index i : out.isolated) {
      Index nearest = live.front();
      if (points) {
        double best_ip = -1.0;
        for (Index j : live) {
          const double ip = std::abs(points->col(i).dot(points->col(j)));
          if (ip > best_ip) {
            best_ip = ip;
            nearest = j;
          }
        }
      }
      out.assignments[static_cast<std::size_t>(i)] = out.assignments[static_cast<std::size_t>(nearest)];
    }
  }

  if (truth) {
    require(static_cast<Index>(truth->size()) == n, ErrorCode::InvalidArgument, "truth length differs from W");
    out.clustering_error = clustering_error(*truth, out.assignments);
    const int tk = *std::max_element(truth->begin(), truth->end()) + 1;
    for (int c = 0; c < tk; ++c) {
      std::vector<Index> nodes;
      for (Index i = 0; i < n; ++i)
        if ((*truth)[static_cast<std::size_t>(i)] == c) nodes.push_back(i);
      out.connectivity.push_back(algebraic_connectivity(w, nodes));
    }
  }
  return out;
}

struct PipelineResult {
  SelfExpression expression;
  ClusteringResult clustering;
};

/// self_express -> affinity -> spectral clustering, scored against the
/// dataset labels.
inline PipelineResult run_pipeline(const MaskedDataset& data, Variant variant, const LambdaRule& rule,
                                   const SelfExpressOptions& expr_opts = {}, const SpectralOptions& spec_opts = {}) {
  PipelineResult r;
  r.expression = self_express(data, variant, rule, expr_opts);
  r.clustering = spectral_cluster(build_affinity(r.expression), data.cluster_count(), spec_opts, data.labels(),
                                  data.zero_filled());
  r.clustering.sp_rate = sp_rate(r.expression);
  for (const auto& f : r.expression.failures) {
    if (!f.empty()) {
      r.clustering.flags.emplace_back("COLUMN_FAILURES");
      break;
    }
  }
  return r;
}

}  // namespace ssc
