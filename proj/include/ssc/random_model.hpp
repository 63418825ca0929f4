#pragma once

// Fully random union-of-subspaces model and Monte-Carlo checks of the
// concentration facts the probabilistic guarantees rest on.

#include "ssc/inradius.hpp"
#include "ssc/subspace_data.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <utility>

namespace ssc {

// ---------------------------------------------------------------------------
// Reproducible RNG streams. Every trial / grid cell gets its own engine whose
// seed is a pure function of (master seed, stream index...).

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, Rest... rest) {
  return derive_seed(splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ull)), static_cast<std::uint64_t>(rest)...);
}

using Rng = std::mt19937_64;

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // Fill column-major explicitly so the draw order is fixed.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// Uniform point on the unit sphere of R^dim.
inline Vector random_unit_vector(Index dim, Rng& rng) {
  Vector v = gaussian_matrix(dim, 1, rng).col(0);
  double n = v.norm();
  while (n == 0.0) {
    v = gaussian_matrix(dim, 1, rng).col(0);
    n = v.norm();
  }
  return v / n;
}

/// Haar-distributed d-dim subspace of R^D: Gaussian matrix, then thin QR.
inline Matrix random_basis(Index ambient, Index dim, Rng& rng) {
  const Matrix g = gaussian_matrix(ambient, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(ambient, dim);
  return q;
}

/// Binary D-vector with exactly m zeros at uniformly random positions.
inline Vector random_pattern(Index ambient, Index missing, Rng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(ambient));
  std::iota(idx.begin(), idx.end(), Index{0});
  Vector w = Vector::Ones(ambient);
  // Partial Fisher-Yates.
  for (Index k = 0; k < missing; ++k) {
    std::uniform_int_distribution<Index> pick(k, ambient - 1);
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(rng))]);
    w(idx[static_cast<std::size_t>(k)]) = 0.0;
  }
  return w;
}

// ---------------------------------------------------------------------------

struct RandomModelParams {
  int n = 3;            // subspaces
  int d = 5;            // common subspace dimension
  int D = 100;          // ambient dimension
  double rho = 10.0;    // point density; rho*d + 1 points per subspace
  std::uint64_t seed = 0;
  int m = 0;            // missing entries per point
  double epsilon = 0.001;

  int points_per_subspace() const {
    const double pd = rho * d;
    const double r = std::round(pd);
    require(std::abs(pd - r) <= 1e-9 && r >= 0.0, ErrorCode::InvalidDensity,
            "rho*d must be a non-negative integer");
    return static_cast<int>(r) + 1;
  }
  int total_points() const { return n * points_per_subspace(); }

  /// sqrt(ln(rho) / (16 d)); natural logarithm.
  double alpha() const { return std::sqrt(std::log(rho) / (16.0 * d)); }
  /// sqrt(6 ln(N) / D); natural logarithm.
  double beta() const { return std::sqrt(6.0 * std::log(static_cast<double>(total_points())) / D); }
  double omega() const { return static_cast<double>(m) / D; }

  void validate() const {
    require(n >= 1 && d >= 1 && D >= 2, ErrorCode::InvalidArgument, "need n >= 1, d >= 1, D >= 2");
    require(d < D, ErrorCode::InvalidArgument, "need d < D");
    require(m >= 0 && m < D - d, ErrorCode::InvalidArgument, "need 0 <= m < D - d");
    require(rho > 0.0, ErrorCode::InvalidDensity, "rho must be positive");
    (void)points_per_subspace();
  }
};

struct GeneratedInstance {
  SubspaceArrangement arrangement;
  MaskedDataset data;
};

/// Draws the arrangement, the points (grouped by label) and the patterns, in
/// that order, from one engine seeded with params.seed.
inline GeneratedInstance generate(const RandomModelParams& params) {
  params.validate();
  Rng rng(derive_seed(params.seed));
  const int per = params.points_per_subspace();
  std::vector<Matrix> bases;
  for (int i = 0; i < params.n; ++i) bases.push_back(random_basis(params.D, params.d, rng));
  Matrix points(params.D, static_cast<Index>(params.n) * per);
  Labels labels;
  Index col = 0;
  for (int i = 0; i < params.n; ++i) {
    for (int k = 0; k < per; ++k, ++col) {
      const Vector g = random_unit_vector(params.d, rng);
      Vector x = bases[static_cast<std::size_t>(i)] * g;
      points.col(col) = x / x.norm();
      labels.push_back(i);
    }
  }
  Matrix patterns(params.D, points.cols());
  for (Index j = 0; j < points.cols(); ++j) patterns.col(j) = random_pattern(params.D, params.m, rng);
  auto arr = SubspaceArrangement::from_bases(std::move(bases));
  return {std::move(arr), MaskedDataset(std::move(points), std::move(labels), std::move(patterns))};
}

// ---------------------------------------------------------------------------
// Concentration validators.

struct LemmaCheck {
  std::string name;
  std::string params;
  long trials = 0;
  long exceedances = 0;
  double empirical_rate = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;  // three binomial standard deviations at the bound
  double empirical_mean = std::nan("");
  bool regime_ok = true;
  std::string method;

  bool pass() const { return empirical_rate <= bound + tolerance; }
};

inline double binomial_three_sigma(double p, long trials) {
  const double q = std::clamp(p, 0.0, 1.0);
  return 3.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
}

/// Inradius lower bound: fraction of trials whose rho*d uniform points on
/// S^{d-1} have r <= alpha, against exp(-sqrt(rho) d).
inline LemmaCheck validate_inradius_bound(long trials, const RandomModelParams& params) {
  LemmaCheck out;
  out.name = "inradius";
  const int d = params.d;
  const long n_points = std::lround(params.rho * d);
  out.params = "d=" + std::to_string(d) + ";rho=" + format_double(params.rho);
  out.trials = trials;
  out.regime_ok = params.rho >= 5.0;
  out.bound = std::exp(-std::sqrt(params.rho) * d);
  const double alpha = params.alpha();
  for (long t = 0; t < trials; ++t) {
    Rng rng(derive_seed(params.seed, 0x1A, static_cast<std::uint64_t>(t)));
    Matrix y(d, n_points);
    for (long k = 0; k < n_points; ++k) y.col(k) = random_unit_vector(d, rng);
    const InradiusMethod method = d <= 2 ? InradiusMethod::Exact2D : InradiusMethod::Polytope;
    InradiusResult r = inradius(y, method, {.seed = derive_seed(params.seed, t)});
    out.method = to_string(r.method);
    if (r.value <= alpha) ++out.exceedances;
  }
  out.empirical_rate = static_cast<double>(out.exceedances) / static_cast<double>(trials);
  out.tolerance = binomial_three_sigma(out.bound, trials);
  return out;
}

/// Inner-product tail: P[|x^T v| >= eps] <= 2 exp(-D eps^2 / 2).
inline LemmaCheck validate_inner_product_tail(long trials, int dim, double eps, std::uint64_t seed) {
  require(dim >= 2, ErrorCode::InvalidArgument, "need D >= 2");
  LemmaCheck out;
  out.name = "inner_product_tail";
  out.params = "D=" + std::to_string(dim) + ";eps=" + format_double(eps);
  out.trials = trials;
  out.bound = 2.0 * std::exp(-dim * eps * eps / 2.0);
  double sum = 0.0;
  for (long t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, 0x1B, static_cast<std::uint64_t>(t)));
    const Vector x = random_unit_vector(dim, rng);
    const Vector v = random_unit_vector(dim, rng);
    const double ip = std::abs(x.dot(v));
    sum += ip;
    if (ip >= eps) ++out.exceedances;
  }
  out.empirical_mean = sum / static_cast<double>(trials);
  out.empirical_rate = static_cast<double>(out.exceedances) / static_cast<double>(trials);
  out.tolerance = binomial_three_sigma(out.bound, trials);
  return out;
}

/// Random projection norm: P[ |‖P_V x‖ - sqrt(d/D)| > eps ] <= 2 exp(-D eps^2 / 2)
/// for a fixed d-dim subspace V (drawn once from the seed).
inline LemmaCheck validate_projection_norm(long trials, int dim, int sub_dim, double eps, std::uint64_t seed) {
  require(sub_dim > 0 && sub_dim <= dim, ErrorCode::InvalidArgument, "need 0 < d <= D");
  LemmaCheck out;
  out.name = "projection_norm";
  out.params = "D=" + std::to_string(dim) + ";d=" + std::to_string(sub_dim) + ";eps=" + format_double(eps);
  out.trials = trials;
  out.bound = 2.0 * std::exp(-dim * eps * eps / 2.0);
  Rng basis_rng(derive_seed(seed, 0x1C));
  const Matrix v = sub_dim == dim ? Matrix(Matrix::Identity(dim, dim)) : random_basis(dim, sub_dim, basis_rng);
  const double center = std::sqrt(static_cast<double>(sub_dim) / dim);
  double sum = 0.0;
  for (long t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, 0x1D, static_cast<std::uint64_t>(t)));
    const Vector x = random_unit_vector(dim, rng);
    const double norm = (v.transpose() * x).norm();
    sum += norm;
    if (norm < center - eps || norm > center + eps) ++out.exceedances;
  }
  out.empirical_mean = sum / static_cast<double>(trials);
  out.empirical_rate = static_cast<double>(out.exceedances) / static_cast<double>(trials);
  out.tolerance = binomial_three_sigma(out.bound, trials);
  return out;
}

}  // namespace ssc
