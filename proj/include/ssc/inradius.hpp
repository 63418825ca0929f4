#pragma once

// Relative inradius r(Y) of the symmetrized convex hull of the columns of Y,
// inside span(Y). Three routes:
//   Exact2D  - branch-and-bound on min_theta ||Y^T v(theta)||_inf (d = 2)
//   Polytope - 1 / circumradius of the relative polar polytope, by vertex
//              enumeration (any small d)
//   Sampled  - min over random unit directions; only an upper bound on r

#include "ssc/core.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <random>

namespace ssc {

enum class InradiusMethod { Exact2D, Polytope, Sampled };

inline const char* to_string(InradiusMethod m) {
  switch (m) {
    case InradiusMethod::Exact2D: return "EXACT2D";
    case InradiusMethod::Polytope: return "POLYTOPE";
    case InradiusMethod::Sampled: return "SAMPLED";
  }
  return "?";
}

struct InradiusOptions {
  std::uint64_t seed = 0;
  long samples_per_dim = 10000;
  long vertex_cap = 20'000'000;
  double rank_tol = 1e-10;
};

struct InradiusResult {
  double value = 0.0;
  InradiusMethod method = InradiusMethod::Exact2D;
  bool certified = false;  // false means `value` is only an upper bound
  Index intrinsic_dim = 0;
};

namespace detail {

inline double sup_abs_projection(const Matrix& z, const Vector& u) { return (z.transpose() * u).cwiseAbs().maxCoeff(); }

inline double inradius_exact_2d(const Matrix& z) {
  // f(theta) = max_i |<z_i, (cos, sin)>| is pi-periodic and Lipschitz with
  // constant max_i ||z_i||. Cells whose Lipschitz lower bound cannot beat the
  // incumbent are discarded; the rest are bisected.
  const double lip = z.colwise().norm().maxCoeff();
  auto f = [&](double t) {
    Vector u(2);
    u << std::cos(t), std::sin(t);
    return sup_abs_projection(z, u);
  };
  struct Cell {
    double a, b, fa, fb, lb;
    bool operator<(const Cell& o) const { return lb > o.lb; }  // min-heap on lb
  };
  constexpr int kInitialCells = 1440;
  constexpr double kTol = 1e-13;
  const double pi = std::numbers::pi;
  std::priority_queue<Cell> heap;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> fv(kInitialCells + 1);
  for (int k = 0; k <= kInitialCells; ++k) {
    fv[static_cast<std::size_t>(k)] = f(pi * k / kInitialCells);
    best = std::min(best, fv[static_cast<std::size_t>(k)]);
  }
  auto make = [&](double a, double b, double fa, double fb) {
    return Cell{a, b, fa, fb, 0.5 * (fa + fb) - 0.5 * lip * (b - a)};
  };
  for (int k = 0; k < kInitialCells; ++k) {
    const double a = pi * k / kInitialCells, b = pi * (k + 1) / kInitialCells;
    heap.push(make(a, b, fv[static_cast<std::size_t>(k)], fv[static_cast<std::size_t>(k + 1)]));
  }
  while (!heap.empty()) {
    Cell c = heap.top();
    heap.pop();
    if (c.lb >= best - kTol) break;
    if (c.b - c.a < 1e-15) continue;
    const double mid = 0.5 * (c.a + c.b);
    const double fm = f(mid);
    best = std::min(best, fm);
    heap.push(make(c.a, mid, c.fa, fm));
    heap.push(make(mid, c.b, fm, c.fb));
  }
  return best;
}

inline double binomial(long n, long k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

inline double inradius_polytope(const Matrix& z, long cap) {
  // Vertices of {u : |z_i^T u| <= 1} come from d tight constraints with signs;
  // fixing the first sign removes the u / -u duplicate.
  const Index d = z.rows(), n = z.cols();
  const double combos = binomial(n, d) * std::ldexp(1.0, static_cast<int>(d - 1));
  require(combos <= static_cast<double>(cap), ErrorCode::VertexBlowup,
          "vertex enumeration needs " + std::to_string(combos) + " solves");
  std::vector<Index> idx(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k) idx[static_cast<std::size_t>(k)] = k;
  double max_norm_sq = 0.0;
  Matrix a(d, d);
  Vector rhs(d);
  const double scale = z.cwiseAbs().maxCoeff();
  while (true) {
    for (Index k = 0; k < d; ++k) a.row(k) = z.col(idx[static_cast<std::size_t>(k)]).transpose();
    Eigen::FullPivLU<Matrix> lu(a);
    lu.setThreshold(1e-12);
    if (lu.rank() == d) {
      const long sign_count = 1L << (d - 1);
      for (long s = 0; s < sign_count; ++s) {
        rhs(0) = 1.0;
        for (Index k = 1; k < d; ++k) rhs(k) = ((s >> (k - 1)) & 1) ? -1.0 : 1.0;
        const Vector u = lu.solve(rhs);
        if (sup_abs_projection(z, u) <= 1.0 + 1e-10 * std::max(1.0, scale * u.norm()))
          max_norm_sq = std::max(max_norm_sq, u.squaredNorm());
      }
    }
    // Next combination in lexicographic order.
    Index k = d - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - d + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (Index j = k + 1; j < d; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  require(max_norm_sq > 0.0, ErrorCode::DegenerateSubspace, "polar polytope has no vertices");
  return 1.0 / std::sqrt(max_norm_sq);
}

inline double inradius_sampled(const Matrix& z, long samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double best = std::numeric_limits<double>::infinity();
  Vector u(z.rows());
  for (long s = 0; s < samples; ++s) {
    for (Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
    const double n = u.norm();
    if (n == 0.0) continue;
    best = std::min(best, sup_abs_projection(z, u / n));
  }
  return best;
}

}  // namespace detail

/// Inradius of the symmetrized hull of the columns of `y` relative to span(y).
inline InradiusResult inradius(const Matrix& y, InradiusMethod method, const InradiusOptions& opts = {}) {
  require(y.cols() > 0, ErrorCode::InvalidArgument, "inradius of an empty point set");
  const Matrix basis = range_basis(y, opts.rank_tol);
  require(basis.cols() > 0, ErrorCode::InvalidArgument, "points span the zero subspace");
  const Matrix z = basis.transpose() * y;  // coordinates inside span(y)
  InradiusResult out;
  out.method = method;
  out.intrinsic_dim = basis.cols();
  if (out.intrinsic_dim == 1) {
    // Symmetrized hull of collinear points is the segment [-max, max].
    out.value = z.cwiseAbs().maxCoeff();
    out.certified = true;
    return out;
  }
  switch (method) {
    case InradiusMethod::Exact2D:
      require(out.intrinsic_dim == 2, ErrorCode::DimensionTooHigh,
              "EXACT2D needs intrinsic dimension 2, got " + std::to_string(out.intrinsic_dim));
      out.value = detail::inradius_exact_2d(z);
      out.certified = true;
      break;
    case InradiusMethod::Polytope:
      out.value = detail::inradius_polytope(z, opts.vertex_cap);
      out.certified = true;
      break;
    case InradiusMethod::Sampled:
      out.value = detail::inradius_sampled(z, opts.samples_per_dim * out.intrinsic_dim, opts.seed);
      out.certified = false;
      break;
  }
  return out;
}

/// Picks the cheapest certified route: EXACT2D for d <= 2, POLYTOPE when the
/// enumeration fits under the cap, SAMPLED (uncertified) otherwise.
inline InradiusResult inradius_auto(const Matrix& y, const InradiusOptions& opts = {}) {
  const Index d = numerical_rank(y, opts.rank_tol);
  if (d <= 2) return inradius(y, InradiusMethod::Exact2D, opts);
  const double combos = detail::binomial(y.cols(), d) * std::ldexp(1.0, static_cast<int>(d - 1));
  if (combos <= static_cast<double>(opts.vertex_cap)) return inradius(y, InradiusMethod::Polytope, opts);
  return inradius(y, InradiusMethod::Sampled, opts);
}

}  // namespace ssc
