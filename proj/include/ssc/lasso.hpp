#pragma once

// Lasso self-expression solver:
//
//   min_c ||c||_1 + (lambda/2) ||y - Y c||_2^2
//
// solved by cyclic proximal coordinate descent on the Gram matrix, followed by
// an active-set polish that solves the KKT system on the detected support.
// Convergence is certified by the duality gap against the dual
//
//   max_v <y, v> - ||v||^2 / (2 lambda)   s.t.  ||Y^T v||_inf <= 1,
//
// whose unique maximizer is v* = lambda e*.

#include "ssc/core.hpp"

#include <cmath>
#include <limits>

namespace ssc {

struct LassoOptions {
  double gap_tol = 1e-10;  // relative to max(objective, 1)
  long max_sweeps = 100000;
  long stall_sweeps = 2000;  // restart once if the gap has not improved for this long
  bool polish = true;
};

struct LassoSolution {
  Vector coeffs;
  Vector residual;  // y - Y c, recomputed from the returned coeffs
  double objective = 0.0;
  double lambda = 0.0;
  double gap = 0.0;
  long iterations = 0;
  bool converged = false;

  bool is_zero() const { return coeffs.size() == 0 || coeffs.cwiseAbs().maxCoeff() == 0.0; }
};

struct DualSolution {
  Vector v;
  double feasibility = 0.0;  // ||Y^T v||_inf
  double dual_objective = 0.0;
  double gap = 0.0;  // primal - dual
};

inline double lasso_objective(const Vector& c, const Vector& e, double lambda) {
  return c.lpNorm<1>() + 0.5 * lambda * e.squaredNorm();
}

inline double lasso_dual_objective(const Vector& y, const Vector& v, double lambda) {
  return y.dot(v) - v.squaredNorm() / (2.0 * lambda);
}

namespace detail {

struct GapEval {
  double primal;
  double dual;
  double gap;
};

// Dual point lambda*e scaled back into the feasible set.
inline GapEval evaluate_gap(const Matrix& dict, const Vector& y, const Vector& c, double lambda, Vector* residual) {
  Vector e = y - dict * c;
  const double corr = dict.cols() ? (dict.transpose() * e).cwiseAbs().maxCoeff() : 0.0;
  const double scale = std::max(1.0, lambda * corr);
  const Vector v = (lambda / scale) * e;
  GapEval g{lasso_objective(c, e, lambda), lasso_dual_objective(y, v, lambda), 0.0};
  g.gap = g.primal - g.dual;
  if (residual) *residual = std::move(e);
  return g;
}

inline double soft_threshold(double z, double t) {
  // |z| == t resolves to zero.
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Solves the KKT system on the support of c. Returns false when the support
// is rank deficient or the candidate violates sign / dual feasibility.
inline bool polish_support(const Matrix& gram, const Vector& corr, double lambda, Vector& c) {
  std::vector<Index> support;
  for (Index k = 0; k < c.size(); ++k)
    if (c(k) != 0.0) support.push_back(k);
  if (support.empty()) return false;
  const Index s = static_cast<Index>(support.size());
  Matrix g(s, s);
  Vector rhs(s);
  for (Index a = 0; a < s; ++a) {
    for (Index b = 0; b < s; ++b) g(a, b) = gram(support[a], support[b]);
    const double sign = c(support[a]) > 0 ? 1.0 : -1.0;
    rhs(a) = corr(support[a]) - sign / lambda;
  }
  Eigen::LDLT<Matrix> ldlt(g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
  const Vector diag = ldlt.vectorD();
  if (diag.minCoeff() <= 1e-12 * std::max(1.0, diag.maxCoeff())) return false;
  const Vector sol = ldlt.solve(rhs);
  Vector candidate = Vector::Zero(c.size());
  for (Index a = 0; a < s; ++a) {
    const double sign = c(support[a]) > 0 ? 1.0 : -1.0;
    if (sol(a) * sign <= 0.0) return false;
    candidate(support[a]) = sol(a);
  }
  const Vector q = corr - gram * candidate;
  if (lambda * q.cwiseAbs().maxCoeff() > 1.0 + 1e-9) return false;
  c = std::move(candidate);
  return true;
}

}  // namespace detail

/// Lasso with a caller-supplied Gram matrix G = Y^T Y and correlation Y^T y,
/// so repeated solves over one data matrix can share them.
inline LassoSolution solve_lasso_gram(const Matrix& dict, const Vector& y, const Matrix& gram, const Vector& corr,
                                      double lambda, const LassoOptions& opts = {}) {
  require(lambda > 0.0, ErrorCode::InvalidArgument, "lambda must be positive");
  require(opts.gap_tol > 0.0, ErrorCode::InvalidArgument, "gap tolerance must be positive");
  require(dict.rows() == y.size(), ErrorCode::InvalidArgument, "dictionary rows differ from target length");
  const Index n = dict.cols();
  LassoSolution sol;
  sol.lambda = lambda;
  sol.coeffs = Vector::Zero(n);

  auto finish = [&](const Vector& c, long iters) {
    sol.coeffs = c;
    const auto g = detail::evaluate_gap(dict, y, c, lambda, &sol.residual);
    sol.objective = g.primal;
    sol.gap = g.gap;
    sol.iterations = iters;
    sol.converged = g.gap <= opts.gap_tol * std::max(1.0, g.primal);
    return sol;
  };

  // Zero-solution law: c = 0 is optimal iff lambda ||Y^T y||_inf <= 1.
  if (n == 0 || lambda * corr.cwiseAbs().maxCoeff() <= 1.0) return finish(sol.coeffs, 0);

  Vector c = Vector::Zero(n);
  Vector q = corr;  // Y^T e, maintained incrementally
  Vector best = c;
  double best_gap = std::numeric_limits<double>::infinity();
  long since_improve = 0;
  bool restarted = false;
  std::vector<Index> prev_support;
  long sweep = 0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    for (Index k = 0; k < n; ++k) {
      const double gkk = gram(k, k);
      if (gkk <= 0.0) continue;
      const double updated = detail::soft_threshold(c(k) + q(k) / gkk, 1.0 / (lambda * gkk));
      const double delta = updated - c(k);
      if (delta != 0.0) {
        q.noalias() -= gram.col(k) * delta;
        c(k) = updated;
      }
    }
    // Check every sweep early on, then every 5 sweeps.
    if (sweep < 20 || sweep % 5 == 0) {
      q = corr - gram * c;
      std::vector<Index> support;
      for (Index k = 0; k < n; ++k)
        if (c(k) != 0.0) support.push_back(k);
      if (opts.polish && support == prev_support) {
        Vector candidate = c;
        if (detail::polish_support(gram, corr, lambda, candidate)) {
          const auto gp = detail::evaluate_gap(dict, y, candidate, lambda, nullptr);
          if (gp.gap <= opts.gap_tol * std::max(1.0, gp.primal)) return finish(candidate, sweep + 1);
        }
      }
      prev_support = std::move(support);
      const auto g = detail::evaluate_gap(dict, y, c, lambda, nullptr);
      if (g.gap < best_gap) {
        best_gap = g.gap;
        best = c;
        since_improve = 0;
      } else {
        since_improve += sweep < 20 ? 1 : 5;
      }
      if (g.gap <= opts.gap_tol * 1e-3 * std::max(1.0, g.primal)) return finish(c, sweep + 1);
      if (since_improve >= opts.stall_sweeps) {
        if (restarted) break;
        restarted = true;
        since_improve = 0;
        c.setZero();
        q = corr;
      }
    }
  }
  LassoSolution out = finish(best, sweep);
  return out;
}

/// Solves the Lasso over an arbitrary dictionary (full or reduced).
inline LassoSolution solve_lasso(const Matrix& dict, const Vector& y, double lambda, const LassoOptions& opts = {}) {
  require(dict.cols() > 0, ErrorCode::InvalidArgument, "dictionary must be nonempty");
  const Matrix gram = dict.transpose() * dict;
  const Vector corr = dict.transpose() * y;
  return solve_lasso_gram(dict, y, gram, corr, lambda, opts);
}

/// Dual solution through the KKT relation v = lambda * e.
inline DualSolution recover_dual(const LassoSolution& primal, const Matrix& dict, const Vector& y) {
  DualSolution dual;
  dual.v = primal.lambda * primal.residual;
  dual.feasibility = dict.cols() ? (dict.transpose() * dual.v).cwiseAbs().maxCoeff() : 0.0;
  dual.dual_objective = lasso_dual_objective(y, dual.v, primal.lambda);
  dual.gap = primal.objective - dual.dual_objective;
  require(dual.feasibility <= 1.0 + 1e-6, ErrorCode::InfeasibleDual,
          "||Y^T v||_inf = " + std::to_string(dual.feasibility) + " exceeds 1");
  return dual;
}

struct Lemma1Report {
  double norm = 0.0;
  double lower = 0.0;  // eta / zeta
  double upper = 0.0;  // eta (2 lambda - 1/zeta)
  double lower_slack = 0.0;  // norm - lower
  double upper_slack = 0.0;  // upper - norm
  bool holds = false;
};

/// Dual-norm bounds eta/zeta <= ||v*|| <= eta (2 lambda - 1/zeta), valid for
/// lambda > 1/zeta. Slack 1e-8 on both sides.
inline Lemma1Report check_lemma1_bounds(const DualSolution& dual, double zeta, double eta, double lambda) {
  require(zeta > 0.0 && lambda > 1.0 / zeta, ErrorCode::NotApplicable, "needs lambda > 1/zeta");
  Lemma1Report r;
  r.norm = dual.v.norm();
  r.lower = eta / zeta;
  r.upper = eta * (2.0 * lambda - 1.0 / zeta);
  r.lower_slack = r.norm - r.lower;
  r.upper_slack = r.upper - r.norm;
  r.holds = r.lower_slack >= -1e-8 && r.upper_slack >= -1e-8;
  return r;
}

}  // namespace ssc
