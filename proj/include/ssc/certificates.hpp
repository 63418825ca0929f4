#pragma once

// Sufficient conditions for nonzero, subspace-preserving Lasso solutions:
// hypotheses, admissible lambda intervals and verdicts, plus the missing-ratio
// comparison functions and rates for the random model.

#include "ssc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

namespace ssc {

enum class Theorem { T1, T3, T4, T5, T6, T7, T8 };

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::T1: return "T1";
    case Theorem::T3: return "T3";
    case Theorem::T4: return "T4";
    case Theorem::T5: return "T5";
    case Theorem::T6: return "T6";
    case Theorem::T7: return "T7";
    case Theorem::T8: return "T8";
  }
  return "?";
}

inline Theorem parse_theorem(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (Theorem t : {Theorem::T1, Theorem::T3, Theorem::T4, Theorem::T5, Theorem::T6, Theorem::T7, Theorem::T8})
    if (s == to_string(t)) return t;
  throw Error(ErrorCode::InvalidArgument, "unknown theorem '" + s + "'");
}

enum class Verdict { Certified, NotCertified, UncertifiableR };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "CERTIFIED";
    case Verdict::NotCertified: return "NOT_CERTIFIED";
    case Verdict::UncertifiableR: return "UNCERTIFIABLE_R";
  }
  return "?";
}

/// Open interval (lower, upper); empty when upper <= lower.
struct LambdaInterval {
  double lower = 0.0;
  double upper = 0.0;

  bool empty() const { return !(upper > lower); }
  bool contains(double x) const { return x > lower && x < upper; }
};

struct CertificateReport {
  Theorem theorem = Theorem::T1;
  std::map<std::string, double> inputs;
  bool gap_condition = false;
  double margin = 0.0;  // LHS - RHS of the strict inequality, positive when it holds
  std::optional<LambdaInterval> lambda_interval;  // unset for existence-only statements
  std::optional<double> lambda;
  std::optional<bool> lambda_member;
  Verdict verdict = Verdict::NotCertified;
  std::vector<std::string> flags;

  bool certified() const { return verdict == Verdict::Certified; }
  bool has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }
};

namespace detail {

inline void finalize_interval_verdict(CertificateReport& r, double lambda) {
  r.lambda = lambda;
  r.lambda_member = r.lambda_interval && r.lambda_interval->contains(lambda);
  r.verdict = (r.gap_condition && *r.lambda_member) ? Verdict::Certified : Verdict::NotCertified;
}

inline double inverse(double x) { return x > 0.0 ? 1.0 / x : std::numeric_limits<double>::infinity(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Complete data.

/// mu_lambda < r and 1/zeta < lambda. An uncertified (sampled) inradius is an
/// upper bound on r and cannot certify anything.
inline CertificateReport certify_t1(double mu_lambda, double r, double zeta, double lambda, bool r_certified = true) {
  CertificateReport rep;
  rep.theorem = Theorem::T1;
  rep.inputs = {{"mu_lambda", mu_lambda}, {"r", r}, {"zeta", zeta}, {"lambda", lambda}};
  rep.margin = r - mu_lambda;
  rep.gap_condition = mu_lambda < r;
  rep.lambda_interval = LambdaInterval{detail::inverse(zeta), std::numeric_limits<double>::infinity()};
  detail::finalize_interval_verdict(rep, lambda);
  if (!r_certified) {
    rep.flags.push_back("SAMPLED_R");
    rep.verdict = Verdict::UncertifiableR;
  }
  return rep;
}

/// Upper end of the complete-data interval: (1/zeta + 1/mu) / 2, +inf at mu = 0.
inline double lambda_max_complete(double zeta, double mu_lambda) {
  if (mu_lambda <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * (detail::inverse(zeta) + 1.0 / mu_lambda);
}

/// mu_lambda < zeta, lambda in (1/zeta, (1/zeta + 1/mu_lambda)/2).
inline CertificateReport certify_t8(double mu_lambda, double zeta, double lambda) {
  CertificateReport rep;
  rep.theorem = Theorem::T8;
  rep.inputs = {{"mu_lambda", mu_lambda}, {"zeta", zeta}, {"lambda", lambda}};
  rep.margin = zeta - mu_lambda;
  rep.gap_condition = mu_lambda < zeta;
  rep.lambda_interval = LambdaInterval{detail::inverse(zeta), lambda_max_complete(zeta, mu_lambda)};
  detail::finalize_interval_verdict(rep, lambda);
  return rep;
}

// ---------------------------------------------------------------------------
// Incomplete data. The upper ends below are the positive roots of
//   PZF: l^2 + (A - 1/(2z)) l - (1/(2 e^2 g) + 1/(2 z^2) + A/(2z))
//   ZF : l^2 + (A + 1/(2 e^2) - 1/(2z)) l - (same constant)
// with A = mu / (g e). Both divide by gamma; at gamma = 0 the linear limit
// (1/zeta + 1/(eta mu)) / 2 is returned and flagged.

struct LambdaMax {
  double value = 0.0;
  bool degenerate_gamma = false;
};

inline LambdaMax lambda_max_pzf(double zeta, double eta, double mu, double gamma) {
  if (gamma <= 0.0) {
    const double v = mu > 0.0 ? 0.5 * (detail::inverse(zeta) + 1.0 / (eta * mu)) : std::numeric_limits<double>::infinity();
    return {v, true};
  }
  const double a = mu / (gamma * eta);
  const double root = std::sqrt(9.0 / (4.0 * zeta * zeta) + mu / (gamma * eta * zeta) + 2.0 / (gamma * eta * eta) +
                                (mu * mu) / (gamma * gamma * eta * eta));
  return {0.5 * (1.0 / (2.0 * zeta) - a + root), false};
}

inline LambdaMax lambda_max_zf(double zeta, double eta, double mu, double gamma) {
  if (gamma <= 0.0) {
    const double v = mu > 0.0 ? 0.5 * (detail::inverse(zeta) + 1.0 / (eta * mu)) : std::numeric_limits<double>::infinity();
    return {v, true};
  }
  const double a = mu / (gamma * eta);
  const double e2 = eta * eta;
  const double root = std::sqrt(9.0 / (4.0 * zeta * zeta) + mu / (gamma * eta * zeta) + 2.0 / (gamma * e2) +
                                (mu * mu) / (gamma * gamma * e2) + 1.0 / (4.0 * e2 * e2) +
                                (1.0 / e2) * (a - 1.0 / (2.0 * zeta)));
  return {0.5 * (1.0 / (2.0 * zeta) - a - 1.0 / (2.0 * e2) + root), false};
}

namespace detail {

inline CertificateReport certify_incomplete(Theorem thm, double zeta, double eta, double mu, double gamma,
                                            double lambda) {
  CertificateReport rep;
  rep.theorem = thm;
  rep.inputs = {{"zeta", zeta}, {"eta", eta}, {"mu_lambda", mu}, {"gamma", gamma}, {"lambda", lambda}};
  const bool pzf = thm == Theorem::T3;
  rep.margin = pzf ? zeta - mu * eta : zeta - mu * eta - gamma;
  rep.gap_condition = rep.margin > 0.0;
  const LambdaMax lm = pzf ? lambda_max_pzf(zeta, eta, mu, gamma) : lambda_max_zf(zeta, eta, mu, gamma);
  if (lm.degenerate_gamma) rep.flags.push_back("DEGENERATE_GAMMA");
  rep.inputs["lambda_max"] = lm.value;
  rep.lambda_interval = LambdaInterval{inverse(zeta), lm.value};
  finalize_interval_verdict(rep, lambda);
  return rep;
}

}  // namespace detail

/// PZF: mu eta < zeta and lambda in (1/zeta, lambda_max_pzf).
inline CertificateReport certify_t3_pzf(double zeta, double eta, double mu, double gamma, double lambda) {
  return detail::certify_incomplete(Theorem::T3, zeta, eta, mu, gamma, lambda);
}

inline CertificateReport certify_t3_pzf(const GeometryReport& g, double lambda) {
  return certify_t3_pzf(g.zeta, g.eta, g.mu_lambda, g.gamma, lambda);
}

/// ZF: mu eta + gamma < zeta and lambda in (1/zeta, lambda_max_zf).
inline CertificateReport certify_t5_zf(double zeta, double eta, double mu, double gamma, double lambda) {
  return detail::certify_incomplete(Theorem::T5, zeta, eta, mu, gamma, lambda);
}

inline CertificateReport certify_t5_zf(const GeometryReport& g, double lambda) {
  return certify_t5_zf(g.zeta, g.eta, g.mu_lambda, g.gamma, lambda);
}

// ---------------------------------------------------------------------------
// Random model: margins as functions of the missing ratio omega.

inline double f_pzf(double omega, double alpha, double beta, double eps) {
  const double s = std::sqrt(eps + beta / 3.0);
  return alpha - std::sqrt(2.0 * omega) - beta * std::sqrt(1.0 - omega) - (1.0 + beta) * s;
}

inline double f_zf(double omega, double alpha, double beta, double eps) {
  const double s = std::sqrt(eps + beta / 3.0);
  return -s * (std::sqrt(omega) + std::sqrt(1.0 - omega) + s) - std::sqrt(omega * (1.0 - omega)) +
         f_pzf(omega, alpha, beta, eps);
}

namespace detail {

inline CertificateReport certify_probabilistic(Theorem thm, double omega, double alpha, double beta, double eps) {
  CertificateReport rep;
  rep.theorem = thm;
  rep.inputs = {{"omega", omega}, {"alpha", alpha}, {"beta", beta}, {"epsilon", eps}};
  rep.margin = thm == Theorem::T4 ? f_pzf(omega, alpha, beta, eps) : f_zf(omega, alpha, beta, eps);
  rep.gap_condition = rep.margin > 0.0;
  rep.verdict = rep.gap_condition ? Verdict::Certified : Verdict::NotCertified;
  rep.flags.push_back("EXISTENCE_ONLY");
  return rep;
}

}  // namespace detail

/// PZF random-model condition f_pzf(omega) > 0.
inline CertificateReport certify_t4(double omega, double alpha, double beta, double eps) {
  return detail::certify_probabilistic(Theorem::T4, omega, alpha, beta, eps);
}

/// ZF random-model condition f_zf(omega) > 0.
inline CertificateReport certify_t6(double omega, double alpha, double beta, double eps) {
  return detail::certify_probabilistic(Theorem::T6, omega, alpha, beta, eps);
}

struct RateBounds {
  double pzf_max_ratio = 0.0;
  double zf_max_ratio = 0.0;
  double ratio() const { return pzf_max_ratio / zf_max_ratio; }
};

/// Largest tolerable m/D under the simplified (beta, eps -> 0) conditions.
inline RateBounds rate_bounds(double rho, int d) {
  require(rho > 1.0 && d > 0, ErrorCode::InvalidArgument, "need rho > 1 and d > 0");
  const double base = std::log(rho) / (16.0 * d);
  const double s = 1.0 + std::numbers::sqrt2;
  return {0.5 * base, base / (s * s)};
}

// ---------------------------------------------------------------------------
// Bounded noise.

struct NoiseBounds {
  double exact = 0.0;       // r + mu/3 - sqrt((r + mu/3)^2 - (r^2 - mu^2)/3)
  double simplified = 0.0;  // (r - mu) / 6
  double prior = 0.0;       // r (r - mu) / (2 + 7 r)
};

inline NoiseBounds noise_bounds(double r, double mu_prime) {
  NoiseBounds b;
  const double a = r + mu_prime / 3.0;
  b.exact = a - std::sqrt(a * a - (r * r - mu_prime * mu_prime) / 3.0);
  b.simplified = (r - mu_prime) / 6.0;
  b.prior = r * (r - mu_prime) / (2.0 + 7.0 * r);
  return b;
}

/// r > mu' and delta below the exact noise bound. Only existence of a lambda
/// interval is asserted, so no membership is evaluated.
inline CertificateReport certify_t7_noise(double r, double mu_prime, double delta, bool r_certified = true) {
  CertificateReport rep;
  rep.theorem = Theorem::T7;
  const NoiseBounds b = noise_bounds(r, mu_prime);
  rep.inputs = {{"r", r},
                {"mu_prime", mu_prime},
                {"delta", delta},
                {"bound_exact", b.exact},
                {"bound_simplified", b.simplified},
                {"bound_prior", b.prior},
                {"improvement_ratio", b.prior > 0.0 ? b.exact / b.prior : std::nan("")}};
  rep.margin = b.exact - delta;
  rep.gap_condition = r > mu_prime && delta < b.exact;
  rep.verdict = rep.gap_condition ? Verdict::Certified : Verdict::NotCertified;
  rep.flags.push_back("EXISTENCE_ONLY");
  if (!r_certified) {
    rep.flags.push_back("SAMPLED_R");
    rep.verdict = Verdict::UncertifiableR;
  }
  return rep;
}

// ---------------------------------------------------------------------------

/// Certificate for a variant from its geometry report: T8 for complete data,
/// T5 for zero-filled, T3 for projected-zero-filled.
inline CertificateReport certify_variant(Variant v, const GeometryReport& g, double lambda) {
  switch (v) {
    case Variant::Complete: return certify_t8(g.mu_lambda, g.zeta, lambda);
    case Variant::ZeroFilled: return certify_t5_zf(g, lambda);
    case Variant::ProjectedZeroFilled: return certify_t3_pzf(g, lambda);
  }
  return {};
}

inline std::vector<double> log_grid(double lo, double hi, int steps) {
  require(lo > 0.0 && hi >= lo && steps >= 1, ErrorCode::InvalidArgument, "bad lambda grid");
  std::vector<double> out;
  for (int k = 0; k < steps; ++k)
    out.push_back(steps == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (steps - 1)));
  return out;
}

/// Default fixed-point grid: `steps` log-spaced values in [0.5/zeta, 20/zeta].
inline std::vector<double> default_lambda_grid(double zeta, int steps = 40) {
  return log_grid(0.5 / zeta, 20.0 / zeta, steps);
}

}  // namespace ssc
