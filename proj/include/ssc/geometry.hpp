#pragma once

// Per-anchor geometric quantities: intra-subspace coherence zeta, anchor norm
// eta, inter-subspace coherence mu_lambda with its dual direction, leakage
// coherence gamma and the inradius of the anchor's companions.

#include "ssc/inradius.hpp"
#include "ssc/lasso.hpp"
#include "ssc/subspace_data.hpp"

#include <optional>
#include <sstream>

namespace ssc {

/// Which self-expression problem the quantities describe.
enum class Variant { Complete, ZeroFilled, ProjectedZeroFilled };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::Complete: return "complete";
    case Variant::ZeroFilled: return "zf";
    case Variant::ProjectedZeroFilled: return "pzf";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "complete") return Variant::Complete;
  if (s == "zf") return Variant::ZeroFilled;
  if (s == "pzf") return Variant::ProjectedZeroFilled;
  throw Error(ErrorCode::InvalidArgument, "unknown variant '" + s + "'");
}

inline ViewTag view_of(Variant v) {
  switch (v) {
    case Variant::Complete: return ViewTag::Complete;
    case Variant::ZeroFilled: return ViewTag::ZeroFilled;
    case Variant::ProjectedZeroFilled: return ViewTag::ProjectedZeroFilled;
  }
  return ViewTag::Complete;
}

/// Everything the per-anchor quantities need, independent of where the
/// corruption came from (masking or additive noise).
struct AnchorProblem {
  Matrix view;    // D x N data the self-expression sees
  Matrix leak;    // D x N clean-minus-observed parts, same frame as `view`
  Labels labels;
  Index anchor = 0;
  Matrix basis;   // orthonormal basis of the anchor's (possibly projected) subspace

  std::vector<Index> companions() const {
    std::vector<Index> out;
    for (Index j = 0; j < view.cols(); ++j)
      if (j != anchor && labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(anchor)])
        out.push_back(j);
    return out;
  }
  std::vector<Index> same_cluster() const {
    std::vector<Index> out;
    for (Index j = 0; j < view.cols(); ++j)
      if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(anchor)]) out.push_back(j);
    return out;
  }
  std::vector<Index> others() const {
    std::vector<Index> out;
    for (Index j = 0; j < view.cols(); ++j)
      if (labels[static_cast<std::size_t>(j)] != labels[static_cast<std::size_t>(anchor)]) out.push_back(j);
    return out;
  }
  Vector target() const { return view.col(anchor); }
  Matrix reduced_dictionary() const { return select_columns(view, companions()); }
};

/// Builds the anchor problem for one of the three self-expression variants.
/// The PZF basis is the anchor-projected subspace.
inline AnchorProblem make_anchor_problem(const MaskedDataset& data, const SubspaceArrangement& arr, Index anchor,
                                         Variant variant) {
  require(anchor >= 0 && anchor < data.size(), ErrorCode::InvalidArgument, "anchor out of range");
  const int cluster = data.label(anchor);
  require(cluster < arr.size(), ErrorCode::MissingBasis, "no basis for cluster " + std::to_string(cluster));
  AnchorProblem p;
  p.labels = data.labels();
  p.anchor = anchor;
  switch (variant) {
    case Variant::Complete:
      p.view = data.points();
      p.leak = Matrix::Zero(data.ambient_dim(), data.size());
      p.basis = arr.basis(cluster);
      break;
    case Variant::ZeroFilled:
      p.view = data.zero_filled();
      p.leak = data.unobserved();
      p.basis = arr.basis(cluster);
      break;
    case Variant::ProjectedZeroFilled: {
      const auto mask = data.pattern(anchor).asDiagonal();
      p.view = mask * data.zero_filled();
      p.leak = mask * data.unobserved();
      p.basis = project_basis(arr.basis(cluster), data.pattern(anchor));
      break;
    }
  }
  return p;
}

/// zeta = ||(W_{-1}^{(1)})^T w_1||_inf over same-cluster companions.
inline double compute_zeta(const AnchorProblem& p) {
  const auto comp = p.companions();
  require(!comp.empty(), ErrorCode::LonelyAnchor, "anchor has no same-cluster companions");
  const Vector t = p.target();
  double best = 0.0;
  for (Index j : comp) best = std::max(best, std::abs(p.view.col(j).dot(t)));
  return best;
}

inline double compute_zeta(const DataView& view, const Labels& labels) {
  AnchorProblem p{view.matrix, Matrix(), labels, view.anchor, Matrix()};
  return compute_zeta(p);
}

inline double compute_eta(const AnchorProblem& p) { return p.view.col(p.anchor).norm(); }

struct MuResult {
  double mu = 0.0;
  Index argmax = -1;          // column index of the maximizing other-cluster point
  Vector direction;           // unit vector in span(basis), or zero
  LassoSolution reduced;      // reduced primal solution
  DualSolution dual;          // v* = lambda e*
  double outside_norm = 0.0;  // ||v* - P v*||
};

/// Inter-subspace coherence at `lambda`: solve the reduced problem, project
/// v* onto the anchor's subspace, normalize, and take the max absolute inner
/// product with other-cluster columns of the view.
inline MuResult compute_mu(const AnchorProblem& p, double lambda, const LassoOptions& opts = {}) {
  require(p.basis.cols() > 0, ErrorCode::MissingBasis, "anchor subspace basis is empty");
  const Matrix dict = p.reduced_dictionary();
  require(dict.cols() > 0, ErrorCode::LonelyAnchor, "anchor has no same-cluster companions");
  const Vector y = p.target();
  MuResult r;
  r.reduced = solve_lasso(dict, y, lambda, opts);
  r.dual = recover_dual(r.reduced, dict, y);
  const Vector proj = p.basis * (p.basis.transpose() * r.dual.v);
  r.outside_norm = (r.dual.v - proj).norm();
  const double pn = proj.norm();
  r.direction = pn > 0.0 ? Vector(proj / pn) : Vector(Vector::Zero(proj.size()));
  const auto others = p.others();
  for (Index k : others) {
    const double ip = std::abs(p.view.col(k).dot(r.direction));
    if (r.argmax < 0 || ip > r.mu) {
      r.mu = ip;
      r.argmax = k;
    }
  }
  return r;
}

struct GammaResult {
  double gamma = 0.0;
  bool empty_max = false;  // no other-cluster points
};

/// gamma = max_{k other, j same cluster} |<w_k, P_{S^perp} leak_j>|.
inline GammaResult compute_gamma(const AnchorProblem& p) {
  require(p.basis.cols() > 0, ErrorCode::MissingBasis, "anchor subspace basis is empty");
  GammaResult g;
  const auto others = p.others();
  if (others.empty()) {
    g.empty_max = true;
    return g;
  }
  const Matrix leak = select_columns(p.leak, p.same_cluster());
  const Matrix leak_perp = leak - p.basis * (p.basis.transpose() * leak);
  const Matrix ip = select_columns(p.view, others).transpose() * leak_perp;
  g.gamma = ip.size() ? ip.cwiseAbs().maxCoeff() : 0.0;
  return g;
}

struct GeometryReport {
  ViewTag view_tag = ViewTag::Complete;
  Index anchor = 0;
  double lambda = 0.0;
  double zeta = 0.0;
  double eta = 0.0;
  double mu_lambda = 0.0;
  double gamma = 0.0;
  bool gamma_empty_max = false;
  std::optional<InradiusResult> inradius;
  Vector dual_direction;
  double dual_norm = 0.0;
  double dual_outside_norm = 0.0;
  long solver_iterations = 0;
  double solver_gap = 0.0;
};

struct GeometryOptions {
  LassoOptions lasso{};
  std::optional<InradiusMethod> inradius_method;  // unset: skip the inradius
  InradiusOptions inradius{};
};

/// Quantities for an already-built anchor problem. `companions_complete`
/// holds the uncorrupted same-cluster points used for the inradius.
inline GeometryReport analyze_anchor(const AnchorProblem& p, ViewTag tag, double lambda,
                                     const Matrix& companions_complete, const GeometryOptions& opts = {}) {
  GeometryReport g;
  g.view_tag = tag;
  g.anchor = p.anchor;
  g.lambda = lambda;
  g.eta = compute_eta(p);
  require(g.eta > 0.0, ErrorCode::DegeneratePoint, "anchor view column is zero");
  g.zeta = compute_zeta(p);
  const MuResult mu = compute_mu(p, lambda, opts.lasso);
  g.mu_lambda = mu.mu;
  g.dual_direction = mu.direction;
  g.dual_norm = mu.dual.v.norm();
  g.dual_outside_norm = mu.outside_norm;
  g.solver_iterations = mu.reduced.iterations;
  g.solver_gap = mu.reduced.gap;
  const GammaResult gamma = compute_gamma(p);
  g.gamma = gamma.gamma;
  g.gamma_empty_max = gamma.empty_max;
  if (opts.inradius_method) g.inradius = inradius(companions_complete, *opts.inradius_method, opts.inradius);
  return g;
}

inline GeometryReport geometry_report(const MaskedDataset& data, const SubspaceArrangement& arr, Index anchor,
                                      Variant variant, double lambda, const GeometryOptions& opts = {}) {
  const AnchorProblem p = make_anchor_problem(data, arr, anchor, variant);
  const Matrix comp = select_columns(data.points(), data.companions(anchor));
  return analyze_anchor(p, view_of(variant), lambda, comp, opts);
}

inline std::string geometry_csv_header() { return "view_tag,zeta,eta,mu_lambda,gamma,r,r_method,lambda"; }

inline std::string to_csv_row(const GeometryReport& g) {
  std::ostringstream os;
  os << to_string(g.view_tag) << ',' << format_double(g.zeta) << ',' << format_double(g.eta) << ','
     << format_double(g.mu_lambda) << ',' << format_double(g.gamma) << ',';
  if (g.inradius) {
    os << format_double(g.inradius->value) << ',' << to_string(g.inradius->method)
       << (g.inradius->certified ? "" : "_UPPER_BOUND");
  } else {
    os << "nan,NONE";
  }
  os << ',' << format_double(g.lambda);
  return os.str();
}

}  // namespace ssc
