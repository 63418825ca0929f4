#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Labels = std::vector<int>;

enum class ErrorCode {
  PatternLengthMismatch,
  UnequalMaskCount,
  FullMask,
  DegenerateSubspace,
  DegeneratePoint,
  InvalidDensity,
  InvalidArgument,
  NonConvergence,
  InfeasibleDual,
  NotApplicable,
  LonelyAnchor,
  MissingBasis,
  DimensionTooHigh,
  VertexBlowup,
  Io,
  Parse,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PatternLengthMismatch: return "PatternLengthMismatch";
    case ErrorCode::UnequalMaskCount: return "UnequalMaskCount";
    case ErrorCode::FullMask: return "FullMask";
    case ErrorCode::DegenerateSubspace: return "DegenerateSubspace";
    case ErrorCode::DegeneratePoint: return "DegeneratePoint";
    case ErrorCode::InvalidDensity: return "InvalidDensity";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InfeasibleDual: return "InfeasibleDual";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::LonelyAnchor: return "LonelyAnchor";
    case ErrorCode::MissingBasis: return "MissingBasis";
    case ErrorCode::DimensionTooHigh: return "DimensionTooHigh";
    case ErrorCode::VertexBlowup: return "VertexBlowup";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

/// Orthonormal basis of the column range of `a`, with rank decided by singular
/// values above `rel_tol` times the largest one.
inline Matrix range_basis(const Matrix& a, double rel_tol = 1e-10) {
  if (a.cols() == 0 || a.rows() == 0) return Matrix(a.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return Matrix(a.rows(), 0);
  Index rank = 0;
  while (rank < s.size() && s(rank) > rel_tol * s(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Numerical rank with the same relative threshold as range_basis.
inline Index numerical_rank(const Matrix& a, double rel_tol = 1e-10) {
  return range_basis(a, rel_tol).cols();
}

/// Index of max |v_i|; ties go to the lowest index. Returns -1 for empty input.
inline Index argmax_abs(const Eigen::Ref<const Vector>& v) {
  Index best = -1;
  double best_val = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_val) {
      best_val = a;
      best = i;
    }
  }
  return best;
}

inline Matrix select_columns(const Matrix& a, const std::vector<Index>& cols) {
  Matrix out(a.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = a.col(cols[k]);
  return out;
}

}  // namespace ssc
