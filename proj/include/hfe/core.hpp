#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hfe {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

inline constexpr cplx I_unit{0.0, 1.0};

/// Numerical thresholds shared by every module.
///
/// `rel` bounds relative residuals of algebraic identities, `abs` bounds
/// entries that must vanish exactly (block zero patterns, imaginary parts),
/// `singular` separates invertible from singular determinants, and `track`
/// is the smallest admissible step (relative to the path length) when a
/// square root is continued along a path.
struct Tolerances {
  double rel = 1e-9;
  double abs = 1e-10;
  double singular = 1e-12;
  double track = 1e-6;

  /// Library defaults, with `rel` overridden by the HFE_TOL_REL environment
  /// variable when it parses as a positive number.
  static const Tolerances& defaults();
};

/// Input data violates a documented precondition.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A square-root continuation could not follow the path without risking a
/// branch jump.
class TrackingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The principal square root with argument in (-pi/2, pi/2].
cplx principal_sqrt(cplx w);

/// Of the two square roots of `w`, the one closest to `previous`.
cplx nearest_sqrt(cplx w, cplx previous);

double operator_norm(const CMat& m);

/// Determinant of a possibly empty square matrix (empty -> 1).
cplx det(const CMat& m);

}  // namespace hfe
