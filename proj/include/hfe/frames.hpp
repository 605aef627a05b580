#pragma once

#include <optional>
#include <utility>

#include "hfe/core.hpp"
#include "hfe/groups.hpp"

namespace hfe {

/// A complex symplectic vector space C^{2n} with form omega(x, y) = x^t Omega y.
struct SymplecticModel {
  int n = 0;
  CMat omega;

  /// Omega = [[0, I], [-I, 0]], i.e. omega(a_i, b_j) = delta_ij.
  static SymplecticModel standard(int n);
  /// Validates antisymmetry and nondegeneracy.
  static SymplecticModel make(CMat omega,
                              const Tolerances& tol = Tolerances::defaults());

  cplx form(const CVec& x, const CVec& y) const;
};

/// A Lagrangian frame: the columns of [U; V] are the coordinates of n
/// independent, mutually omega-orthogonal vectors.
struct LagFrame {
  CMat U;
  CMat V;
  double isotropy_residual = 0.0;  // |X^t Omega X|, max-abs entry
  cplx independence;               // det(X^dagger X)
  CMat hermitian;                  // H_ij = -i omega(conj u_i, u_j)
  double min_eigenvalue = 0.0;     // of H
  bool positive = false;

  int n() const { return static_cast<int>(U.rows()); }
  CMat stacked() const;
};

LagFrame validate_lagrangian(const CMat& U, const CMat& V,
                             const SymplecticModel& model,
                             const Tolerances& tol = Tolerances::defaults());
LagFrame validate_lagrangian(const CMat& U, const CMat& V,
                             const Tolerances& tol = Tolerances::defaults());

/// Two Lagrangian frames whose first k columns coincide and are real.
struct LagFramePair {
  LagFrame first;
  LagFrame second;
  int k = 0;
};

LagFramePair make_frame_pair(LagFrame first, LagFrame second, int k,
                             const Tolerances& tol = Tolerances::defaults());

/// The pair acted on from the right: (u g1, v g2).
LagFramePair act_pair(const LagFramePair& pair, const CMat& g1, const CMat& g2,
                      const Tolerances& tol = Tolerances::defaults());

/// Ambient coordinates E [U; V] of a frame given relative to the symplectic
/// frame whose columns are the columns of E (e_1..e_n, f_1..f_n). E is
/// checked against the model: E^t Omega E = J.
CMat frame_compose(const CMat& E, const CMat& U, const CMat& V,
                   const SymplecticModel& model,
                   const Tolerances& tol = Tolerances::defaults());

/// det(-i omega(conj u_i, v_j)) over i, j > k. Throws DomainError when the
/// value is below tol.singular in modulus.
cplx delta(const LagFramePair& pair, const SymplecticModel& model,
           const Tolerances& tol = Tolerances::defaults());
cplx delta(const LagFramePair& pair,
           const Tolerances& tol = Tolerances::defaults());

/// Symmetric complex matrix of operator norm at most one.
class BallPoint {
 public:
  explicit BallPoint(CMat W, const Tolerances& tol = Tolerances::defaults());
  static BallPoint zero(int n) { return BallPoint(CMat::Zero(n, n)); }

  const CMat& matrix() const { return w_; }
  int n() const { return static_cast<int>(w_.rows()); }
  double norm() const { return operator_norm(w_); }

 private:
  CMat w_;
};

struct BallChart {
  BallPoint W;
  GlElement C;
};

/// (U, V) -> ((U + iV)(U - iV)^{-1}, U - iV). Throws DomainError when
/// U - iV is singular, which happens exactly for non-positive frames.
BallChart phi(const LagFrame& frame,
              const Tolerances& tol = Tolerances::defaults());
/// (W, C) -> (1/2 (1 + W) C, i/2 (1 - W) C).
LagFrame phi_inv(const BallPoint& W, const GlElement& C,
                 const Tolerances& tol = Tolerances::defaults());
std::pair<CMat, CMat> phi_inv_raw(const CMat& W, const CMat& C);

/// (U, V) -> (T1 U + T2 V, T3 U + T4 V).
std::pair<CMat, CMat> sp_act(const SpElement& g, const CMat& U, const CMat& V);

/// g.(W, C) = (g.W, alpha(g, W) C), evaluated as Phi(g . Phi^{-1}(W, I)).
BallChart alpha(const SpElement& g, const BallPoint& W,
                const Tolerances& tol = Tolerances::defaults());

/// 2^{-n/2}, the value of gamma at (0, 0).
double gamma_anchor(int n);

/// The continuous square root of det(1/2 (1 - W2^dagger W1)) on Ball x Ball,
/// tracked along t -> det(1/2 (1 - t^2 W2^dagger W1)) from gamma_anchor(n).
/// Vanishes only when both points sit on the boundary.
cplx gamma(const BallPoint& W1, const BallPoint& W2,
           const Tolerances& tol = Tolerances::defaults());

/// Lifted Ball factor: (alpha(g, W), z) with z continued from the anchor of
/// gt along s -> det alpha(g, sW).
MlElement alpha_tilde(const MpElement& gt, const BallPoint& W,
                      const Tolerances& tol = Tolerances::defaults());

/// A point of Ball x Ml(n, C), the double cover of positive frames.
struct MetaLagFrame {
  BallPoint W;
  MlElement C;
};

MetaLagFrame meta_act(const MpElement& gt, const MetaLagFrame& X,
                      const Tolerances& tol = Tolerances::defaults());
MetaLagFrame meta_right(const MetaLagFrame& X, const MlElement& h,
                        const Tolerances& tol = Tolerances::defaults());
LagFrame meta_project(const MetaLagFrame& X,
                      const Tolerances& tol = Tolerances::defaults());

/// Block data of a frame U = [[A, B], [0, U_r]], V = [[0, 0], [0, V_r]].
struct FrameBlocks {
  RMat A;
  CMat B;
  CMat Ur;
  CMat Vr;
};

/// Extracts the blocks; throws DomainError listing the first offending
/// entry when the pattern fails beyond tol.abs or A is not invertible.
FrameBlocks frame_blocks(const CMat& U, const CMat& V, int k,
                         const Tolerances& tol = Tolerances::defaults());

/// Block data of a meta-frame W = diag(1, W_r), C = [[A, B], [0, C_r]].
struct MetaBlocks {
  RMat A;
  CMat B;
  CMat Wr;
  CMat Cr;
  cplx z;
};

MetaBlocks meta_blocks(const MetaLagFrame& X, int k,
                       const Tolerances& tol = Tolerances::defaults());

/// det(i (V1r^dagger U2r - U1r^dagger V2r)) for two block-form frames
/// sharing A.
cplx delta_L(const LagFrame& X1, const LagFrame& X2, int k,
             const Tolerances& tol = Tolerances::defaults());
/// Same value from Ball coordinates:
/// conj(det C1) det C2 det(A)^{-2} det(1/2 (1 - W1r^dagger W2r)).
cplx delta_L_explicit(const MetaLagFrame& X1, const MetaLagFrame& X2, int k,
                      const Tolerances& tol = Tolerances::defaults());
/// conj(z1) z2 |det A|^{-1} gamma(W2r, W1r); its square is delta_L of the
/// projected frames.
cplx delta_L_tilde(const MetaLagFrame& X1, const MetaLagFrame& X2, int k,
                   const Tolerances& tol = Tolerances::defaults());

/// Pfaffian by recursive expansion along the first row.
cplx pfaffian(const CMat& a);

/// (-1)^{n(n-1)/2} Pf(omega(X_i, X_j)) for the 2n columns of X.
cplx liouville(const CMat& X, const SymplecticModel& model);

enum class DensityMode { HalfDensity, HalfForm };

/// Pointwise value of the pairing 1-density. The frames of `pair` are in
/// ambient coordinates of `model`; `lifts` holds 2n - k further vectors
/// completing u_1..u_k.
struct DensityInput {
  cplx prequantum{1.0, 0.0};
  cplx nu1{1.0, 0.0};
  cplx nu2{1.0, 0.0};
  LagFramePair pair;
  CMat lifts;
  DensityMode mode = DensityMode::HalfDensity;
  std::optional<cplx> delta_tilde;
};

cplx pairing_density(const DensityInput& in, const SymplecticModel& model,
                     const Tolerances& tol = Tolerances::defaults());

}  // namespace hfe
