#include "hfe/frames.hpp"

#include <cmath>
#include <string>

#include "hfe/tracking.hpp"

namespace hfe {

namespace {

double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::string at(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

CMat stack(const CMat& U, const CMat& V) {
  CMat X(U.rows() + V.rows(), U.cols());
  X << U, V;
  return X;
}

}  // namespace

// Symplectic model -------------------------------------------------------------

SymplecticModel SymplecticModel::standard(int n) {
  return {n, standard_J(n).cast<cplx>()};
}

SymplecticModel SymplecticModel::make(CMat omega, const Tolerances& tol) {
  if (omega.rows() != omega.cols() || omega.rows() % 2 != 0) {
    throw DomainError("SymplecticModel: omega must be square of even size");
  }
  if (max_abs(omega + omega.transpose()) > tol.abs) {
    throw DomainError("SymplecticModel: omega is not antisymmetric");
  }
  if (std::abs(det(omega)) <= tol.singular) {
    throw DomainError("SymplecticModel: omega is degenerate");
  }
  const int n = static_cast<int>(omega.rows() / 2);
  return {n, std::move(omega)};
}

cplx SymplecticModel::form(const CVec& x, const CVec& y) const {
  return (x.transpose() * omega * y)(0, 0);
}

// Lagrangian frames ------------------------------------------------------------

CMat LagFrame::stacked() const { return stack(U, V); }

LagFrame validate_lagrangian(const CMat& U, const CMat& V, const SymplecticModel& model,
                             const Tolerances& tol) {
  if (U.rows() != U.cols() || V.rows() != U.rows() || V.cols() != U.cols()) {
    throw DomainError("validate_lagrangian: U and V must be square of equal size");
  }
  if (model.n != U.rows()) throw DomainError("validate_lagrangian: model dimension mismatch");
  LagFrame f;
  f.U = U;
  f.V = V;
  const CMat X = stack(U, V);
  f.independence = det(X.adjoint() * X);
  if (std::abs(f.independence) <= tol.singular) {
    throw DomainError("validate_lagrangian: frame vectors are dependent");
  }
  f.isotropy_residual = max_abs(X.transpose() * model.omega * X);
  const double scale = std::max(1.0, max_abs(X) * max_abs(X));
  if (f.isotropy_residual > tol.rel * scale) {
    throw DomainError("validate_lagrangian: span is not isotropic (residual " +
                      std::to_string(f.isotropy_residual) + ")");
  }
  const CMat H = -I_unit * (X.adjoint() * model.omega * X);
  f.hermitian = (H + H.adjoint()) / 2.0;
  if (f.n() == 0) {
    f.min_eigenvalue = 0.0;
  } else {
    Eigen::SelfAdjointEigenSolver<CMat> es(f.hermitian, Eigen::EigenvaluesOnly);
    f.min_eigenvalue = es.eigenvalues().minCoeff();
  }
  f.positive = f.min_eigenvalue >= -tol.abs;
  return f;
}

LagFrame validate_lagrangian(const CMat& U, const CMat& V, const Tolerances& tol) {
  return validate_lagrangian(U, V, SymplecticModel::standard(static_cast<int>(U.rows())), tol);
}

LagFramePair make_frame_pair(LagFrame first, LagFrame second, int k, const Tolerances& tol) {
  const int n = first.n();
  if (second.n() != n) throw DomainError("make_frame_pair: dimension mismatch");
  if (k < 0 || k > n) throw DomainError("make_frame_pair: k out of range");
  const CMat X1 = first.stacked(), X2 = second.stacked();
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < 2 * n; ++i) {
      if (std::abs(X1(i, j).imag()) > tol.abs || std::abs(X2(i, j).imag()) > tol.abs) {
        throw DomainError("make_frame_pair: shared column is not real at " + at(i, j));
      }
      if (std::abs(X1(i, j) - X2(i, j)) > tol.abs) {
        throw DomainError("make_frame_pair: shared columns differ at " + at(i, j));
      }
    }
  }
  return {std::move(first), std::move(second), k};
}

LagFramePair act_pair(const LagFramePair& pair, const CMat& g1, const CMat& g2,
                      const Tolerances& tol) {
  const Classification c = classify_glkd(g1, g2, pair.k, tol);
  if (!c.member()) throw DomainError("act_pair: element is not in the pair subgroup");
  const int n = pair.first.n();
  const SymplecticModel model = SymplecticModel::standard(n);
  return make_frame_pair(validate_lagrangian(pair.first.U * g1, pair.first.V * g1, model, tol),
                         validate_lagrangian(pair.second.U * g2, pair.second.V * g2, model, tol),
                         pair.k, tol);
}

CMat frame_compose(const CMat& E, const CMat& U, const CMat& V, const SymplecticModel& model,
                   const Tolerances& tol) {
  const int n = model.n;
  if (E.rows() != 2 * n || E.cols() != 2 * n) throw DomainError("frame_compose: frame size");
  if (U.rows() != n || V.rows() != n || U.cols() != V.cols()) {
    throw DomainError("frame_compose: coordinate size");
  }
  const CMat J = standard_J(n).cast<cplx>();
  const double residual = max_abs(E.transpose() * model.omega * E - J);
  const double scale = std::max(1.0, max_abs(E) * max_abs(E));
  if (residual > tol.rel * scale) {
    throw DomainError("frame_compose: columns do not form a symplectic frame");
  }
  return E * stack(U, V);
}

cplx delta(const LagFramePair& pair, const SymplecticModel& model, const Tolerances& tol) {
  const int n = pair.first.n(), k = pair.k;
  const CMat M = -I_unit * (pair.first.stacked().adjoint() * model.omega * pair.second.stacked());
  const cplx d = det(M.bottomRightCorner(n - k, n - k));
  if (std::abs(d) < tol.singular) {
    throw DomainError("delta: pairing determinant vanishes (frames not transverse modulo D)");
  }
  return d;
}

cplx delta(const LagFramePair& pair, const Tolerances& tol) {
  return delta(pair, SymplecticModel::standard(pair.first.n()), tol);
}

// Ball and Phi ---------------------------------------------------------------

BallPoint::BallPoint(CMat W, const Tolerances& tol) : w_(std::move(W)) {
  if (w_.rows() != w_.cols()) throw DomainError("BallPoint: matrix is not square");
  if (max_abs(w_ - w_.transpose()) > tol.abs) throw DomainError("BallPoint: not symmetric");
  if (norm() > 1.0 + tol.abs) {
    throw DomainError("BallPoint: operator norm " + std::to_string(norm()) + " exceeds 1");
  }
}

BallChart phi(const LagFrame& frame, const Tolerances& tol) {
  const CMat C = frame.U - I_unit * frame.V;
  if (std::abs(det(C)) <= tol.singular) throw DomainError("phi: U - iV is singular");
  const CMat W = (frame.U + I_unit * frame.V) * C.inverse();
  const double asym = max_abs(W - W.transpose());
  if (asym > tol.abs * std::max(1.0, max_abs(W))) {
    throw DomainError("phi: image is not symmetric; frame is not Lagrangian");
  }
  return {BallPoint((W + W.transpose()) / 2.0, tol), GlElement(C, tol)};
}

std::pair<CMat, CMat> phi_inv_raw(const CMat& W, const CMat& C) {
  const CMat one = CMat::Identity(W.rows(), W.cols());
  return {0.5 * (one + W) * C, (0.5 * I_unit) * (one - W) * C};
}

LagFrame phi_inv(const BallPoint& W, const GlElement& C, const Tolerances& tol) {
  if (W.n() != C.dim()) throw DomainError("phi_inv: dimension mismatch");
  auto [U, V] = phi_inv_raw(W.matrix(), C.matrix());
  return validate_lagrangian(U, V, tol);
}

std::pair<CMat, CMat> sp_act(const SpElement& g, const CMat& U, const CMat& V) {
  const CMat T1 = g.T1().cast<cplx>(), T2 = g.T2().cast<cplx>();
  const CMat T3 = g.T3().cast<cplx>(), T4 = g.T4().cast<cplx>();
  return {T1 * U + T2 * V, T3 * U + T4 * V};
}

BallChart alpha(const SpElement& g, const BallPoint& W, const Tolerances& tol) {
  if (g.n() != W.n()) throw DomainError("alpha: dimension mismatch");
  const int n = W.n();
  auto [U0, V0] = phi_inv_raw(W.matrix(), CMat::Identity(n, n));
  auto [U, V] = sp_act(g, U0, V0);
  const CMat C = U - I_unit * V;
  if (std::abs(det(C)) <= tol.singular) {
    throw std::logic_error("alpha: transformed frame lost positivity");
  }
  const CMat Wn = (U + I_unit * V) * C.inverse();
  return {BallPoint((Wn + Wn.transpose()) / 2.0, tol), GlElement(C, tol)};
}

// Gamma and the lifted action ------------------------------------------------------

double gamma_anchor(int n) { return std::pow(2.0, -0.5 * n); }

cplx gamma(const BallPoint& W1, const BallPoint& W2, const Tolerances& tol) {
  if (W1.n() != W2.n()) throw DomainError("gamma: dimension mismatch");
  const int n = W1.n();
  const CMat P = W2.matrix().adjoint() * W1.matrix();
  const CMat one = CMat::Identity(n, n);
  auto f = [&](double t) { return det(0.5 * (one - (t * t) * P)); };
  return continue_sqrt(f, gamma_anchor(n), tol, /*allow_zero_at_end=*/true);
}

MlElement alpha_tilde(const MpElement& gt, const BallPoint& W, const Tolerances& tol) {
  const SpElement& g = gt.g();
  auto f = [&](double s) {
    return det(alpha(g, BallPoint(s * W.matrix(), tol), tol).C.matrix());
  };
  const cplx z = continue_sqrt(f, gt.zeta(), tol);
  return {alpha(g, W, tol).C.matrix(), z, tol};
}

MetaLagFrame meta_act(const MpElement& gt, const MetaLagFrame& X, const Tolerances& tol) {
  return {alpha(gt.g(), X.W, tol).W, ml_mul(alpha_tilde(gt, X.W, tol), X.C, tol)};
}

MetaLagFrame meta_right(const MetaLagFrame& X, const MlElement& h, const Tolerances& tol) {
  return {X.W, ml_mul(X.C, h, tol)};
}

LagFrame meta_project(const MetaLagFrame& X, const Tolerances& tol) {
  return phi_inv(X.W, GlElement(X.C.matrix(), tol), tol);
}

// Block forms ------------------------------------------------------------------

FrameBlocks frame_blocks(const CMat& U, const CMat& V, int k, const Tolerances& tol) {
  const int n = static_cast<int>(U.rows());
  if (k < 0 || k > n) throw DomainError("frame_blocks: k out of range");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i >= k && j < k && std::abs(U(i, j)) > tol.abs) {
        throw DomainError("frame_blocks: U has a nonzero entry below A at " + at(i, j));
      }
      if ((i < k || j < k) && std::abs(V(i, j)) > tol.abs) {
        throw DomainError("frame_blocks: V has a nonzero entry outside V_r at " + at(i, j));
      }
      if (i < k && j < k && std::abs(U(i, j).imag()) > tol.abs) {
        throw DomainError("frame_blocks: A is not real at " + at(i, j));
      }
    }
  }
  FrameBlocks b;
  b.A = U.topLeftCorner(k, k).real();
  if (k > 0 && std::abs(b.A.determinant()) <= tol.singular) {
    throw DomainError("frame_blocks: A is singular");
  }
  b.B = U.topRightCorner(k, n - k);
  b.Ur = U.bottomRightCorner(n - k, n - k);
  b.Vr = V.bottomRightCorner(n - k, n - k);
  return b;
}

MetaBlocks meta_blocks(const MetaLagFrame& X, int k, const Tolerances& tol) {
  const int n = X.W.n();
  if (k < 0 || k > n) throw DomainError("meta_blocks: k out of range");
  const CMat& W = X.W.matrix();
  const CMat& C = X.C.matrix();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i < k || j < k) {
        const cplx expected = (i == j) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
        if (std::abs(W(i, j) - expected) > tol.abs) {
          throw DomainError("meta_blocks: W is not diag(1, W_r) at " + at(i, j));
        }
      }
      if (i >= k && j < k && std::abs(C(i, j)) > tol.abs) {
        throw DomainError("meta_blocks: C has a nonzero entry below A at " + at(i, j));
      }
      if (i < k && j < k && std::abs(C(i, j).imag()) > tol.abs) {
        throw DomainError("meta_blocks: A is not real at " + at(i, j));
      }
    }
  }
  MetaBlocks b;
  b.A = C.topLeftCorner(k, k).real();
  b.B = C.topRightCorner(k, n - k);
  b.Wr = W.bottomRightCorner(n - k, n - k);
  b.Cr = C.bottomRightCorner(n - k, n - k);
  b.z = X.C.z();
  return b;
}

namespace {

void require_same_A(const RMat& A1, const RMat& A2, const Tolerances& tol) {
  if (A1.size() != 0 && (A1 - A2).cwiseAbs().maxCoeff() > tol.abs) {
    throw DomainError("block pair: the real blocks A differ");
  }
}

double abs_det(const RMat& A) { return A.rows() == 0 ? 1.0 : std::abs(A.determinant()); }

}  // namespace

cplx delta_L(const LagFrame& X1, const LagFrame& X2, int k, const Tolerances& tol) {
  const FrameBlocks b1 = frame_blocks(X1.U, X1.V, k, tol);
  const FrameBlocks b2 = frame_blocks(X2.U, X2.V, k, tol);
  require_same_A(b1.A, b2.A, tol);
  return det(I_unit * (b1.Vr.adjoint() * b2.Ur - b1.Ur.adjoint() * b2.Vr));
}

cplx delta_L_explicit(const MetaLagFrame& X1, const MetaLagFrame& X2, int k,
                      const Tolerances& tol) {
  const MetaBlocks b1 = meta_blocks(X1, k, tol);
  const MetaBlocks b2 = meta_blocks(X2, k, tol);
  require_same_A(b1.A, b2.A, tol);
  const int r = X1.W.n() - k;
  const cplx detA = k == 0 ? cplx{1.0} : cplx{b1.A.determinant()};
  const CMat one = CMat::Identity(r, r);
  return std::conj(det(X1.C.matrix())) * det(X2.C.matrix()) / (detA * detA) *
         det(0.5 * (one - b1.Wr.adjoint() * b2.Wr));
}

cplx delta_L_tilde(const MetaLagFrame& X1, const MetaLagFrame& X2, int k,
                   const Tolerances& tol) {
  const MetaBlocks b1 = meta_blocks(X1, k, tol);
  const MetaBlocks b2 = meta_blocks(X2, k, tol);
  require_same_A(b1.A, b2.A, tol);
  // gamma(W2r, W1r)^2 = det(1/2 (1 - W1r^dagger W2r)).
  const cplx g = gamma(BallPoint(b2.Wr, tol), BallPoint(b1.Wr, tol), tol);
  return std::conj(b1.z) * b2.z / abs_det(b1.A) * g;
}

// Liouville and densities ------------------------------------------------------

cplx pfaffian(const CMat& a) {
  const Eigen::Index m = a.rows();
  if (m == 0) return {1.0, 0.0};
  if (m % 2 == 1) return {0.0, 0.0};
  if (m == 2) return a(0, 1);
  cplx total{0.0, 0.0};
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(m - 2));
  for (Eigen::Index j = 1; j < m; ++j) {
    if (a(0, j) == cplx{0.0, 0.0}) continue;
    keep.clear();
    for (Eigen::Index i = 1; i < m; ++i)
      if (i != j) keep.push_back(i);
    CMat minor(m - 2, m - 2);
    for (Eigen::Index r = 0; r < m - 2; ++r)
      for (Eigen::Index c = 0; c < m - 2; ++c) minor(r, c) = a(keep[r], keep[c]);
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    total += sign * a(0, j) * pfaffian(minor);
  }
  return total;
}

cplx liouville(const CMat& X, const SymplecticModel& model) {
  const int n = model.n;
  if (X.rows() != 2 * n || X.cols() != 2 * n) {
    throw DomainError("liouville: expected " + std::to_string(2 * n) + " vectors of length " +
                      std::to_string(2 * n));
  }
  const double sign = ((n * (n - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  return sign * pfaffian(X.transpose() * model.omega * X);
}

cplx pairing_density(const DensityInput& in, const SymplecticModel& model,
                     const Tolerances& tol) {
  const int n = model.n, k = in.pair.k;
  if (in.lifts.rows() != 2 * n || in.lifts.cols() != 2 * n - k) {
    throw DomainError("pairing_density: expected 2n - k lifted vectors");
  }
  const cplx d = delta(in.pair, model, tol);
  cplx factor;
  if (in.mode == DensityMode::HalfDensity) {
    factor = std::sqrt(std::abs(d));
  } else {
    if (!in.delta_tilde) throw DomainError("pairing_density: half-form mode needs delta_tilde");
    factor = *in.delta_tilde;
    if (std::abs(factor * factor - d) > tol.rel * std::abs(d)) {
      throw DomainError("pairing_density: delta_tilde^2 differs from delta");
    }
  }
  CMat vectors(2 * n, 2 * n);
  vectors << in.pair.first.stacked().leftCols(k), in.lifts;
  return in.prequantum * std::conj(in.nu1) * in.nu2 * factor *
         std::abs(liouville(vectors, model));
}

}  // namespace hfe
