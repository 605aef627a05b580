#include "hfe/groups.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hfe/frames.hpp"
#include "hfe/tracking.hpp"

namespace hfe {

namespace {

double max_abs(const RMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_square(const CMat& a, const char* what) {
  if (a.rows() != a.cols()) throw DomainError(std::string(what) + ": matrix is not square");
}

}  // namespace

GlElement::GlElement(CMat a, const Tolerances& tol) : a_(std::move(a)) {
  require_square(a_, "GlElement");
  if (std::abs(det(a_)) <= tol.singular) throw DomainError("GlElement: singular matrix");
}

MlElement::MlElement(CMat a, cplx z, const Tolerances& tol) : a_(std::move(a)), z_(z) {
  require_square(a_, "MlElement");
  const cplx d = det(a_);
  if (std::abs(d) <= tol.singular) throw DomainError("MlElement: singular matrix");
  if (std::abs(z_ * z_ - d) > tol.rel * std::abs(d)) {
    throw DomainError("MlElement: z^2 differs from det A");
  }
}

double MlElement::residual() const {
  const cplx d = det(a_);
  return std::abs(z_ * z_ - d) / std::abs(d);
}

MlElement ml_mul(const MlElement& a, const MlElement& b, const Tolerances& tol) {
  if (a.dim() != b.dim()) throw DomainError("ml_mul: dimension mismatch");
  Tolerances t = tol;
  t.rel = 2.0 * tol.rel;
  return {a.matrix() * b.matrix(), a.z() * b.z(), t};
}

MlElement ml_inverse(const MlElement& a) {
  Tolerances t = Tolerances::defaults();
  t.rel = std::max(t.rel, 4.0 * a.residual());
  return {a.matrix().inverse(), 1.0 / a.z(), t};
}

MlElement ml_deck(const MlElement& a) {
  Tolerances t = Tolerances::defaults();
  t.rel = std::max(t.rel, 2.0 * a.residual());
  return {a.matrix(), -a.z(), t};
}

std::pair<MlElement, MlElement> ml_lift(const GlElement& a) {
  const cplx z = principal_sqrt(det(a.matrix()));
  return {MlElement(a.matrix(), z), MlElement(a.matrix(), -z)};
}

// Sp(2n, R) -----------------------------------------------------------------

double SpResiduals::max() const { return std::max({unit, lower_symmetric, upper_symmetric}); }

SpResiduals sp_residuals(const RMat& g) {
  const Eigen::Index n = g.rows() / 2;
  const RMat T1 = g.topLeftCorner(n, n), T2 = g.topRightCorner(n, n);
  const RMat T3 = g.bottomLeftCorner(n, n), T4 = g.bottomRightCorner(n, n);
  SpResiduals r;
  r.unit = max_abs(T4.transpose() * T1 - T2.transpose() * T3 - RMat::Identity(n, n));
  r.lower_symmetric = max_abs(T1.transpose() * T3 - T3.transpose() * T1);
  r.upper_symmetric = max_abs(T2.transpose() * T4 - T4.transpose() * T2);
  return r;
}

SpElement SpElement::identity(int n) {
  return SpElement(RMat::Identity(2 * n, 2 * n), SpResiduals{});
}

SpElement sp_validate(const RMat& g, const Tolerances& tol) {
  if (g.rows() != g.cols() || g.rows() % 2 != 0) {
    throw DomainError("sp_validate: matrix is not square of even size");
  }
  if (!g.allFinite()) throw DomainError("sp_validate: non-finite entries");
  const SpResiduals r = sp_residuals(g);
  const double scale = std::max(1.0, max_abs(g) * max_abs(g));
  if (r.max() > tol.rel * scale) {
    throw DomainError("sp_validate: not symplectic (residual " + std::to_string(r.max()) + ")");
  }
  return SpElement(g, r);
}

SpElement sp_mul(const SpElement& a, const SpElement& b, const Tolerances& tol) {
  if (a.n() != b.n()) throw DomainError("sp_mul: dimension mismatch");
  return sp_validate(a.matrix() * b.matrix(), tol);
}

SpElement sp_inverse(const SpElement& a) {
  // g^{-1} = -J g^t J.
  const RMat J = standard_J(a.n());
  return sp_validate(-J * a.matrix().transpose() * J);
}

RMat standard_J(int n) {
  RMat J = RMat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = RMat::Identity(n, n);
  J.bottomLeftCorner(n, n) = -RMat::Identity(n, n);
  return J;
}

SpElement sp_embed_gl(const RMat& M, const Tolerances& tol) {
  const Eigen::Index n = M.rows();
  if (std::abs(M.determinant()) <= tol.singular) throw DomainError("sp_embed_gl: singular M");
  RMat g = RMat::Zero(2 * n, 2 * n);
  g.topLeftCorner(n, n) = M;
  g.bottomRightCorner(n, n) = M.inverse().transpose();
  return sp_validate(g, tol);
}

SpElement sp_upper_shear(const RMat& S, const Tolerances& tol) {
  const Eigen::Index n = S.rows();
  RMat g = RMat::Identity(2 * n, 2 * n);
  g.topRightCorner(n, n) = S;
  return sp_validate(g, tol);
}

SpElement sp_lower_shear(const RMat& S, const Tolerances& tol) {
  const Eigen::Index n = S.rows();
  RMat g = RMat::Identity(2 * n, 2 * n);
  g.bottomLeftCorner(n, n) = S;
  return sp_validate(g, tol);
}

SpElement sp_rotation(const std::vector<double>& theta) {
  const Eigen::Index n = static_cast<Eigen::Index>(theta.size());
  RMat g = RMat::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = std::cos(theta[i]), s = std::sin(theta[i]);
    g(i, i) = c;
    g(i, n + i) = s;
    g(n + i, i) = -s;
    g(n + i, n + i) = c;
  }
  return sp_validate(g);
}

SpElement sp_embed_reduced(const SpElement& g_r, int n, int k) {
  const int m = n - k;
  if (g_r.n() != m) throw DomainError("sp_embed_reduced: reduced block has wrong size");
  RMat g = RMat::Identity(2 * n, 2 * n);
  const RMat& r = g_r.matrix();
  for (int i = 0; i < 2 * m; ++i) {
    for (int j = 0; j < 2 * m; ++j) {
      const int gi = i < m ? k + i : n + k + (i - m);
      const int gj = j < m ? k + j : n + k + (j - m);
      g(gi, gj) = r(i, j);
    }
  }
  return sp_validate(g);
}

SpElement make_spk(const RMat& A_g, const RMat& B_g, const RMat& S, const SpElement& g_r,
                   const Tolerances& tol) {
  const int k = static_cast<int>(A_g.rows());
  const int n = k + g_r.n();
  RMat M = RMat::Identity(n, n);
  M.topLeftCorner(k, k) = A_g.transpose();
  if (k > 0 && n > k) M.topRightCorner(k, n - k) = B_g;
  return sp_mul(sp_mul(sp_embed_gl(M, tol), sp_upper_shear(S, tol), tol),
                sp_embed_reduced(g_r, n, k), tol);
}

// Mp(2n, R) -----------------------------------------------------------------

MpElement::MpElement(SpElement g, cplx zeta, const Tolerances& tol)
    : g_(std::move(g)), zeta_(zeta) {
  const cplx d = det(alpha(g_, BallPoint::zero(g_.n()), tol).C.matrix());
  if (std::abs(zeta_ * zeta_ - d) > tol.rel * std::abs(d)) {
    throw DomainError("MpElement: zeta^2 differs from det alpha(g, 0)");
  }
}

std::pair<MpElement, MpElement> mp_lift(const SpElement& g, const Tolerances& tol) {
  const cplx d = det(alpha(g, BallPoint::zero(g.n()), tol).C.matrix());
  const cplx z = principal_sqrt(d);
  return {MpElement(g, z, tol), MpElement(g, -z, tol)};
}

MpElement mp_mul(const MpElement& a, const MpElement& b, const Tolerances& tol) {
  if (a.n() != b.n()) throw DomainError("mp_mul: dimension mismatch");
  const BallPoint b0 = alpha(b.g(), BallPoint::zero(b.n()), tol).W;
  const cplx za = alpha_tilde(a, b0, tol).z();
  return {sp_mul(a.g(), b.g(), tol), za * b.zeta(), tol};
}

MpElement mp_inverse(const MpElement& a, const Tolerances& tol) {
  // The inverse h satisfies alpha_tilde(h, g.0) * zeta_a = 1.
  const SpElement h = sp_inverse(a.g());
  auto [candidate, other] = mp_lift(h, tol);
  const BallPoint w = alpha(a.g(), BallPoint::zero(a.n()), tol).W;
  const cplx z = alpha_tilde(candidate, w, tol).z();
  return std::abs(z * a.zeta() - 1.0) <= std::abs(z * a.zeta() + 1.0) ? candidate : other;
}

MpElement mp_deck(const MpElement& a) { return {a.g(), -a.zeta()}; }

// Block subgroups ------------------------------------------------------------

const char* to_string(SubgroupKind kind) {
  switch (kind) {
    case SubgroupKind::Glk: return "Glk";
    case SubgroupKind::Glkd: return "Glkd";
    case SubgroupKind::Mlk: return "Mlk";
    case SubgroupKind::Mlkd: return "Mlkd";
    case SubgroupKind::Spk: return "Spk";
    case SubgroupKind::Mpk: return "Mpk";
  }
  return "?";
}

namespace {

void check_k(int k, int n) {
  if (k < 0 || k > n) throw DomainError("subgroup_classify: k out of range");
}

// Zero lower-left block and real invertible A.
std::vector<EntryIndex> glk_violations(const CMat& g, int k, const Tolerances& tol) {
  std::vector<EntryIndex> out;
  const int n = static_cast<int>(g.rows());
  for (int i = k; i < n; ++i)
    for (int j = 0; j < k; ++j)
      if (std::abs(g(i, j)) > tol.abs) out.push_back({i + 1, j + 1});
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (std::abs(g(i, j).imag()) > tol.abs) out.push_back({i + 1, j + 1});
  return out;
}

SubgroupTag glk_tag(SubgroupKind kind, const CMat& g, int k) {
  const int n = static_cast<int>(g.rows());
  SubgroupTag tag{kind, k, g.topLeftCorner(k, k).real(), {}, {}, {}, {}, {}};
  tag.B.push_back(g.topRightCorner(k, n - k));
  tag.D.push_back(g.bottomRightCorner(n - k, n - k));
  return tag;
}

}  // namespace

Classification classify_glk(const CMat& g, int k, const Tolerances& tol) {
  require_square(g, "classify_glk");
  check_k(k, static_cast<int>(g.rows()));
  Classification c;
  c.violations = glk_violations(g, k, tol);
  if (c.violations.empty()) c.tag = glk_tag(SubgroupKind::Glk, g, k);
  return c;
}

Classification classify_glkd(const CMat& g1, const CMat& g2, int k, const Tolerances& tol) {
  require_square(g1, "classify_glkd");
  if (g1.rows() != g2.rows()) throw DomainError("classify_glkd: dimension mismatch");
  check_k(k, static_cast<int>(g1.rows()));
  Classification c;
  c.violations = glk_violations(g1, k, tol);
  for (const EntryIndex& e : glk_violations(g2, k, tol)) {
    if (std::find(c.violations.begin(), c.violations.end(), e) == c.violations.end())
      c.violations.push_back(e);
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (std::abs(g1(i, j) - g2(i, j)) > tol.abs) {
        const EntryIndex e{i + 1, j + 1};
        if (std::find(c.violations.begin(), c.violations.end(), e) == c.violations.end())
          c.violations.push_back(e);
      }
  if (c.violations.empty()) {
    SubgroupTag tag = glk_tag(SubgroupKind::Glkd, g1, k);
    const SubgroupTag second = glk_tag(SubgroupKind::Glkd, g2, k);
    tag.B.push_back(second.B[0]);
    tag.D.push_back(second.D[0]);
    c.tag = std::move(tag);
  }
  return c;
}

Classification classify_mlk(const MlElement& g, int k, const Tolerances& tol) {
  Classification c = classify_glk(g.matrix(), k, tol);
  if (c.tag) {
    c.tag->kind = SubgroupKind::Mlk;
    c.tag->z.push_back(g.z());
  }
  return c;
}

Classification classify_mlkd(const MlElement& g1, const MlElement& g2, int k,
                             const Tolerances& tol) {
  Classification c = classify_glkd(g1.matrix(), g2.matrix(), k, tol);
  if (c.tag) {
    c.tag->kind = SubgroupKind::Mlkd;
    c.tag->z = {g1.z(), g2.z()};
  }
  return c;
}

Classification classify_spk(const SpElement& g, int k, const Tolerances& tol) {
  const int n = g.n();
  check_k(k, n);
  const RMat& m = g.matrix();
  // Index blocks: e_D = [0,k), e_r = [k,n), f_D = [n,n+k), f_r = [n+k,2n).
  auto eD = [&](int i) { return i < k; };
  auto er = [&](int i) { return i >= k && i < n; };
  auto fD = [&](int i) { return i >= n && i < n + k; };
  auto fr = [&](int i) { return i >= n + k; };
  Classification c;
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = 0; j < 2 * n; ++j) {
      const bool must_vanish = (eD(j) && !eD(i)) || (fD(i) && (er(j) || fr(j)));
      if (must_vanish && std::abs(m(i, j)) > tol.abs) c.violations.push_back({i + 1, j + 1});
    }
  }
  if (!c.violations.empty()) return c;
  SubgroupTag tag{SubgroupKind::Spk, k, {}, {}, {}, {}, {}, {}};
  tag.A_g = m.topLeftCorner(k, k).transpose();
  const int r = n - k;
  RMat gr(2 * r, 2 * r);
  for (int i = 0; i < 2 * r; ++i) {
    for (int j = 0; j < 2 * r; ++j) {
      const int gi = i < r ? k + i : n + k + (i - r);
      const int gj = j < r ? k + j : n + k + (j - r);
      gr(i, j) = m(gi, gj);
    }
  }
  tag.g_r = gr;
  c.tag = std::move(tag);
  return c;
}

Classification classify_mpk(const MpElement& g, int k, const Tolerances& tol) {
  Classification c = classify_spk(g.g(), k, tol);
  if (c.tag) {
    c.tag->kind = SubgroupKind::Mpk;
    c.tag->z.push_back(g.zeta());
  }
  return c;
}

}  // namespace hfe
