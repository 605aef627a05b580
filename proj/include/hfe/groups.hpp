#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hfe/core.hpp"

namespace hfe {

/// An invertible complex n x n matrix.
class GlElement {
 public:
  explicit GlElement(CMat a, const Tolerances& tol = Tolerances::defaults());
  static GlElement identity(int n) { return GlElement(CMat::Identity(n, n)); }

  const CMat& matrix() const { return a_; }
  int dim() const { return static_cast<int>(a_.rows()); }

 private:
  CMat a_;
};

/// Element (A, z) of the metalinear group Ml(n, C): z^2 = det A.
class MlElement {
 public:
  MlElement(CMat a, cplx z, const Tolerances& tol = Tolerances::defaults());
  static MlElement identity(int n) { return {CMat::Identity(n, n), 1.0}; }

  const CMat& matrix() const { return a_; }
  cplx z() const { return z_; }
  int dim() const { return static_cast<int>(a_.rows()); }

  /// |z^2 - det A| / |det A|.
  double residual() const;

 private:
  CMat a_;
  cplx z_;
};

MlElement ml_mul(const MlElement& a, const MlElement& b,
                 const Tolerances& tol = Tolerances::defaults());
MlElement ml_inverse(const MlElement& a);
/// The other point of the fibre: (A, -z).
MlElement ml_deck(const MlElement& a);
/// Both lifts of `a`; the first carries the principal root of det A.
std::pair<MlElement, MlElement> ml_lift(const GlElement& a);

struct SpResiduals {
  double unit = 0.0;              // |T4^t T1 - T2^t T3 - 1|
  double lower_symmetric = 0.0;   // |T1^t T3 - T3^t T1|
  double upper_symmetric = 0.0;   // |T2^t T4 - T4^t T2|
  double max() const;
};

/// Block residuals of the three identities characterising Sp(2n, R),
/// measured as max-abs entries.
SpResiduals sp_residuals(const RMat& g);

/// A real symplectic 2n x 2n matrix in the basis (a_1..a_n, b_1..b_n) with
/// omega(a_i, b_j) = delta_ij.
class SpElement {
 public:
  static SpElement identity(int n);

  const RMat& matrix() const { return g_; }
  int n() const { return static_cast<int>(g_.rows() / 2); }
  RMat T1() const { return g_.topLeftCorner(n(), n()); }
  RMat T2() const { return g_.topRightCorner(n(), n()); }
  RMat T3() const { return g_.bottomLeftCorner(n(), n()); }
  RMat T4() const { return g_.bottomRightCorner(n(), n()); }
  const SpResiduals& residuals() const { return residuals_; }

 private:
  friend SpElement sp_validate(const RMat& g, const Tolerances& tol);
  SpElement(RMat g, SpResiduals r) : g_(std::move(g)), residuals_(r) {}
  RMat g_;
  SpResiduals residuals_;
};

/// Checks the symplectic block identities; throws DomainError when the
/// largest residual exceeds tol.rel relative to max(1, |g|^2).
SpElement sp_validate(const RMat& g,
                      const Tolerances& tol = Tolerances::defaults());
SpElement sp_mul(const SpElement& a, const SpElement& b,
                 const Tolerances& tol = Tolerances::defaults());
SpElement sp_inverse(const SpElement& a);
RMat standard_J(int n);

/// Element of the metaplectic group represented by its projection g and the
/// anchor zeta, a square root of det alpha(g, 0) that fixes the sheet of the
/// lifted Ball action at the origin.
class MpElement {
 public:
  MpElement(SpElement g, cplx zeta,
            const Tolerances& tol = Tolerances::defaults());
  static MpElement identity(int n) { return {SpElement::identity(n), 1.0}; }

  const SpElement& g() const { return g_; }
  cplx zeta() const { return zeta_; }
  int n() const { return g_.n(); }

 private:
  SpElement g_;
  cplx zeta_;
};

/// Both lifts (g, +zeta), (g, -zeta); the first carries the principal root.
std::pair<MpElement, MpElement> mp_lift(const SpElement& g,
                                        const Tolerances& tol = Tolerances::defaults());
MpElement mp_mul(const MpElement& a, const MpElement& b,
                 const Tolerances& tol = Tolerances::defaults());
MpElement mp_inverse(const MpElement& a,
                     const Tolerances& tol = Tolerances::defaults());
MpElement mp_deck(const MpElement& a);

// Block subgroups ----------------------------------------------------------

enum class SubgroupKind { Glk, Glkd, Mlk, Mlkd, Spk, Mpk };

const char* to_string(SubgroupKind kind);

/// 1-based (row, column) of a matrix entry.
struct EntryIndex {
  int row;
  int col;
  bool operator==(const EntryIndex&) const = default;
};

/// Block data of a member of one of the block subgroups. For Glk/Mlk only
/// the first entries of B, D, z are used; for the pair groups both.
struct SubgroupTag {
  SubgroupKind kind;
  int k = 0;
  RMat A;                 // real k x k block shared by the pair
  std::vector<CMat> B;    // k x (n-k)
  std::vector<CMat> D;    // (n-k) x (n-k)
  std::vector<cplx> z;    // Ml sheets
  RMat A_g;               // Sp_k: upper-left block is A_g^t
  RMat g_r;               // Sp_k: reduced symplectic block
};

struct Classification {
  std::optional<SubgroupTag> tag;
  std::vector<EntryIndex> violations;
  bool member() const { return tag.has_value(); }
};

Classification classify_glk(const CMat& g, int k,
                            const Tolerances& tol = Tolerances::defaults());
Classification classify_glkd(const CMat& g1, const CMat& g2, int k,
                             const Tolerances& tol = Tolerances::defaults());
Classification classify_mlk(const MlElement& g, int k,
                            const Tolerances& tol = Tolerances::defaults());
Classification classify_mlkd(const MlElement& g1, const MlElement& g2, int k,
                             const Tolerances& tol = Tolerances::defaults());
Classification classify_spk(const SpElement& g, int k,
                            const Tolerances& tol = Tolerances::defaults());
Classification classify_mpk(const MpElement& g, int k,
                            const Tolerances& tol = Tolerances::defaults());

// Generators of Sp(2n, R) ----------------------------------------------------

/// [[M, 0], [0, M^{-t}]] for real invertible M.
SpElement sp_embed_gl(const RMat& M, const Tolerances& tol = Tolerances::defaults());
/// [[1, S], [0, 1]] for real symmetric S.
SpElement sp_upper_shear(const RMat& S, const Tolerances& tol = Tolerances::defaults());
/// [[1, 0], [S, 1]] for real symmetric S.
SpElement sp_lower_shear(const RMat& S, const Tolerances& tol = Tolerances::defaults());
/// Rotation by theta_i in each (a_i, b_i) plane: a_i -> cos a_i - sin b_i.
SpElement sp_rotation(const std::vector<double>& theta);
/// Embeds g_r in Sp(2(n-k)) acting on (e_r, f_r), identity on (e_D, f_D).
SpElement sp_embed_reduced(const SpElement& g_r, int n, int k);

/// embed_gl([[A_g^t, B_g], [0, 1]]) . upper_shear(S) . embed_reduced(g_r):
/// an element of Sp_k with upper-left block A_g^t.
SpElement make_spk(const RMat& A_g, const RMat& B_g, const RMat& S,
                   const SpElement& g_r,
                   const Tolerances& tol = Tolerances::defaults());

}  // namespace hfe
