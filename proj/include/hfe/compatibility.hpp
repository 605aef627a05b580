#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hfe/cech.hpp"

namespace hfe {

/// Transition data of two polarizations with conj(P1) meet P2 of rank k:
/// a Gl_k^2 cocycle (g1, g2) sharing the real A-block, and the values
/// delta_alpha(m) = delta_k(s_alpha(m)) on every chart sample point
/// (indexed [chart][slot]). Sections change as s_b = s_a (g1_ab, g2_ab).
struct PolarizationPairData {
  Cocycle<GlPair> pair_cocycle;
  std::vector<std::vector<cplx>> delta_samples;
};

struct PairDataCheck {
  double membership = 0.0;      // Gl_k^2 pattern (0 or inf)
  double min_abs_delta = 0.0;
  double transform_residual = 0.0;  // delta_b vs delta_a conj(det D1) det D2
  std::vector<Location> failures;
  bool pass = true;
};

PairDataCheck check_pair_data(const Nerve& nerve, const PolarizationPairData& data,
                              const Tolerances& tol = Tolerances::defaults());

/// Pair data rescaled so that every delta sample is 1, together with the
/// square roots zeta_alpha of the original samples (tracked along each
/// chart graph from the principal root) needed to translate lifts and
/// half-form values back.
struct NormalizedPairData {
  PolarizationPairData data;
  std::vector<std::vector<cplx>> original_delta;
  std::vector<std::vector<cplx>> zeta;
  double max_delta_residual = 0.0;  // |delta' - 1| after rescaling
};

/// Rescales the second section of chart alpha by (1, diag(1, ..., 1,
/// delta_alpha)^{-1}); the second cocycle becomes g_a g2_ab g_b^{-1}.
NormalizedPairData normalize_sections(const Nerve& nerve, const PolarizationPairData& data,
                                      const Tolerances& tol = Tolerances::defaults());

/// Rewrites a lift of the original second cocycle as a lift of the
/// normalized one: z' = zeta_a z zeta_b^{-1}.
Cocycle<MlElement> normalize_lift(const Nerve& nerve, const NormalizedPairData& norm,
                                  const Cocycle<MlElement>& z2,
                                  const Tolerances& tol = Tolerances::defaults());
/// Inverse of normalize_lift.
Cocycle<MlElement> denormalize_lift(const Nerve& nerve, const NormalizedPairData& norm,
                                    const Cocycle<MlElement>& z2n,
                                    const Tolerances& tol = Tolerances::defaults());

/// z2 = |det A| conj(z1)^{-1} on the normalized second cocycle. Throws
/// DomainError when conj(det g1) det g2 det(A)^{-2} differs from 1 or z1
/// does not project onto g1.
Cocycle<MlElement> induce_compatible(const Nerve& nerve, const NormalizedPairData& norm,
                                     const Cocycle<MlElement>& z1,
                                     const Tolerances& tol = Tolerances::defaults());

/// Half-form pairing function described by its values on the lifted
/// sections; elsewhere it follows from the Ml_k^2 translation rule.
struct DeltaTildeData {
  int k = 0;
  std::vector<std::vector<cplx>> base;  // on the original lifted sections
  std::vector<std::int8_t> chart_signs;
  double overlap_residual = 0.0;
  std::vector<Location> overlap_failures;
  double square_residual = 0.0;
  double equivariance_residual = 0.0;
  int equivariance_draws = 0;
  bool glued = false;
};

/// Value at s_alpha(m) . (h1, h2): base conj(z_h1) z_h2 |det A_h|^{-1}.
cplx evaluate(const DeltaTildeData& d, int chart, int slot, const MlPair& h);

/// Random Ml_k^2 element with entries of moderate size.
MlPair random_mlkd(int n, int k, std::uint64_t seed);

/// Overlap ratios conj(z1) z2 |det A|^{-1} for every overlap sample point,
/// aligned like the cocycle tables.
std::vector<std::vector<std::vector<cplx>>> gluing_ratios(const Nerve& nerve,
                                                          const Cocycle<MlElement>& z1,
                                                          const Cocycle<MlElement>& z2);

struct GluingResult {
  std::vector<std::int8_t> chart_signs;
  double residual = 0.0;
  std::vector<Location> failures;
  bool feasible = false;  // GF(2) system for the chart signs solvable
};

/// Chart signs making eps_b = eps_a q on every component (q from the
/// ratios, with optional extra sign flips per global component), and the
/// largest |eps_b - eps_a q| over all overlap samples.
GluingResult glue_signs(const Nerve& nerve,
                        const std::vector<std::vector<std::vector<cplx>>>& ratios,
                        const std::vector<std::uint8_t>* flips, const Tolerances& tol,
                        bool collect_failures = true);

/// Builds the half-form pairing on normalized data from lifts z1 and z2
/// (of the normalized cocycles) and checks gluing, the square identity
/// against the original delta samples, and the Ml_k^2 rule on `draws`
/// random elements per chart.
DeltaTildeData build_delta_tilde(const Nerve& nerve, const NormalizedPairData& norm,
                                 const Cocycle<MlElement>& z1, const Cocycle<MlElement>& z2n,
                                 std::uint64_t seed, int draws = 100,
                                 const Tolerances& tol = Tolerances::defaults());

struct UniquenessResult {
  bool first_glues = false;
  bool second_glues = false;
  std::optional<std::vector<std::int8_t>> witness;
  bool falsified = false;  // both glue but no witness exists
};

UniquenessResult verify_uniqueness(const Nerve& nerve, const NormalizedPairData& norm,
                                   const Cocycle<MlElement>& z1, const Cocycle<MlElement>& z2a,
                                   const Cocycle<MlElement>& z2b,
                                   const Tolerances& tol = Tolerances::defaults());

struct UniquenessEnumeration {
  std::size_t patterns = 0;
  std::size_t glued = 0;
  std::size_t equivalent = 0;
  std::size_t mismatches = 0;  // glues but inequivalent, or equivalent but fails
  std::size_t glued_inequivalent = 0;
  double max_glued_residual = 0.0;
  double min_failed_residual = 0.0;
};

/// Every sign modification of z2 on the overlap components: which glue and
/// which are equivalent to z2.
UniquenessEnumeration enumerate_uniqueness(const Nerve& nerve, const Cocycle<MlElement>& z1,
                                           const Cocycle<MlElement>& z2,
                                           const Tolerances& tol = Tolerances::defaults());

struct SelfCompatResult {
  int epsilon = 0;  // 0 for positive delta, 1 for negative
  DeltaTildeData delta_tilde;
  std::vector<std::vector<cplx>> normalized;  // base times e^{-i eps pi/2}
  double normalized_min_real = 0.0;
  double normalized_max_imag = 0.0;
};

/// Self-compatibility for diagonal data g1 = g2 with z2 = z1. Throws
/// DomainError when delta is not real or changes sign.
SelfCompatResult self_compat(const Nerve& nerve, const PolarizationPairData& data,
                             const Cocycle<MlElement>& z1, std::uint64_t seed, int draws = 100,
                             const Tolerances& tol = Tolerances::defaults());

}  // namespace hfe
