#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hfe/cech.hpp"
#include "hfe/compatibility.hpp"

namespace hfe {

/// A metaplectic structure given by its sampled Mp cocycle. When
/// `d_adapted` is set every transition lies in Mp_k.
struct MetaplecticBundleData {
  Cocycle<MpElement> mp;
  bool d_adapted = false;
  int k = 0;
};

struct BundleCheck {
  CocycleReport sp;       // projected cocycle
  CocycleReport mp;       // lifted cocycle, including zeta
  std::size_t spk_violations = 0;
  std::size_t negative_components = 0;  // transitions with det A_g < 0
  bool pass = true;
};

BundleCheck check_bundle(const Nerve& nerve, const MetaplecticBundleData& data,
                         const Tolerances& tol = Tolerances::defaults());

/// Positive Lagrangian frames sigma_alpha(m) in the coordinates of the
/// chart's symplectic section, indexed [chart][slot].
struct FrameSectionData {
  std::vector<std::vector<LagFrame>> sigma;
};

struct RecipeResult {
  Cocycle<CMat> N;                 // g_ab sigma_b = sigma_a N_ab
  Cocycle<MlElement> Ntilde;
  std::vector<std::vector<MetaLagFrame>> lifted;  // sigma-tilde, [chart][slot]
  double section_residual = 0.0;   // |sigma_a N - g sigma_b|
  double ball_residual = 0.0;      // |W1 - W2|
  double projection_residual = 0.0;  // |rho(Ntilde) - N|
  CocycleReport cocycle;
};

/// Lifts every sigma through Phi, fixing the square root of det C by
/// continuation along the chart graph from the principal root (negated on
/// charts whose entry in `sheet_flips` is set).
std::vector<std::vector<MetaLagFrame>> lift_sections(
    const Nerve& nerve, const FrameSectionData& sections,
    const std::vector<std::uint8_t>& sheet_flips, const Tolerances& tol = Tolerances::defaults());

/// Transition functions of the metalinear frame bundle induced by the
/// metaplectic structure and the section family: with (W1, C1) the lifted
/// action of the Mp transition on sigma-tilde_b and (W2, C2) = sigma-tilde_a,
/// Ntilde_ab = C2^{-1} C1. Throws DomainError when the sections are not
/// related by the Sp transitions.
RecipeResult recipe(const Nerve& nerve, const MetaplecticBundleData& data,
                    const FrameSectionData& sections, const std::vector<std::uint8_t>& sheet_flips,
                    const Tolerances& tol = Tolerances::defaults());

/// Block data of a frame whose first k columns span the real subspace
/// spanned by the first k vectors of the symplectic section.
struct ReducedFrame {
  FrameBlocks blocks;
  std::optional<LagFrame> reduced;  // absent when k = n
  bool positive = false;            // the full frame
  bool reduced_positive = false;    // the reduced frame (true when k = n)
};

ReducedFrame reduce_D_adapted(const LagFrame& frame, int k,
                              const Tolerances& tol = Tolerances::defaults());

struct DeltaDResult {
  std::vector<std::vector<cplx>> values;   // delta-tilde_L(sigma1, sigma2), [chart][slot]
  double invariance_residual = 0.0;  // |dL(g.X_b) - dL(X_b)| / |dL(X_b)|
  double gluing_residual = 0.0;      // chart a value translated by (Ntilde1, Ntilde2)
  double square_residual = 0.0;      // vs delta_L of the projections
  double explicit_residual = 0.0;    // delta_L determinant vs Ball formula
  double equivariance_residual = 0.0;
  double restriction_residual = 0.0; // delta_k vs delta_L on pair sections
  std::size_t negative_samples = 0;  // overlap samples with det A_g < 0
  std::vector<Location> failures;
};

/// Evaluates delta-tilde_L on the lifted pair sections of every chart and
/// checks Mp_k invariance across overlaps, the square identity, the Ml_k^2
/// rule on `draws` random elements per chart, and the restriction identity.
DeltaDResult build_delta_D_tilde(const Nerve& nerve, const MetaplecticBundleData& data,
                                 const FrameSectionData& first, const FrameSectionData& second,
                                 const RecipeResult& r1, const RecipeResult& r2,
                                 std::uint64_t seed, int draws = 20,
                                 const Tolerances& tol = Tolerances::defaults());

struct CrossCheckResult {
  RecipeResult first;
  RecipeResult second;
  PairDataCheck pair_check;
  DeltaTildeData delta_tilde;   // from the recipe-induced lifts
  DeltaDResult delta_D;
  int global_sign = 0;          // delta-tilde_D = sign * delta-tilde, 0 if no single sign
  double sign_residual = 0.0;
};

/// Runs the recipe for both families, assembles the pair data (N1, N2) with
/// delta_k samples, glues the half-form pairing from the two induced lifts,
/// and compares it with delta-tilde_D on the pair sections.
CrossCheckResult cross_check(const Nerve& nerve, const MetaplecticBundleData& data,
                             const FrameSectionData& first, const FrameSectionData& second,
                             const std::vector<std::uint8_t>& flips_first,
                             const std::vector<std::uint8_t>& flips_second, std::uint64_t seed,
                             const Tolerances& tol = Tolerances::defaults());

}  // namespace hfe
