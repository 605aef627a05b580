// Acceptance runner: one PASS/FAIL line per criterion; exit status 1 when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hfe/compatibility.hpp"
#include "hfe/corpus.hpp"
#include "hfe/metaplectic_induction.hpp"
#include "hfe/report.hpp"
#include "hfe/tracking.hpp"
#include "support.hpp"

using namespace hfe;
using namespace hfe::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Tracks the largest residual of one identity against its bound.
struct Bound {
  const char* what;
  double limit;
  double worst = 0.0;

  void add(double r) { worst = std::max(worst, std::isnan(r) ? INFINITY : r); }
  bool ok() const { return worst < limit; }
  std::string text() const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s %.3g < %.0e", what, worst, limit);
    return buf;
  }
};

Outcome combine(std::initializer_list<const Bound*> bounds, std::initializer_list<std::pair<const char*, bool>> facts = {}) {
  Outcome o;
  for (const Bound* b : bounds) {
    o.pass = o.pass && b->ok();
    o.detail += (o.detail.empty() ? "" : "; ") + b->text();
  }
  for (const auto& [what, ok] : facts) {
    o.pass = o.pass && ok;
    o.detail += (o.detail.empty() ? "" : "; ") + std::string(what) + (ok ? " yes" : " NO");
  }
  return o;
}

std::vector<std::uint8_t> no_flips(const Nerve& nv) { return std::vector<std::uint8_t>(nv.charts.size(), 0); }

// 1 ---------------------------------------------------------------------------------

Outcome group_laws() {
  Rng rng(1001);
  Bound product{"max |z^2 - det A| / |det A|", 1e-9};
  bool exact = true;
  for (int i = 0; i < 1000; ++i) {
    const int n = rng.integer(1, 6);
    const CMat A = rng.invertible(n), B = rng.invertible(n);
    const MlElement a(A, rng.coin() ? std::sqrt(det(A)) : -std::sqrt(det(A)));
    const MlElement b(B, rng.coin() ? std::sqrt(det(B)) : -std::sqrt(det(B)));
    const MlElement ab = ml_mul(a, b);
    const cplx d = det(A * B);
    product.add(std::abs(ab.z() * ab.z() - d) / std::abs(d));
    auto [l1, l2] = ml_lift(GlElement(A));
    exact = exact && l1.matrix() == A && l2.matrix() == A && l1.z() == -l2.z();
  }
  return combine({&product}, {{"both lifts project exactly", exact}});
}

// 2 ---------------------------------------------------------------------------------

Outcome delta_transformation() {
  Rng rng(1002);
  Bound law{"max relative error", 1e-9};
  double min_abs = INFINITY;
  for (int n = 1; n <= 4; ++n) {
    for (int k = 0; k <= n; ++k) {
      for (int i = 0; i < 500; ++i) {
        const LagFramePair pair = rng.frame_pair(n, k);
        auto [g1, g2] = rng.glkd(n, k);
        const cplx before = delta(pair);
        const cplx after = delta(act_pair(pair, g1, g2));
        min_abs = std::min({min_abs, std::abs(before), std::abs(after)});
        law.add(rel_err(after, before * std::conj(det_D(g1, k)) * det_D(g2, k)));
      }
    }
  }
  Outcome o = combine({&law}, {{"|delta| > 1e-12 on all pairs", min_abs > 1e-12}});
  o.detail += " (7000 draws over 14 (n, k))";
  return o;
}

// 3 ---------------------------------------------------------------------------------

Outcome phi_bijection() {
  Rng rng(1003);
  Bound frames{"max |phi_inv(phi(X)) - X|", 1e-10};
  Bound ball{"max |phi(phi_inv(W, C)) - (W, C)|", 1e-10};
  for (int i = 0; i < 1000; ++i) {
    const int n = rng.integer(1, 4);
    const LagFrame x = rng.positive_frame(n);
    const BallChart c = phi(x);
    const LagFrame y = phi_inv(c.W, c.C);
    frames.add(std::max(max_abs_diff(x.U, y.U), max_abs_diff(x.V, y.V)));

    const CMat W = rng.ball(n), C = rng.invertible(n);
    const BallChart d = phi(phi_inv(BallPoint(W), GlElement(C)));
    ball.add(std::max(max_abs_diff(d.W.matrix(), W), max_abs_diff(d.C.matrix(), C)));
  }
  const BallChart anchor = phi(validate_lagrangian(CMat::Constant(1, 1, 1.0), CMat::Constant(1, 1, I_unit)));
  const bool exact = std::abs(anchor.W.matrix()(0, 0)) < 1e-12 && std::abs(anchor.C.matrix()(0, 0) - 2.0) < 1e-12;
  return combine({&frames, &ball}, {{"phi(1, i) = (0, 2)", exact}});
}

// 4 ---------------------------------------------------------------------------------

Outcome alpha_cocycle() {
  Rng rng(1004);
  Bound cocycle{"max |alpha(gh, W) - alpha(g, hW) alpha(h, W)| (relative)", 1e-8};
  bool projects = true, deck = true;
  for (int i = 0; i < 300; ++i) {
    const int n = rng.integer(1, 3);
    const SpElement g = rng.sp(n), h = rng.sp(n);
    const BallPoint W(rng.ball(n));
    const BallChart hw = alpha(h, W);
    const CMat lhs = alpha(sp_mul(g, h), W).C.matrix();
    const CMat rhs = alpha(g, hw.W).C.matrix() * hw.C.matrix();
    cocycle.add(max_abs_diff(lhs, rhs) / std::max(1.0, max_abs(rhs)));

    const MpElement gt = rng.coin() ? mp_lift(g).first : mp_lift(g).second;
    const MlElement at = alpha_tilde(gt, W);
    projects = projects && at.matrix() == alpha(g, W).C.matrix();
    const MlElement ad = alpha_tilde(mp_deck(gt), W);
    const MlElement right = ml_mul(at, MlElement(CMat::Identity(n, n), -1.0));
    deck = deck && ad.matrix() == right.matrix() && std::abs(ad.z() - right.z()) < 1e-12 * std::abs(ad.z());
  }
  return combine({&cocycle}, {{"alpha-tilde projects to alpha", projects}, {"deck acts as (I, -1)", deck}});
}

// 5 ---------------------------------------------------------------------------------

Outcome gamma_checks() {
  Rng rng(1005);
  Bound square{"max |Gamma^2 - det| / |det|", 1e-9};
  Bound route{"two-route difference", 1e-8};
  for (int i = 0; i < 1000; ++i) {
    const int n = rng.integer(1, 4);
    const CMat W1 = rng.ball(n), W2 = rng.ball(n);
    const cplx g = gamma(BallPoint(W1), BallPoint(W2));
    const CMat one = CMat::Identity(n, n);
    const CMat P = W2.adjoint() * W1;
    square.add(rel_err(g * g, det(0.5 * (one - P))));
    const double c = rng.uniform(0.1, 0.9);
    const cplx mid = continue_sqrt([&](double t) { return det(0.5 * (one - (c * t) * P)); }, gamma_anchor(n));
    const cplx two = continue_sqrt([&](double t) { return det(0.5 * (one - (c + (1 - c) * t) * P)); }, mid);
    route.add(rel_err(two, g));
  }
  bool anchor = true;
  for (int n = 1; n <= 4; ++n) {
    anchor = anchor && std::abs(gamma(BallPoint::zero(n), BallPoint::zero(n)) - std::pow(2.0, -0.5 * n)) < 1e-15;
  }
  const VerificationReport r = run_scenario(builtin_scenario("abstract_k1_nonorientable"), {{"delta_D"}, {}, 1});
  const bool flagged = r.constants.count("delta_D.gamma_normalization") && r.constants.count("delta_D.gamma_anchor");
  return combine({&square, &route}, {{"Gamma(0, 0) = 2^{-n/2}", anchor}, {"normalization flagged in report", flagged}});
}

// 6 ---------------------------------------------------------------------------------

Outcome main_pipeline() {
  Bound glue{"max induced gluing residual", 1e-9};
  Outcome o;
  bool enumeration = true;
  std::string counts;
  for (const auto& [name, expected] : {std::pair<const char*, std::size_t>{"circle_mobius", 2}, {"torus_grid", 4}}) {
    const Scenario s = builtin_scenario(name);
    const LiftEnumeration lifts = enumerate_lifts(s.nerve, *lift_double_cover(s.nerve, *s.cocycle).lift);
    enumeration = enumeration && lifts.classes.size() == expected;
    counts += std::string(counts.empty() ? "" : ", ") + name + " " + std::to_string(lifts.classes.size()) + " lift classes";
    for (const PairCase& p : s.pairs) {
      const Cocycle<CMat> g1 = map_cocycle(p.data.pair_cocycle, GroupKind::Gl, [](const GlPair& x) { return x.g1; });
      const Cocycle<MlElement> z1 = p.ml_lift ? *p.ml_lift : *lift_double_cover(s.nerve, g1).lift;
      const NormalizedPairData norm = normalize_sections(s.nerve, p.data);
      const Cocycle<MlElement> z2 = induce_compatible(s.nerve, norm, z1);
      const DeltaTildeData t = build_delta_tilde(s.nerve, norm, z1, z2, 6, 20);
      glue.add(t.overlap_residual);
      const UniquenessEnumeration e = enumerate_uniqueness(s.nerve, z1, z2);
      enumeration = enumeration && e.glued == e.equivalent && e.mismatches == 0 && e.glued_inequivalent == 0 &&
                    e.min_failed_residual >= 1.0 - 1e-6;
      counts += "; " + p.name + " " + std::to_string(e.glued) + "/" + std::to_string(e.patterns) + " glue, all equivalent";
    }
  }
  o = combine({&glue}, {{"exactly the induced class glues; lift counts 2 and 4", enumeration}});
  o.detail += " (" + counts + ")";
  return o;
}

// 7 ---------------------------------------------------------------------------------

Outcome self_compatibility() {
  const Scenario s = builtin_scenario("trivial_r2");
  Bound square{"max |dt^2 - delta|", 1e-9};
  bool eps0 = false, eps1 = false, positive = true;
  for (const PairCase& p : s.pairs) {
    if (!p.self_compat) continue;
    const Cocycle<CMat> g1 = map_cocycle(p.data.pair_cocycle, GroupKind::Gl, [](const GlPair& x) { return x.g1; });
    const Cocycle<MlElement> z1 = p.ml_lift ? *p.ml_lift : *lift_double_cover(s.nerve, g1).lift;
    const SelfCompatResult r = self_compat(s.nerve, p.data, z1, 7, 50);
    square.add(r.delta_tilde.square_residual);
    (r.epsilon == 0 ? eps0 : eps1) = true;
    positive = positive && r.normalized_min_real > 0.0 && r.normalized_max_imag < 1e-9;
  }
  // On equal meta-frame pairs the Ball-side value is positive real.
  Rng rng(1007);
  for (int i = 0; i < 100; ++i) {
    const int n = rng.integer(1, 4);
    const CMat C = rng.invertible(n);
    const MetaLagFrame X{BallPoint(rng.ball(n)), MlElement(C, std::sqrt(det(C)))};
    const cplx v = delta_L_tilde(X, X, 0);
    positive = positive && v.real() > 0.0 && std::abs(v.imag()) < 1e-9 * v.real();
  }
  return combine({&square}, {{"epsilon 0 and 1 both exercised", eps0 && eps1}, {"normalized value positive real", positive}});
}

// 8 ---------------------------------------------------------------------------------

Outcome recipe_checks() {
  Bound projection{"max |rho(Ntilde) - N|", 1e-10};
  bool cocycles = true, coboundary = true;
  int scenarios = 0;
  for (const std::string& name : builtin_names()) {
    const Scenario s = builtin_scenario(name);
    if (!s.mp || !s.sections) continue;
    ++scenarios;
    for (const FrameSectionData* f : {&s.sections->first, &s.sections->second}) {
      const RecipeResult base = recipe(s.nerve, *s.mp, *f, no_flips(s.nerve));
      projection.add(base.projection_residual);
      cocycles = cocycles && base.cocycle.pass;
      for (int c = 0; c < s.nerve.chart_count(); ++c) {
        std::vector<std::uint8_t> flips = no_flips(s.nerve);
        flips[c] = 1;
        const RecipeResult moved = recipe(s.nerve, *s.mp, *f, flips);
        cocycles = cocycles && moved.cocycle.pass;
        coboundary = coboundary && lifts_equivalent(s.nerve, base.Ntilde, moved.Ntilde).has_value();
      }
    }
  }
  Outcome o = combine({&projection}, {{"Ntilde is an Ml cocycle", cocycles}, {"sheet changes are coboundaries", coboundary}});
  o.detail += " (" + std::to_string(scenarios) + " scenarios)";
  return o;
}

// 9 ---------------------------------------------------------------------------------

Outcome delta_D_checks() {
  const Scenario s = builtin_scenario("abstract_k1_nonorientable");
  Bound glue{"gluing", 1e-8};
  Bound square{"square", 1e-9};
  Bound sign{"restriction vs pair pairing", 1e-9};
  Bound invariance{"random Sp_k invariance", 1e-8};
  const CrossCheckResult c = cross_check(s.nerve, *s.mp, s.sections->first, s.sections->second, no_flips(s.nerve),
                                         no_flips(s.nerve), 9);
  glue.add(c.delta_D.gluing_residual);
  glue.add(c.delta_D.invariance_residual);
  square.add(c.delta_D.square_residual);
  sign.add(c.sign_residual);
  const bool negative = c.delta_D.negative_samples > 0;

  // Both connected components of Sp_k acting on D-adapted meta-frames.
  Rng rng(1009);
  bool both = false, neg_seen = false, pos_seen = false;
  for (int i = 0; i < 200; ++i) {
    const int n = rng.integer(2, 4), k = rng.integer(1, n - 1), r = n - k;
    RMat A_g = rng.invertible_real(k);
    if ((A_g.determinant() < 0) != (i % 2 == 0)) A_g.row(0) *= -1.0;
    (A_g.determinant() < 0 ? neg_seen : pos_seen) = true;
    const SpElement g = make_spk(A_g, 0.5 * rng.real(k, r), 0.5 * rng.symmetric(n), rng.sp(r));
    const MpElement gt = rng.coin() ? mp_lift(g).first : mp_lift(g).second;
    const RMat A = rng.invertible_real(k);
    auto frame = [&]() {
      CMat W = CMat::Zero(n, n), C = CMat::Zero(n, n);
      W.topLeftCorner(k, k) = CMat::Identity(k, k);
      W.bottomRightCorner(r, r) = rng.ball(r, 0.9);
      C.topLeftCorner(k, k) = A.cast<cplx>();
      C.topRightCorner(k, r) = rng.cmat(k, r);
      C.bottomRightCorner(r, r) = rng.invertible(r);
      return MetaLagFrame{BallPoint(W), MlElement(C, std::sqrt(det(C)))};
    };
    const MetaLagFrame X1 = frame(), X2 = frame();
    const cplx before = delta_L_tilde(X1, X2, k);
    const cplx after = delta_L_tilde(meta_act(gt, X1), meta_act(gt, X2), k);
    invariance.add(rel_err(after, before));
  }
  both = neg_seen && pos_seen;
  Outcome o = combine({&glue, &square, &sign, &invariance},
                      {{"det A_g < 0 transitions present", negative}, {"both Sp_k components drawn", both},
                       {"single global sign", std::abs(c.global_sign) == 1}});
  o.detail += " (global sign " + std::to_string(c.global_sign) + ")";
  return o;
}

// 10 --------------------------------------------------------------------------------

Outcome obstruction() {
  const Scenario s = builtin_scenario("sphere_octa");
  const LiftResult r = lift_double_cover(s.nerve, *s.cocycle);
  const bool infeasible = r.obstruction && !z2_coboundary_solve(s.nerve, *r.obstruction);
  SignCochain trivial{2, std::vector<std::int8_t>(s.nerve.triple_point_count(), 1)};
  const bool feasible = z2_coboundary_solve(s.nerve, trivial).has_value();
  return combine({}, {{"defect class infeasible", infeasible && !r.lift}, {"trivial cochain feasible", feasible}});
}

// 11 --------------------------------------------------------------------------------

Outcome densities() {
  Rng rng(1011);
  Bound half_density{"half-density change", 1e-9};
  Bound half_form{"half-form change", 1e-9};
  for (int i = 0; i < 200; ++i) {
    const int n = rng.integer(1, 3), k = rng.integer(0, n);
    const SymplecticModel model = SymplecticModel::standard(n);
    DensityInput in;
    in.pair = rng.frame_pair(n, k);
    in.prequantum = rng.complex();
    in.nu1 = rng.complex();
    in.nu2 = rng.complex();
    in.lifts = rng.cmat(2 * n, 2 * n - k);
    auto [g1, g2] = rng.glkd(n, k);
    DensityInput moved = in;
    moved.pair = act_pair(in.pair, g1, g2);
    moved.nu1 = in.nu1 / std::sqrt(std::abs(det(g1)));
    moved.nu2 = in.nu2 / std::sqrt(std::abs(det(g2)));
    half_density.add(rel_err(pairing_density(moved, model), pairing_density(in, model)));
  }
  for (int i = 0; i < 200; ++i) {
    const int n = rng.integer(1, 3), k = rng.integer(0, n);
    const SymplecticModel model = SymplecticModel::standard(n);
    DensityInput in;
    in.mode = DensityMode::HalfForm;
    in.pair = rng.frame_pair(n, k);
    in.nu1 = rng.complex();
    in.nu2 = rng.complex();
    in.lifts = rng.cmat(2 * n, 2 * n - k);
    in.delta_tilde = std::sqrt(delta(in.pair));
    auto [h1, h2] = rng.mlkd(n, k);
    DensityInput moved = in;
    moved.pair = act_pair(in.pair, h1.matrix(), h2.matrix());
    moved.nu1 = in.nu1 / h1.z();
    moved.nu2 = in.nu2 / h2.z();
    const double absA = k == 0 ? 1.0 : std::abs(det(h1.matrix().topLeftCorner(k, k)));
    moved.delta_tilde = *in.delta_tilde * std::conj(h1.z()) * h2.z() / absA;
    half_form.add(rel_err(pairing_density(moved, model), pairing_density(in, model)));
  }
  return combine({&half_density, &half_form});
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Ml group laws", group_laws},
      {"delta_k transformation law", delta_transformation},
      {"Phi bijection", phi_bijection},
      {"alpha cocycle and alpha-tilde", alpha_cocycle},
      {"Gamma", gamma_checks},
      {"induced lifts glue uniquely", main_pipeline},
      {"self-compatibility", self_compatibility},
      {"transition-function recipe", recipe_checks},
      {"delta-tilde_D", delta_D_checks},
      {"lift obstruction", obstruction},
      {"pointwise densities", densities},
  };
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s %s\n", i + 1, criteria[i].first, o.detail.c_str(), o.pass ? "PASS" : "FAIL");
    std::fflush(stdout);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria failed (%.1f s)\n", failed, criteria.size(), secs);
  return failed == 0 ? 0 : 1;
}
