#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hfe/corpus.hpp"
#include "hfe/metaplectic_induction.hpp"
#include "support.hpp"

using namespace hfe;
using namespace hfe::testing;

namespace {

CMat scalar(cplx x) { return CMat::Constant(1, 1, x); }

FrameSectionData constant_sections(const Nerve& nv, const LagFrame& f) {
  FrameSectionData s;
  for (const Chart& c : nv.charts) s.sigma.emplace_back(c.points.size(), f);
  return s;
}

MetaplecticBundleData bundle(const Nerve& nv, const std::vector<std::vector<MpElement>>& per_component,
                             int n, int k = 0, bool d_adapted = false) {
  MetaplecticBundleData d;
  d.mp = constant_cocycle<MpElement>(nv, GroupKind::Mp, n, per_component, k);
  d.k = k;
  d.d_adapted = d_adapted;
  return d;
}

MpElement quarter_turn() {
  return MpElement(sp_rotation({std::numbers::pi / 2}), std::polar(1.0, std::numbers::pi / 4));
}

std::vector<std::uint8_t> no_flips(const Nerve& nv) { return std::vector<std::uint8_t>(nv.charts.size(), 0); }

}  // namespace

TEST_CASE("check_bundle detects a wrong sheet at a triple point") {
  const Nerve tri = triple_nerve();
  const MpElement q = quarter_turn();
  const MpElement half = mp_mul(q, q);
  const BundleCheck ok = check_bundle(tri, bundle(tri, {{q}, {q}, {half}}, 1));
  CHECK(ok.pass);
  const BundleCheck bad = check_bundle(tri, bundle(tri, {{q}, {q}, {mp_deck(half)}}, 1));
  CHECK(bad.sp.pass);
  CHECK_FALSE(bad.mp.pass);
  CHECK_FALSE(bad.pass);

  // D-adapted data must lie in Mp_k.
  const BundleCheck not_spk = check_bundle(tri, bundle(tri, {{q}, {q}, {half}}, 1, 1, true));
  CHECK(not_spk.spk_violations > 0);
  CHECK_FALSE(not_spk.pass);
}

TEST_CASE("lift_sections negates flipped charts") {
  const Nerve nv = circle_nerve();
  const LagFrame f = phi_inv(BallPoint::zero(1), GlElement(scalar(cplx(0.0, 2.0))));
  const auto plain = lift_sections(nv, constant_sections(nv, f), no_flips(nv));
  const auto flipped = lift_sections(nv, constant_sections(nv, f), {0, 1});
  CHECK(std::abs(plain[0][0].C.z() - std::sqrt(cplx(0.0, 2.0))) < 1e-15);
  CHECK(flipped[0][2].C.z() == plain[0][2].C.z());
  CHECK(flipped[1][2].C.z() == -plain[1][2].C.z());
}

TEST_CASE("recipe on small nerves") {
  const Nerve single = make_nerve(2, {{0, 1}}, {});
  const LagFrame base = phi_inv(BallPoint::zero(1), GlElement::identity(1));
  MetaplecticBundleData none;
  none.mp.group = GroupKind::Mp;
  none.mp.n = 1;
  const RecipeResult empty = recipe(single, none, constant_sections(single, base), no_flips(single));
  CHECK(empty.Ntilde.values.empty());

  const Nerve nv = circle_nerve();
  const MpElement e = MpElement::identity(1);
  const RecipeResult id = recipe(nv, bundle(nv, {{e, e}}, 1), constant_sections(nv, base), no_flips(nv));
  for (const auto& comp : id.Ntilde.values[0])
    for (const MlElement& x : comp) {
      CHECK(max_abs_diff(x.matrix(), CMat::Identity(1, 1)) < 1e-15);
      CHECK(std::abs(x.z() - 1.0) < 1e-15);
    }

  // g = rotation by pi/2 sends (1/2, i/2) to (i/2, -1/2) = sigma i, so N = i,
  // and Ntilde carries the anchor e^{i pi/4} of the quarter turn.
  const RecipeResult r = recipe(nv, bundle(nv, {{e, quarter_turn()}}, 1), constant_sections(nv, base), no_flips(nv));
  const MlElement& t = r.Ntilde.values[0][1][0];
  CHECK(std::abs(r.N.values[0][1][0](0, 0) - I_unit) < 1e-15);
  CHECK(std::abs(t.matrix()(0, 0) - I_unit) < 1e-15);
  CHECK(std::abs(t.z() - std::polar(1.0, std::numbers::pi / 4)) < 1e-12);
  CHECK(r.projection_residual < 1e-15);
  CHECK(r.cocycle.pass);

  // Sections not related by the transitions.
  FrameSectionData off = constant_sections(nv, base);
  off.sigma[1][0] = validate_lagrangian(scalar(1.0), scalar(0.0));
  CHECK_THROWS_AS(recipe(nv, bundle(nv, {{e, e}}, 1), off, no_flips(nv)), DomainError);
}

TEST_CASE("sheet choices change Ntilde by a coboundary") {
  for (const char* name : {"circle_mobius", "torus_grid", "abstract_k1_nonorientable"}) {
    CAPTURE(name);
    const Scenario s = builtin_scenario(name);
    REQUIRE(s.mp);
    REQUIRE(s.sections);
    const RecipeResult a = recipe(s.nerve, *s.mp, s.sections->first, no_flips(s.nerve));
    std::vector<std::uint8_t> flips = no_flips(s.nerve);
    flips.back() = 1;
    const RecipeResult b = recipe(s.nerve, *s.mp, s.sections->first, flips);
    CHECK(a.projection_residual < 1e-10);
    CHECK(a.cocycle.pass);
    CHECK(b.cocycle.pass);
    const auto w = lifts_equivalent(s.nerve, a.Ntilde, b.Ntilde);
    REQUIRE(w);
    CHECK((*w).front() == -(*w).back());
  }
}

TEST_CASE("reduce_D_adapted block data") {
  const LagFrame real = validate_lagrangian(CMat(2.0 * CMat::Identity(2, 2)), CMat::Zero(2, 2));
  const ReducedFrame all = reduce_D_adapted(real, 2);
  CHECK_FALSE(all.reduced);
  CHECK(all.blocks.A(1, 1) == 2.0);
  CHECK(all.reduced_positive);

  const LagFrame pos = phi_inv(BallPoint::zero(2), GlElement::identity(2));
  const ReducedFrame none = reduce_D_adapted(pos, 0);
  REQUIRE(none.reduced);
  CHECK(max_abs_diff(none.reduced->U, pos.U) == 0.0);
  CHECK(none.positive);

  CMat V = CMat::Zero(2, 2);
  V(1, 1) = I_unit;
  const ReducedFrame r = reduce_D_adapted(validate_lagrangian(CMat::Identity(2, 2), V), 1);
  REQUIRE(r.reduced);
  CHECK(r.blocks.A(0, 0) == 1.0);
  CHECK(r.reduced->U(0, 0) == cplx(1.0));
  CHECK(r.reduced->V(0, 0) == I_unit);
  CHECK(r.reduced_positive);
  CHECK(r.positive);
}

TEST_CASE("delta-tilde_D on the non-orientable k = 1 scenario") {
  const Scenario s = builtin_scenario("abstract_k1_nonorientable");
  REQUIRE(s.mp);
  REQUIRE(s.sections);
  const BundleCheck bc = check_bundle(s.nerve, *s.mp);
  CHECK(bc.pass);
  CHECK(bc.negative_components > 0);

  const RecipeResult r1 = recipe(s.nerve, *s.mp, s.sections->first, no_flips(s.nerve));
  const RecipeResult r2 = recipe(s.nerve, *s.mp, s.sections->second, no_flips(s.nerve));
  const DeltaDResult d = build_delta_D_tilde(s.nerve, *s.mp, s.sections->first, s.sections->second, r1, r2, 5);
  CHECK(d.negative_samples > 0);
  CHECK(d.invariance_residual < 1e-8);
  CHECK(d.gluing_residual < 1e-8);
  CHECK(d.square_residual < 1e-9);
  CHECK(d.explicit_residual < 1e-9);
  CHECK(d.equivariance_residual < 1e-9);
  CHECK(d.restriction_residual < 1e-9);
  CHECK(d.failures.empty());

  // The other sheet of every transition moves both lifts together.
  MetaplecticBundleData other = *s.mp;
  for (auto& o : other.mp.values)
    for (auto& c : o)
      for (MpElement& g : c) g = mp_deck(g);
  const RecipeResult o1 = recipe(s.nerve, other, s.sections->first, no_flips(s.nerve));
  const RecipeResult o2 = recipe(s.nerve, other, s.sections->second, no_flips(s.nerve));
  const DeltaDResult od = build_delta_D_tilde(s.nerve, other, s.sections->first, s.sections->second, o1, o2, 5);
  CHECK(od.gluing_residual < 1e-8);

  // Negative control: one lift flipped on a component no longer glues.
  RecipeResult bad = r2;
  std::vector<std::uint8_t> flip(s.nerve.component_count(), 0);
  flip[0] = 1;
  bad.Ntilde = apply_flips(bad.Ntilde, s.nerve, flip);
  const DeltaDResult nd = build_delta_D_tilde(s.nerve, *s.mp, s.sections->first, s.sections->second, r1, bad, 5);
  CHECK(nd.gluing_residual > 1.0);
  CHECK_FALSE(nd.failures.empty());
}

TEST_CASE("delta-tilde_D is constant for constant data") {
  const Nerve nv = circle_nerve();
  const MpElement e = MpElement::identity(1);
  const MetaplecticBundleData d = bundle(nv, {{e, e}}, 1);
  const LagFrame a = phi_inv(BallPoint(scalar(0.2)), GlElement(scalar(1.5)));
  const LagFrame b = phi_inv(BallPoint(scalar(cplx(0.1, -0.3))), GlElement(scalar(cplx(0.5, 1.0))));
  const FrameSectionData s1 = constant_sections(nv, a), s2 = constant_sections(nv, b);
  const RecipeResult r1 = recipe(nv, d, s1, no_flips(nv));
  const RecipeResult r2 = recipe(nv, d, s2, no_flips(nv));
  const DeltaDResult t = build_delta_D_tilde(nv, d, s1, s2, r1, r2, 2, 5);
  for (const auto& chart : t.values)
    for (cplx v : chart) CHECK(std::abs(v - t.values[0][0]) < 1e-12);
  CHECK(std::abs(t.values[0][0] * t.values[0][0] - delta_L(a, b, 0)) < 1e-12);
}

TEST_CASE("cross_check agrees up to one sign") {
  for (const char* name : {"trivial_r2", "circle_mobius", "abstract_k1_nonorientable"}) {
    CAPTURE(name);
    const Scenario s = builtin_scenario(name);
    const std::vector<std::uint8_t> f0 = no_flips(s.nerve);
    std::vector<std::uint8_t> f1 = f0;
    f1.back() = 1;
    for (const auto& flips : {f0, f1}) {
      const CrossCheckResult c = cross_check(s.nerve, *s.mp, s.sections->first, s.sections->second, f0, flips, 9);
      CHECK(c.pair_check.pass);
      CHECK(c.delta_tilde.glued);
      CHECK(std::abs(c.global_sign) == 1);
      CHECK(c.sign_residual < 1e-9);
    }
  }
}
