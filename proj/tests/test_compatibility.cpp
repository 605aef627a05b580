#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hfe/compatibility.hpp"
#include "hfe/corpus.hpp"
#include "support.hpp"

using namespace hfe;
using namespace hfe::testing;

namespace {

CMat scalar(cplx x) { return CMat::Constant(1, 1, x); }

GlPair glpair(cplx a, cplx b) { return {scalar(a), scalar(b)}; }

std::vector<std::vector<cplx>> chart_values(const Nerve& nv, const std::vector<cplx>& per_chart) {
  std::vector<std::vector<cplx>> out;
  for (std::size_t c = 0; c < nv.charts.size(); ++c) out.emplace_back(nv.charts[c].points.size(), per_chart[c]);
  return out;
}

/// Circle data with g1 = -1 on the second component; delta is 1 on chart 0
/// and `d1` on chart 1, so g2 = d1 / conj(g1).
PolarizationPairData circle_pair(cplx d1) {
  const Nerve nv = circle_nerve();
  PolarizationPairData d;
  d.pair_cocycle = constant_cocycle<GlPair>(nv, GroupKind::Glkd, 1, {{glpair(1.0, d1), glpair(-1.0, -d1)}});
  d.delta_samples = chart_values(nv, {1.0, d1});
  return d;
}

Cocycle<MlElement> first_lift(const Nerve& nv, const PolarizationPairData& d) {
  const Cocycle<CMat> g1 = map_cocycle(d.pair_cocycle, GroupKind::Gl, [](const GlPair& p) { return p.g1; });
  return *lift_double_cover(nv, g1).lift;
}

}  // namespace

TEST_CASE("check_pair_data accepts consistent data and locates violations") {
  const Nerve nv = circle_nerve();
  const PolarizationPairData d = circle_pair(2.0);
  const PairDataCheck ok = check_pair_data(nv, d);
  CHECK(ok.pass);
  CHECK(ok.transform_residual < 1e-15);

  PolarizationPairData bad = d;
  bad.delta_samples[1][0] = 3.0;  // point 3, on the overlap
  const PairDataCheck r = check_pair_data(nv, bad);
  CHECK_FALSE(r.pass);
  REQUIRE_FALSE(r.failures.empty());
  CHECK(r.failures[0].find("point 3") != std::string::npos);

  PolarizationPairData zero = d;
  zero.delta_samples[0][1] = 0.0;
  CHECK_FALSE(check_pair_data(nv, zero).pass);
}

TEST_CASE("normalize_sections") {
  const Nerve single = make_nerve(3, {{0, 1, 2}}, {});
  PolarizationPairData one;
  one.pair_cocycle.group = GroupKind::Glkd;
  one.pair_cocycle.n = 1;
  one.delta_samples = chart_values(single, {1.0});
  const NormalizedPairData n1 = normalize_sections(single, one);
  CHECK(n1.data.delta_samples[0][2] == cplx(1.0));
  CHECK(n1.zeta[0][0] == cplx(1.0));

  PolarizationPairData two = one;
  two.delta_samples = chart_values(single, {2.0});
  const NormalizedPairData n2 = normalize_sections(single, two);
  for (cplx v : n2.data.delta_samples[0]) CHECK(std::abs(v - 1.0) < 1e-15);
  CHECK(std::abs(n2.zeta[0][1] - std::sqrt(2.0)) < 1e-15);

  const Nerve nv = circle_nerve();
  const NormalizedPairData nc = normalize_sections(nv, circle_pair(2.0));
  CHECK(nc.max_delta_residual < 1e-15);
  CHECK(check_pair_data(nv, nc.data).pass);
  // On the normalized data the second cocycle is 1 / conj(g1).
  CHECK(std::abs(nc.data.pair_cocycle.values[0][1][0].g2(0, 0) + 1.0) < 1e-12);
}

TEST_CASE("induce_compatible") {
  const Nerve nv = circle_nerve();
  const NormalizedPairData id = normalize_sections(nv, circle_pair(1.0));
  const Cocycle<MlElement> z1 = first_lift(nv, circle_pair(1.0));
  const Cocycle<MlElement> z2 = induce_compatible(nv, id, z1);
  CHECK(z2.values[0][0][0].z() == cplx(1.0));
  // z2 = 1 / conj(z1) with z1 = +-i on the twisted component.
  const cplx a = z1.values[0][1][0].z();
  CHECK(std::abs(std::abs(a.imag()) - 1.0) < 1e-15);
  CHECK(std::abs(z2.values[0][1][0].z() - a) < 1e-15);

  // Projection mismatch: z1 of a different cocycle.
  Cocycle<MlElement> wrong = z1;
  wrong.values[0][0][0] = MlElement(scalar(4.0), 2.0);
  CHECK_THROWS_AS(induce_compatible(nv, id, wrong), DomainError);

  // g1 = g2 = e^{i theta}: z2 = 1 / conj(z1) again squares to e^{i theta}.
  const double theta = 0.7;
  const cplx e = std::polar(1.0, theta);
  PolarizationPairData ph;
  ph.pair_cocycle = constant_cocycle<GlPair>(nv, GroupKind::Glkd, 1, {{glpair(e, e), glpair(1.0, 1.0)}});
  ph.delta_samples = chart_values(nv, {1.0, 1.0});
  const NormalizedPairData nph = normalize_sections(nv, ph);
  const Cocycle<MlElement> zp = induce_compatible(nv, nph, first_lift(nv, ph));
  const cplx z = zp.values[0][0][0].z();
  CHECK(std::abs(z * z - e) < 1e-12);
}

TEST_CASE("build_delta_tilde glues only the induced lift") {
  const Nerve nv = circle_nerve();
  const PolarizationPairData d = circle_pair(2.0);
  const NormalizedPairData norm = normalize_sections(nv, d);
  const Cocycle<MlElement> z1 = first_lift(nv, d);
  const Cocycle<MlElement> z2 = induce_compatible(nv, norm, z1);
  const DeltaTildeData t = build_delta_tilde(nv, norm, z1, z2, 7, 50);
  CHECK(t.glued);
  CHECK(t.overlap_residual < 1e-9);
  CHECK(t.square_residual < 1e-9);
  CHECK(t.equivariance_residual < 1e-9);
  // The square is the original delta: 1 on chart 0, 2 on chart 1.
  CHECK(std::abs(t.base[0][0] * t.base[0][0] - 1.0) < 1e-12);
  CHECK(std::abs(t.base[1][3] * t.base[1][3] - 2.0) < 1e-12);

  const Cocycle<MlElement> flipped = apply_flips(z2, nv, {0, 1});
  const DeltaTildeData f = build_delta_tilde(nv, norm, z1, flipped, 7, 10);
  CHECK_FALSE(f.glued);
  CHECK(f.overlap_residual == doctest::Approx(2.0));
  CHECK_FALSE(f.overlap_failures.empty());

  const UniquenessEnumeration e = enumerate_uniqueness(nv, z1, z2);
  CHECK(e.patterns == 4);
  CHECK(e.glued == 2);
  CHECK(e.equivalent == 2);
  CHECK(e.mismatches == 0);
  CHECK(e.min_failed_residual >= 1.0 - 1e-6);
}

TEST_CASE("verify_uniqueness witnesses") {
  const Nerve nv = circle_nerve();
  const PolarizationPairData d = circle_pair(1.0);
  const NormalizedPairData norm = normalize_sections(nv, d);
  const Cocycle<MlElement> z1 = first_lift(nv, d);
  const Cocycle<MlElement> z2 = induce_compatible(nv, norm, z1);

  const UniquenessResult same = verify_uniqueness(nv, norm, z1, z2, z2);
  REQUIRE(same.witness);
  CHECK((*same.witness)[0] == (*same.witness)[1]);

  const UniquenessResult neg = verify_uniqueness(nv, norm, z1, z2, apply_flips(z2, nv, {1, 1}));
  CHECK(neg.first_glues);
  CHECK(neg.second_glues);
  REQUIRE(neg.witness);
  CHECK((*neg.witness)[0] == -(*neg.witness)[1]);
  CHECK_FALSE(neg.falsified);

  CHECK_THROWS_AS(verify_uniqueness(nv, norm, z1, z2, apply_flips(z2, nv, {1, 0})), DomainError);
}

TEST_CASE("evaluate follows the Ml_k^2 rule") {
  DeltaTildeData d;
  d.k = 1;
  d.base = {{cplx(2.0, 1.0)}};
  Rng rng(131);
  auto [h1, h2] = rng.mlkd(3, 1);
  const double absA = std::abs(h1.matrix()(0, 0).real());
  CHECK(rel_err(evaluate(d, 0, 0, {h1, h2}), cplx(2.0, 1.0) * std::conj(h1.z()) * h2.z() / absA) < 1e-15);

  for (std::uint64_t seed = 1; seed < 20; ++seed) {
    const MlPair p = random_mlkd(4, 2, seed);
    CHECK(classify_mlkd(p.z1, p.z2, 2).member());
  }
}

TEST_CASE("self-compatibility on the trivial scenario") {
  const Scenario s = builtin_scenario("trivial_r2");
  // Oracles: det(-i omega(conj u, v)) written out for n = 1.
  auto oracle = [](cplx u1, cplx v1, cplx u2, cplx v2) { return -I_unit * (std::conj(u1) * v2 - std::conj(v1) * u2); };
  for (const PairCase& p : s.pairs) {
    if (p.name == "diagonal_positive") CHECK(std::abs(p.data.delta_samples[0][0] - oracle(1, I_unit, 1, I_unit)) < 1e-15);
    if (p.name == "diagonal_negative") CHECK(std::abs(p.data.delta_samples[0][0] - oracle(1, -I_unit, 1, -I_unit)) < 1e-15);
    if (p.name == "horizontal") CHECK(p.data.delta_samples[0][0] == cplx(1.0));
    if (!p.self_compat) continue;
    const Cocycle<MlElement> z1 = p.ml_lift ? *p.ml_lift : first_lift(s.nerve, p.data);
    const SelfCompatResult r = self_compat(s.nerve, p.data, z1, 3, 20);
    const cplx dl = p.data.delta_samples[0][0];
    CHECK(r.epsilon == (dl.real() < 0 ? 1 : 0));
    CHECK(r.delta_tilde.square_residual < 1e-9);
    CHECK(r.normalized_min_real > 0.0);
    CHECK(r.normalized_max_imag < 1e-12);
  }

  // Real polarization with k = n: delta = 1, epsilon = 0, delta-tilde = 1.
  const Nerve single = make_nerve(2, {{0, 1}}, {});
  PolarizationPairData real;
  real.pair_cocycle.group = GroupKind::Glkd;
  real.pair_cocycle.n = 1;
  real.pair_cocycle.k = 1;
  const LagFrame u = validate_lagrangian(scalar(1.0), scalar(0.0));
  real.delta_samples = chart_values(single, {delta(make_frame_pair(u, u, 1))});
  Cocycle<MlElement> none;
  none.group = GroupKind::Ml;
  none.n = 1;
  const SelfCompatResult r = self_compat(single, real, none, 3, 5);
  CHECK(r.epsilon == 0);
  CHECK(r.delta_tilde.base[0][1] == cplx(1.0));

  PolarizationPairData complex_delta = real;
  complex_delta.delta_samples[0][0] = I_unit;
  CHECK_THROWS_AS(self_compat(single, complex_delta, none, 3, 5), DomainError);
}
