#include "hfe/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace hfe {

using nlohmann::json;

const std::vector<std::string>& pipeline_order() {
  static const std::vector<std::string> order = {"validate",   "lift",        "induce",
                                                 "delta_tilde", "uniqueness", "self_compat",
                                                 "recipe",     "delta_D",     "cross_check"};
  return order;
}

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

int VerificationReport::exit_code() const {
  if (falsification) return 3;
  return pass() ? 0 : 1;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool applicable(const Scenario& s, const std::string& p) {
  if (p == "validate") return true;
  if (p == "lift") return s.cocycle.has_value() || !s.pairs.empty();
  if (p == "induce" || p == "delta_tilde" || p == "uniqueness") return !s.pairs.empty();
  if (p == "self_compat") {
    return std::any_of(s.pairs.begin(), s.pairs.end(), [](const PairCase& c) { return c.self_compat; });
  }
  return s.mp.has_value() && s.sections.has_value();
}

struct PairState {
  std::optional<Cocycle<MlElement>> z1;
  std::optional<NormalizedPairData> norm;
  std::optional<Cocycle<MlElement>> z2n;
  std::string error;
};

class Runner {
 public:
  Runner(const Scenario& s, VerificationReport& r) : s_(s), r_(r), tol_(r.tol), pairs_(s.pairs.size()) {}

  void run(const std::string& p) {
    if (p == "validate") validate();
    if (p == "lift") lift();
    if (p == "induce") induce();
    if (p == "delta_tilde") delta_tilde();
    if (p == "uniqueness") uniqueness();
    if (p == "self_compat") self_compat_pipeline();
    if (p == "recipe") recipe_pipeline();
    if (p == "delta_D") delta_D();
    if (p == "cross_check") cross_check_pipeline();
  }

 private:
  const Scenario& s_;
  VerificationReport& r_;
  const Tolerances tol_;
  std::vector<PairState> pairs_;
  std::optional<RecipeResult> r1_, r2_;
  std::string recipe_error_;

  void add(const std::string& id, const std::string& anchor, double residual, double threshold,
           bool extra = true, std::vector<Location> failures = {}) {
    CheckRecord c{id, anchor, residual, threshold, extra && residual <= threshold, std::move(failures)};
    r_.checks.push_back(std::move(c));
  }

  void fail(const std::string& id, const std::string& anchor, const std::string& why) {
    add(id, anchor, kInf, 0.0, false, {why});
  }

  template <class F>
  void guarded(const std::string& id, const std::string& anchor, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      fail(id, anchor, e.what());
    }
  }

  static double report_residual(const CocycleReport& c) { return std::max(c.max_residual, c.max_membership); }

  Cocycle<CMat> first_cocycle(const PairCase& pc) const {
    return map_cocycle(pc.data.pair_cocycle, GroupKind::Gl, [](const GlPair& g) { return g.g1; });
  }

  // Lift of the first cocycle and the induced, normalized second lift.
  PairState& induced(std::size_t i) {
    PairState& st = pairs_[i];
    if (st.z2n || !st.error.empty()) return st;
    const PairCase& pc = s_.pairs[i];
    try {
      if (pc.ml_lift) {
        st.z1 = *pc.ml_lift;
      } else {
        LiftResult lr = lift_double_cover(s_.nerve, first_cocycle(pc), tol_);
        if (!lr.lift) throw DomainError("the first cocycle admits no metalinear lift");
        st.z1 = std::move(*lr.lift);
      }
      st.z1->k = pc.k;
      st.norm = normalize_sections(s_.nerve, pc.data, tol_);
      st.z2n = induce_compatible(s_.nerve, *st.norm, *st.z1, tol_);
    } catch (const std::exception& e) {
      st.error = e.what();
    }
    return st;
  }

  void validate() {
    const Nerve& nv = s_.nerve;
    r_.constants["nerve.charts"] = nv.chart_count();
    r_.constants["nerve.points"] = nv.points.size();
    r_.constants["nerve.components"] = nv.component_count();
    r_.constants["nerve.triple_points"] = nv.triple_point_count();
    const bool contractible =
        std::all_of(nv.charts.begin(), nv.charts.end(), [](const Chart& c) { return c.contractible; }) &&
        std::all_of(nv.overlaps.begin(), nv.overlaps.end(), [](const Overlap& o) {
          return std::all_of(o.components.begin(), o.components.end(),
                             [](const OverlapComponent& q) { return q.contractible; });
        });
    r_.constants["nerve.contractible"] = contractible ? "asserted by the scenario, not verified"
                                                      : "some chart or component is marked non-contractible";
    if (s_.cocycle) {
      guarded("validate.cocycle", "t_ab t_bc = t_ac at triple points", [&] {
        const CocycleReport c = validate_cocycle(nv, *s_.cocycle, tol_);
        add("validate.cocycle", "t_ab t_bc = t_ac at triple points", report_residual(c), tol_.rel, c.pass, c.failures);
      });
    }
    for (const PairCase& pc : s_.pairs) {
      const std::string id = "validate." + pc.name;
      guarded(id + ".pair_cocycle", "(g1, g2) in Gl_k^2 and cocycle identity", [&] {
        const CocycleReport c = validate_cocycle(nv, pc.data.pair_cocycle, tol_);
        add(id + ".pair_cocycle", "(g1, g2) in Gl_k^2 and cocycle identity", report_residual(c), tol_.rel, c.pass,
            c.failures);
      });
      guarded(id + ".delta", "delta_b = delta_a conj(det D1) det D2, delta nonzero", [&] {
        const PairDataCheck c = check_pair_data(nv, pc.data, tol_);
        add(id + ".delta", "delta_b = delta_a conj(det D1) det D2, delta nonzero", c.transform_residual, tol_.rel,
            c.pass, c.failures);
        r_.constants[id + ".min_abs_delta"] = c.min_abs_delta;
      });
      if (pc.ml_lift) {
        guarded(id + ".ml_lift", "z^2 = det A and projection onto g1", [&] {
          const CocycleReport c = validate_cocycle(nv, *pc.ml_lift, tol_);
          double proj = 0.0;
          for (std::size_t o = 0; o < pc.ml_lift->values.size(); ++o)
            for (std::size_t q = 0; q < pc.ml_lift->values[o].size(); ++q)
              for (std::size_t t = 0; t < pc.ml_lift->values[o][q].size(); ++t)
                proj = std::max(proj, (pc.ml_lift->values[o][q][t].matrix() - pc.data.pair_cocycle.values[o][q][t].g1)
                                          .cwiseAbs()
                                          .maxCoeff());
          add(id + ".ml_lift", "z^2 = det A and projection onto g1", std::max(report_residual(c), proj), tol_.rel,
              c.pass, c.failures);
        });
      }
    }
    if (s_.mp) {
      guarded("validate.mp_cocycle", "Mp cocycle identity including the anchors", [&] {
        const BundleCheck b = check_bundle(nv, *s_.mp, tol_);
        std::vector<Location> f = b.sp.failures;
        f.insert(f.end(), b.mp.failures.begin(), b.mp.failures.end());
        add("validate.mp_cocycle", "Mp cocycle identity including the anchors",
            std::max(report_residual(b.sp), report_residual(b.mp)), tol_.rel, b.sp.pass && b.mp.pass, f);
        if (s_.mp->d_adapted) {
          add("validate.mp_cocycle.spk", "every transition in Mp_k", double(b.spk_violations), 0.0);
        }
        r_.constants["mp.negative_components"] = b.negative_components;
      });
    }
    if (s_.sections) {
      guarded("validate.sections", "positive Lagrangian frames in D-adapted block form", [&] {
        double iso = 0.0;
        std::vector<Location> f;
        const int k = s_.mp ? s_.mp->k : 0;
        for (const FrameSectionData* fam : {&s_.sections->first, &s_.sections->second})
          for (int c = 0; c < nv.chart_count(); ++c)
            for (std::size_t t = 0; t < fam->sigma[c].size(); ++t) {
              const LagFrame& x = fam->sigma[c][t];
              iso = std::max(iso, x.isotropy_residual);
              bool ok = x.positive;
              try {
                ok = ok && reduce_D_adapted(x, k, tol_).reduced_positive;
              } catch (const DomainError&) {
                ok = false;
              }
              if (!ok && f.size() < 20) {
                f.push_back("chart " + nv.charts[c].id + " point " + std::to_string(nv.charts[c].points[t]));
              }
            }
        add("validate.sections", "positive Lagrangian frames in D-adapted block form", iso, tol_.rel, f.empty(), f);
      });
    }
  }

  void lift() {
    const Nerve& nv = s_.nerve;
    const Cocycle<CMat> c = s_.cocycle ? *s_.cocycle : first_cocycle(s_.pairs.front());
    const std::string anchor = "square roots of det t_ab tracked along overlap components";
    guarded("lift", anchor, [&] {
      const LiftResult lr = lift_double_cover(nv, c, tol_);
      const auto defect_solution = z2_coboundary_solve(nv, lr.defect);
      if (lr.lift) {
        const CocycleReport rep = validate_cocycle(nv, *lr.lift, tol_);
        double proj = 0.0;
        for (std::size_t o = 0; o < c.values.size(); ++o)
          for (std::size_t q = 0; q < c.values[o].size(); ++q)
            for (std::size_t t = 0; t < c.values[o][q].size(); ++t)
              proj = std::max(proj, (lr.lift->values[o][q][t].matrix() - c.values[o][q][t]).cwiseAbs().maxCoeff());
        add("lift.cocycle", "lifted cocycle identity and exact projection", std::max(report_residual(rep), proj),
            tol_.rel, rep.pass, rep.failures);
        const LiftEnumeration e = enumerate_lifts(nv, *lr.lift, tol_);
        r_.constants["lift.patterns"] = e.patterns;
        r_.constants["lift.cocycles"] = e.cocycles;
        r_.constants["lift.classes"] = e.classes.size();
        const bool count_ok =
            !s_.expected.lift_classes || static_cast<int>(e.classes.size()) == *s_.expected.lift_classes;
        add("lift.classes", "inequivalent lifts found by exhaustive sign enumeration", 0.0, 0.0, count_ok,
            count_ok ? std::vector<Location>{}
                     : std::vector<Location>{"found " + std::to_string(e.classes.size()) + ", expected " +
                                             std::to_string(*s_.expected.lift_classes)});
      } else {
        r_.constants["lift.obstruction_points"] =
            std::count(lr.obstruction->values.begin(), lr.obstruction->values.end(), std::int8_t{-1});
        std::vector<Location> where;
        int idx = 0;
        for (const Triple& t : nv.triples)
          for (const TriplePoint& p : t.points) {
            if (lr.obstruction->values[static_cast<std::size_t>(idx++)] < 0 && where.size() < 20) {
              where.push_back("triple(" + std::to_string(t.a) + "," + std::to_string(t.b) + "," +
                              std::to_string(t.c) + ") point " + std::to_string(p.point));
            }
          }
        add("lift.obstruction", "sign defect not a coboundary over GF(2)", 0.0, 0.0, s_.expected.obstructed.value_or(false),
            where);
      }
      add("lift.soundness", "lift exists exactly when the defect is a coboundary", 0.0, 0.0,
          lr.lift.has_value() == defect_solution.has_value());
      SignCochain trivial;
      trivial.degree = 2;
      trivial.values.assign(static_cast<std::size_t>(nv.triple_point_count()), 1);
      add("lift.trivial_cochain", "trivial 2-cochain is a coboundary", 0.0, 0.0,
          z2_coboundary_solve(nv, trivial).has_value());
      if (s_.expected.obstructed && *s_.expected.obstructed && lr.lift) {
        add("lift.expected_obstruction", "scenario expects an obstruction", 0.0, 0.0, false);
      }
    });
  }

  void induce() {
    for (std::size_t i = 0; i < s_.pairs.size(); ++i) {
      const std::string id = "induce." + s_.pairs[i].name;
      const std::string anchor = "z2 = |det A| conj(z1)^{-1} is an Ml_k cocycle over g2";
      PairState& st = induced(i);
      if (!st.error.empty()) {
        fail(id, anchor, st.error);
        continue;
      }
      guarded(id, anchor, [&] {
        const CocycleReport rep = validate_cocycle(s_.nerve, *st.z2n, tol_);
        const Cocycle<MlElement> z2 = denormalize_lift(s_.nerve, *st.norm, *st.z2n, tol_);
        const CocycleReport rep2 = validate_cocycle(s_.nerve, z2, tol_);
        double proj = 0.0;
        const auto& pc = s_.pairs[i].data.pair_cocycle;
        for (std::size_t o = 0; o < pc.values.size(); ++o)
          for (std::size_t q = 0; q < pc.values[o].size(); ++q)
            for (std::size_t t = 0; t < pc.values[o][q].size(); ++t) {
              const CMat& g2 = pc.values[o][q][t].g2;
              proj = std::max(proj, (z2.values[o][q][t].matrix() - g2).cwiseAbs().maxCoeff() /
                                        std::max(1.0, g2.cwiseAbs().maxCoeff()));
            }
        std::vector<Location> f = rep.failures;
        f.insert(f.end(), rep2.failures.begin(), rep2.failures.end());
        add(id, anchor, std::max({report_residual(rep), report_residual(rep2), proj}), tol_.rel,
            rep.pass && rep2.pass, f);
        r_.constants[id + ".max_delta_normalization"] = st.norm->max_delta_residual;
      });
    }
  }

  void delta_tilde() {
    for (std::size_t i = 0; i < s_.pairs.size(); ++i) {
      const std::string id = "delta_tilde." + s_.pairs[i].name;
      PairState& st = induced(i);
      if (!st.error.empty()) {
        fail(id + ".gluing", "eps_b = eps_a conj(z1) z2 / |det A| on overlaps", st.error);
        continue;
      }
      guarded(id + ".gluing", "eps_b = eps_a conj(z1) z2 / |det A| on overlaps", [&] {
        const DeltaTildeData d =
            build_delta_tilde(s_.nerve, *st.norm, *st.z1, *st.z2n, r_.seed + 101 * i, 100, tol_);
        add(id + ".gluing", "eps_b = eps_a conj(z1) z2 / |det A| on overlaps", d.overlap_residual, tol_.rel, true,
            d.overlap_failures);
        add(id + ".square", "delta-tilde^2 = delta at every sample point", d.square_residual, tol_.rel);
        add(id + ".equivariance", "Ml_k^2 rule squares to the delta transformation law", d.equivariance_residual,
            tol_.rel);
        std::string signs;
        for (std::int8_t e : d.chart_signs) signs += e > 0 ? '+' : '-';
        r_.constants[id + ".chart_signs"] = signs;
        r_.constants[id + ".representative"] = "sign chosen with eps = + on chart " + s_.nerve.charts[0].id;
      });
    }
  }

  void uniqueness() {
    for (std::size_t i = 0; i < s_.pairs.size(); ++i) {
      const std::string id = "uniqueness." + s_.pairs[i].name;
      const std::string anchor = "a sign pattern glues exactly when it is equivalent to the induced lift";
      PairState& st = induced(i);
      if (!st.error.empty()) {
        fail(id, anchor, st.error);
        continue;
      }
      guarded(id, anchor, [&] {
        const UniquenessEnumeration e = enumerate_uniqueness(s_.nerve, *st.z1, *st.z2n, tol_);
        r_.constants[id + ".patterns"] = e.patterns;
        r_.constants[id + ".glued"] = e.glued;
        r_.constants[id + ".equivalent"] = e.equivalent;
        if (e.glued_inequivalent > 0) r_.falsification = true;
        add(id, anchor, e.max_glued_residual, tol_.rel, e.mismatches == 0 && e.glued == e.equivalent,
            e.mismatches ? std::vector<Location>{std::to_string(e.mismatches) + " mismatching patterns"}
                         : std::vector<Location>{});
        if (e.glued_inequivalent == 0 && s_.nerve.component_count() > 0) {
          // A chart-sign change of the induced lift must be recognised as equivalent.
          std::vector<std::uint8_t> bits(static_cast<std::size_t>(s_.nerve.component_count()), 0);
          for (int g = 0; g < s_.nerve.component_count(); ++g) {
            const Overlap& ov = s_.nerve.overlaps[s_.nerve.component_ref(g).overlap];
            bits[static_cast<std::size_t>(g)] = ov.a == 0 || ov.b == 0;
          }
          const auto w = verify_uniqueness(s_.nerve, *st.norm, *st.z1, *st.z2n,
                                           apply_flips(*st.z2n, s_.nerve, bits), tol_);
          if (w.falsified) r_.falsification = true;
          add(id + ".witness", "chart-sign change of the induced lift has a witness", 0.0, 0.0, !w.falsified);
        }
      });
    }
  }

  void self_compat_pipeline() {
    for (std::size_t i = 0; i < s_.pairs.size(); ++i) {
      const PairCase& pc = s_.pairs[i];
      if (!pc.self_compat) continue;
      const std::string id = "self_compat." + pc.name;
      guarded(id + ".square", "delta-tilde^2 = delta for z2 = z1", [&] {
        Cocycle<MlElement> z1;
        if (pc.ml_lift) {
          z1 = *pc.ml_lift;
        } else {
          LiftResult lr = lift_double_cover(s_.nerve, first_cocycle(pc), tol_);
          if (!lr.lift) throw DomainError("the first cocycle admits no metalinear lift");
          z1 = std::move(*lr.lift);
        }
        z1.k = pc.k;
        const SelfCompatResult r = self_compat(s_.nerve, pc.data, z1, r_.seed + 211 * i, 100, tol_);
        add(id + ".square", "delta-tilde^2 = delta for z2 = z1",
            std::max({r.delta_tilde.square_residual, r.delta_tilde.overlap_residual,
                      r.delta_tilde.equivariance_residual}),
            tol_.rel, true, r.delta_tilde.overlap_failures);
        add(id + ".normalized", "e^{-i eps pi/2} delta-tilde is positive on equal meta-frames",
            r.normalized_max_imag, tol_.abs, r.normalized_min_real > 0.0);
        r_.constants[id + ".epsilon"] = r.epsilon;
      });
    }
  }

  bool ensure_recipe() {
    if (r1_ && r2_) return true;
    if (!recipe_error_.empty()) return false;
    try {
      const std::vector<std::uint8_t> none(s_.nerve.charts.size(), 0);
      r1_ = recipe(s_.nerve, *s_.mp, s_.sections->first, none, tol_);
      r2_ = recipe(s_.nerve, *s_.mp, s_.sections->second, none, tol_);
    } catch (const std::exception& e) {
      recipe_error_ = e.what();
      return false;
    }
    return true;
  }

  void recipe_pipeline() {
    if (!ensure_recipe()) {
      fail("recipe", "g sigma_b = sigma_a N", recipe_error_);
      return;
    }
    const char* names[2] = {"first", "second"};
    const RecipeResult* rs[2] = {&*r1_, &*r2_};
    const FrameSectionData* fams[2] = {&s_.sections->first, &s_.sections->second};
    for (int f = 0; f < 2; ++f) {
      const std::string id = std::string("recipe.") + names[f];
      const RecipeResult& r = *rs[f];
      add(id + ".sections", "g sigma_b = sigma_a N with matching Ball points",
          std::max(r.section_residual, r.ball_residual), tol_.rel);
      add(id + ".projection", "rho(N-tilde) = N", r.projection_residual, tol_.abs);
      add(id + ".cocycle", "N-tilde is an Ml cocycle", report_residual(r.cocycle), tol_.rel, r.cocycle.pass,
          r.cocycle.failures);
      guarded(id + ".sheet_change", "changing the lifted section sheet changes N-tilde by a coboundary", [&] {
        std::vector<std::uint8_t> flips(s_.nerve.charts.size(), 0);
        flips[0] = 1;
        const RecipeResult flipped = recipe(s_.nerve, *s_.mp, *fams[f], flips, tol_);
        const auto w = lifts_equivalent(s_.nerve, r.Ntilde, flipped.Ntilde, tol_);
        bool matches = w.has_value();
        if (w) {
          for (std::size_t c = 0; c < flips.size(); ++c)
            matches = matches && ((*w)[c] * (*w)[0] > 0) == (flips[c] == flips[0]);
        }
        add(id + ".sheet_change", "changing the lifted section sheet changes N-tilde by a coboundary", 0.0, 0.0,
            matches);
      });
    }
  }

  void delta_D() {
    const std::string anchor = "delta-tilde_L(g sigma1, g sigma2) = delta-tilde_L(sigma1, sigma2) for g in Mp_k";
    if (!ensure_recipe()) {
      fail("delta_D.gluing", anchor, recipe_error_);
      return;
    }
    guarded("delta_D.gluing", anchor, [&] {
      const DeltaDResult d = build_delta_D_tilde(s_.nerve, *s_.mp, s_.sections->first, s_.sections->second, *r1_,
                                                 *r2_, r_.seed + 307, 20, tol_);
      add("delta_D.gluing", anchor, std::max(d.invariance_residual, d.gluing_residual), 10.0 * tol_.rel, true,
          d.failures);
      add("delta_D.square", "delta-tilde_D^2 = delta_D", d.square_residual, tol_.rel);
      add("delta_D.explicit", "Ball formula for delta_D agrees with the frame determinant", d.explicit_residual,
          tol_.rel);
      add("delta_D.equivariance", "Ml_k^2 translation rule", d.equivariance_residual, tol_.rel);
      add("delta_D.restriction", "delta_D on pair sections equals delta_k", d.restriction_residual, tol_.rel);
      r_.constants["delta_D.negative_samples"] = d.negative_samples;
      r_.constants["delta_D.gamma_anchor"] = gamma_anchor(s_.n);
      r_.constants["delta_D.gamma_normalization"] =
          "Gamma(0,0) = 2^{-n/2} so that Gamma^2 = det(1/2 (1 - W2^dagger W1)); a unit anchor differs by the "
          "constant 2^{n/2}";
    });
  }

  void cross_check_pipeline() {
    guarded("cross_check.delta_tilde", "half-form pairing glues for the recipe-induced lifts", [&] {
      const std::vector<std::uint8_t> none(s_.nerve.charts.size(), 0);
      const CrossCheckResult c = cross_check(s_.nerve, *s_.mp, s_.sections->first, s_.sections->second, none, none,
                                             r_.seed + 401, tol_);
      add("cross_check.pair_data", "recipe transitions and delta_k samples form consistent pair data",
          c.pair_check.transform_residual, tol_.rel, c.pair_check.pass, c.pair_check.failures);
      add("cross_check.delta_tilde", "half-form pairing glues for the recipe-induced lifts",
          std::max(c.delta_tilde.overlap_residual, c.delta_tilde.square_residual), tol_.rel, c.delta_tilde.glued,
          c.delta_tilde.overlap_failures);
      add("cross_check.global_sign", "delta-tilde_D agrees with the pair construction up to one sign",
          c.sign_residual, tol_.rel, c.global_sign != 0);
      r_.constants["cross_check.global_sign"] = c.global_sign;
    });
  }
};

double round12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

json residual_json(double x) { return std::isfinite(x) ? json(round12(x)) : json(nullptr); }

std::string format_residual(double x) {
  if (!std::isfinite(x)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace

VerificationReport run_scenario(const Scenario& s, const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport r;
  r.scenario = s.name;
  r.seed = opt.seed;
  r.tol = Tolerances::defaults();
  auto apply = [&](const std::map<std::string, double>& m) {
    for (const auto& [k, v] : m) {
      if (k == "rel") r.tol.rel = v;
      else if (k == "abs") r.tol.abs = v;
      else if (k == "singular") r.tol.singular = v;
      else if (k == "track") r.tol.track = v;
      else throw ParseError("--tolerance", "unknown tolerance \"" + k + "\"");
    }
  };
  apply(s.tolerances);
  apply(opt.tolerances);
  std::vector<std::string> requested = opt.pipelines;
  const bool explicit_request = !requested.empty();
  if (requested.empty()) requested = s.pipelines;
  if (requested.empty()) requested = pipeline_order();
  for (const std::string& p : requested) {
    if (std::find(pipeline_order().begin(), pipeline_order().end(), p) == pipeline_order().end()) {
      throw ParseError("--pipeline", "unknown pipeline \"" + p + "\"");
    }
    if (explicit_request && !applicable(s, p)) {
      throw ParseError("--pipeline", "scenario " + s.name + " lacks the data for pipeline \"" + p + "\"");
    }
  }
  Runner runner(s, r);
  for (const std::string& p : pipeline_order()) {
    if (std::find(requested.begin(), requested.end(), p) == requested.end() || !applicable(s, p)) continue;
    r.pipelines.push_back(p);
    runner.run(p);
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string emit_json(const VerificationReport& r) {
  json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["pipelines"] = r.pipelines;
  j["tolerances"] = {{"rel", round12(r.tol.rel)},
                     {"abs", round12(r.tol.abs)},
                     {"singular", round12(r.tol.singular)},
                     {"track", round12(r.tol.track)}};
  j["checks"] = json::array();
  for (const CheckRecord& c : r.checks) {
    j["checks"].push_back({{"id", c.id},
                           {"anchor", c.anchor},
                           {"residual", residual_json(c.residual)},
                           {"threshold", residual_json(c.threshold)},
                           {"pass", c.pass},
                           {"failures", c.failures}});
  }
  json constants = json::object();
  for (const auto& [k, v] : r.constants) constants[k] = v.is_number_float() ? residual_json(v.get<double>()) : v;
  j["constants"] = constants;
  j["falsification"] = r.falsification;
  j["pass"] = r.pass() && !r.falsification;
  j["exit_code"] = r.exit_code();
  return j.dump(2) + "\n";
}

std::string emit_text(const VerificationReport& r) {
  std::ostringstream out;
  out << "scenario " << r.scenario << " seed " << r.seed << " pipelines ";
  for (std::size_t i = 0; i < r.pipelines.size(); ++i) out << (i ? "," : "") << r.pipelines[i];
  if (r.pipelines.empty()) out << "-";
  out << '\n';
  for (const CheckRecord& c : r.checks) {
    out << c.id << "  residual " << format_residual(c.residual) << " <= " << format_residual(c.threshold) << "  ("
        << c.anchor << ")";
    if (!c.failures.empty()) {
      out << "  at ";
      for (std::size_t i = 0; i < c.failures.size(); ++i) out << (i ? "; " : "") << c.failures[i];
    }
    out << "  " << (c.pass ? "PASS" : "FAIL") << '\n';
  }
  return out.str();
}

}  // namespace hfe
