#include "hfe/metaplectic_induction.hpp"

#include <cmath>

#include "hfe/tracking.hpp"

namespace hfe {

namespace {

double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double rel_gap(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string point_location(const Nerve& nerve, int o, int q, int point) {
  return "overlap(" + std::to_string(nerve.overlaps[o].a) + "," +
         std::to_string(nerve.overlaps[o].b) + ") component " + std::to_string(q) + " point " +
         std::to_string(point);
}

// det of the upper-left k x k block of g, the transpose of A_g.
double spk_det(const SpElement& g, int k) {
  if (k == 0) return 1.0;
  return g.matrix().topLeftCorner(k, k).determinant();
}

void check_shape(const Nerve& nerve, const FrameSectionData& s, const char* what) {
  if (s.sigma.size() != nerve.charts.size()) {
    throw DomainError(std::string(what) + ": one section table per chart expected");
  }
  for (std::size_t c = 0; c < s.sigma.size(); ++c) {
    if (s.sigma[c].size() != nerve.charts[c].points.size()) {
      throw DomainError(std::string(what) + ": section table of chart " + nerve.charts[c].id +
                        " does not match its sample points");
    }
  }
}

}  // namespace

BundleCheck check_bundle(const Nerve& nerve, const MetaplecticBundleData& data,
                         const Tolerances& tol) {
  BundleCheck r;
  r.sp = validate_cocycle(nerve, push_cocycle(data.mp, PushTag::MpToSp), tol);
  r.mp = validate_cocycle(nerve, data.mp, tol);
  for (std::size_t o = 0; o < data.mp.values.size(); ++o) {
    for (const auto& comp : data.mp.values[o]) {
      if (comp.empty()) continue;
      if (data.d_adapted) {
        for (const MpElement& g : comp) r.spk_violations += !classify_mpk(g, data.k, tol).member();
      }
      r.negative_components += spk_det(comp.front().g(), data.k) < 0.0;
    }
  }
  r.pass = r.sp.pass && r.mp.pass && r.spk_violations == 0;
  return r;
}

std::vector<std::vector<MetaLagFrame>> lift_sections(const Nerve& nerve,
                                                     const FrameSectionData& sections,
                                                     const std::vector<std::uint8_t>& sheet_flips,
                                                     const Tolerances& tol) {
  check_shape(nerve, sections, "lift_sections");
  std::vector<std::vector<MetaLagFrame>> out(nerve.charts.size());
  for (int c = 0; c < nerve.chart_count(); ++c) {
    const Chart& chart = nerve.charts[c];
    std::vector<std::optional<BallChart>> charts(chart.points.size());
    std::vector<cplx> dets(chart.points.size()), roots(chart.points.size());
    for (std::size_t s = 0; s < chart.points.size(); ++s) {
      charts[s] = phi(sections.sigma[c][s], tol);
      dets[s] = det(charts[s]->C.matrix());
    }
    const BfsOrder bfs = bfs_order(chart.points, chart.edges);
    for (const auto& [p, parent] : bfs.order) {
      const int s = nerve.chart_slot(c, p);
      if (parent < 0) {
        roots[s] = principal_sqrt(dets[s]);
      } else {
        const int sp = nerve.chart_slot(c, parent);
        roots[s] = sqrt_step(dets[sp], roots[sp], dets[s], tol);
      }
    }
    for (const Edge& e : bfs.non_tree) {
      const int sa = nerve.chart_slot(c, e[0]), sb = nerve.chart_slot(c, e[1]);
      const cplx next = sqrt_step(dets[sa], roots[sa], dets[sb], tol);
      if (std::abs(next - roots[sb]) > std::abs(next + roots[sb])) {
        throw TrackingError("square root of det C has monodromy on chart " + chart.id);
      }
    }
    const double sign = c < static_cast<int>(sheet_flips.size()) && sheet_flips[c] ? -1.0 : 1.0;
    out[c].reserve(chart.points.size());
    for (std::size_t s = 0; s < chart.points.size(); ++s) {
      out[c].push_back({charts[s]->W, MlElement(charts[s]->C.matrix(), sign * roots[s], tol)});
    }
  }
  return out;
}

RecipeResult recipe(const Nerve& nerve, const MetaplecticBundleData& data,
                    const FrameSectionData& sections, const std::vector<std::uint8_t>& sheet_flips,
                    const Tolerances& tol) {
  RecipeResult r;
  r.lifted = lift_sections(nerve, sections, sheet_flips, tol);
  r.N.group = GroupKind::Gl;
  r.Ntilde.group = GroupKind::Ml;
  r.N.n = r.Ntilde.n = data.mp.n;
  r.N.k = r.Ntilde.k = data.k;
  r.N.values.resize(nerve.overlaps.size());
  r.Ntilde.values.resize(nerve.overlaps.size());
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    const Overlap& ov = nerve.overlaps[o];
    r.N.values[o].resize(ov.components.size());
    r.Ntilde.values[o].resize(ov.components.size());
    for (std::size_t q = 0; q < ov.components.size(); ++q) {
      for (std::size_t s = 0; s < ov.components[q].points.size(); ++s) {
        const int p = ov.components[q].points[s];
        const int sa = nerve.chart_slot(ov.a, p), sb = nerve.chart_slot(ov.b, p);
        const MpElement& gt = data.mp.values[o][q][s];
        const CMat Xa = sections.sigma[ov.a][sa].stacked();
        const CMat gXb = gt.g().matrix().cast<cplx>() * sections.sigma[ov.b][sb].stacked();
        const CMat N = (Xa.adjoint() * Xa).lu().solve(Xa.adjoint() * gXb);
        const double res = max_abs(Xa * N - gXb) / std::max(1.0, max_abs(gXb));
        r.section_residual = std::max(r.section_residual, res);
        if (!(res <= tol.rel)) {
          throw DomainError("recipe: g sigma_b is not in the span of sigma_a at " +
                            point_location(nerve, static_cast<int>(o), static_cast<int>(q), p));
        }
        const MetaLagFrame moved = meta_act(gt, r.lifted[ov.b][sb], tol);
        const MetaLagFrame& target = r.lifted[ov.a][sa];
        r.ball_residual = std::max(r.ball_residual, max_abs(moved.W.matrix() - target.W.matrix()));
        MlElement Nt = ml_mul(ml_inverse(target.C), moved.C, tol);
        r.projection_residual =
            std::max(r.projection_residual, max_abs(Nt.matrix() - N) / std::max(1.0, max_abs(N)));
        r.N.values[o][q].push_back(N);
        r.Ntilde.values[o][q].push_back(std::move(Nt));
      }
    }
  }
  r.cocycle = validate_cocycle(nerve, r.Ntilde, tol);
  return r;
}

ReducedFrame reduce_D_adapted(const LagFrame& frame, int k, const Tolerances& tol) {
  ReducedFrame r;
  r.blocks = frame_blocks(frame.U, frame.V, k, tol);
  r.positive = frame.positive;
  if (k < frame.n()) {
    r.reduced = validate_lagrangian(r.blocks.Ur, r.blocks.Vr, tol);
    r.reduced_positive = r.reduced->positive;
  } else {
    r.reduced_positive = true;
  }
  return r;
}

DeltaDResult build_delta_D_tilde(const Nerve& nerve, const MetaplecticBundleData& data,
                                 const FrameSectionData& first, const FrameSectionData& second,
                                 const RecipeResult& r1, const RecipeResult& r2,
                                 std::uint64_t seed, int draws, const Tolerances& tol) {
  const int n = data.mp.n, k = data.k;
  DeltaDResult d;
  d.values.resize(nerve.charts.size());
  for (int c = 0; c < nerve.chart_count(); ++c) {
    for (std::size_t s = 0; s < nerve.charts[c].points.size(); ++s) {
      const MetaLagFrame& X1 = r1.lifted[c][s];
      const MetaLagFrame& X2 = r2.lifted[c][s];
      const cplx value = delta_L_tilde(X1, X2, k, tol);
      d.values[c].push_back(value);
      const cplx dl = delta_L(first.sigma[c][s], second.sigma[c][s], k, tol);
      d.square_residual = std::max(d.square_residual, rel_gap(value * value, dl));
      d.explicit_residual =
          std::max(d.explicit_residual, rel_gap(delta_L_explicit(X1, X2, k, tol), dl));
      const cplx dk = delta(make_frame_pair(first.sigma[c][s], second.sigma[c][s], k, tol), tol);
      d.restriction_residual = std::max(d.restriction_residual, rel_gap(dk, dl));
    }
  }
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    const Overlap& ov = nerve.overlaps[o];
    for (std::size_t q = 0; q < ov.components.size(); ++q) {
      for (std::size_t s = 0; s < ov.components[q].points.size(); ++s) {
        const int p = ov.components[q].points[s];
        const int sa = nerve.chart_slot(ov.a, p), sb = nerve.chart_slot(ov.b, p);
        const MpElement& gt = data.mp.values[o][q][s];
        d.negative_samples += spk_det(gt.g(), k) < 0.0;
        const cplx moved = delta_L_tilde(meta_act(gt, r1.lifted[ov.b][sb], tol),
                                         meta_act(gt, r2.lifted[ov.b][sb], tol), k, tol);
        const double inv = rel_gap(moved, d.values[ov.b][sb]);
        d.invariance_residual = std::max(d.invariance_residual, inv);
        const MlElement& n1 = r1.Ntilde.values[o][q][s];
        const MlElement& n2 = r2.Ntilde.values[o][q][s];
        const double detA = k == 0 ? 1.0 : std::abs(n1.matrix().topLeftCorner(k, k).real().determinant());
        const cplx translated = d.values[ov.a][sa] * std::conj(n1.z()) * n2.z() / detA;
        const double glue = rel_gap(translated, d.values[ov.b][sb]);
        d.gluing_residual = std::max(d.gluing_residual, glue);
        if ((!(inv <= tol.rel) || !(glue <= tol.rel)) && d.failures.size() < 20) {
          d.failures.push_back(point_location(nerve, static_cast<int>(o), static_cast<int>(q), p));
        }
      }
    }
  }
  for (int c = 0; c < nerve.chart_count(); ++c) {
    const int size = static_cast<int>(nerve.charts[c].points.size());
    for (int i = 0; i < draws; ++i) {
      const MlPair h = random_mlkd(n, k, seed ^ (0xD1B54A32D192ED03ULL * (c * 1000003ULL + i + 1)));
      const int s = i % size;
      const cplx moved = delta_L_tilde(meta_right(r1.lifted[c][s], h.z1, tol),
                                       meta_right(r2.lifted[c][s], h.z2, tol), k, tol);
      const double detA = k == 0 ? 1.0 : std::abs(h.z1.matrix().topLeftCorner(k, k).real().determinant());
      const cplx expected = d.values[c][s] * std::conj(h.z1.z()) * h.z2.z() / detA;
      d.equivariance_residual = std::max(d.equivariance_residual, rel_gap(moved, expected));
    }
  }
  return d;
}

CrossCheckResult cross_check(const Nerve& nerve, const MetaplecticBundleData& data,
                             const FrameSectionData& first, const FrameSectionData& second,
                             const std::vector<std::uint8_t>& flips_first,
                             const std::vector<std::uint8_t>& flips_second, std::uint64_t seed,
                             const Tolerances& tol) {
  CrossCheckResult r;
  r.first = recipe(nerve, data, first, flips_first, tol);
  r.second = recipe(nerve, data, second, flips_second, tol);

  PolarizationPairData pair;
  pair.pair_cocycle.group = GroupKind::Glkd;
  pair.pair_cocycle.n = data.mp.n;
  pair.pair_cocycle.k = data.k;
  pair.pair_cocycle.values.resize(nerve.overlaps.size());
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    pair.pair_cocycle.values[o].resize(r.first.N.values[o].size());
    for (std::size_t q = 0; q < r.first.N.values[o].size(); ++q) {
      for (std::size_t s = 0; s < r.first.N.values[o][q].size(); ++s) {
        pair.pair_cocycle.values[o][q].push_back(
            {r.first.N.values[o][q][s], r.second.N.values[o][q][s]});
      }
    }
  }
  pair.delta_samples.resize(nerve.charts.size());
  for (int c = 0; c < nerve.chart_count(); ++c) {
    for (std::size_t s = 0; s < nerve.charts[c].points.size(); ++s) {
      pair.delta_samples[c].push_back(
          delta(make_frame_pair(first.sigma[c][s], second.sigma[c][s], data.k, tol), tol));
    }
  }
  r.pair_check = check_pair_data(nerve, pair, tol);

  const NormalizedPairData norm = normalize_sections(nerve, pair, tol);
  const Cocycle<MlElement> z2n = normalize_lift(nerve, norm, r.second.Ntilde, tol);
  r.delta_tilde = build_delta_tilde(nerve, norm, r.first.Ntilde, z2n, seed, 20, tol);
  r.delta_D = build_delta_D_tilde(nerve, data, first, second, r.first, r.second, seed, 20, tol);

  const cplx ratio = r.delta_D.values[0][0] / r.delta_tilde.base[0][0];
  if (std::abs(std::abs(ratio.real()) - 1.0) <= tol.track && std::abs(ratio.imag()) <= tol.track) {
    r.global_sign = ratio.real() > 0.0 ? 1 : -1;
    for (int c = 0; c < nerve.chart_count(); ++c) {
      for (std::size_t s = 0; s < nerve.charts[c].points.size(); ++s) {
        r.sign_residual = std::max(
            r.sign_residual, rel_gap(r.delta_D.values[c][s], double(r.global_sign) * r.delta_tilde.base[c][s]));
      }
    }
    if (!(r.sign_residual <= tol.rel)) r.global_sign = 0;
  } else {
    r.sign_residual = std::abs(ratio - (ratio.real() > 0.0 ? 1.0 : -1.0));
  }
  return r;
}

}  // namespace hfe
