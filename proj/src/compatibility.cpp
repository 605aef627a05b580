#include "hfe/compatibility.hpp"

#include <cmath>
#include <random>

#include "hfe/gf2.hpp"
#include "hfe/tracking.hpp"

namespace hfe {

namespace {

double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

cplx real_block_det(const CMat& g, int k) {
  if (k == 0) return {1.0, 0.0};
  return g.topLeftCorner(k, k).real().determinant();
}

std::string overlap_location(const Nerve& nerve, int o, int q, int point) {
  return "overlap(" + std::to_string(nerve.overlaps[o].a) + "," +
         std::to_string(nerve.overlaps[o].b) + ") component " + std::to_string(q) + " point " +
         std::to_string(point);
}

// Square roots of per-chart samples continued along each chart graph.
std::vector<std::vector<cplx>> chart_roots(const Nerve& nerve,
                                           const std::vector<std::vector<cplx>>& values,
                                           const Tolerances& tol) {
  std::vector<std::vector<cplx>> roots(values.size());
  for (int c = 0; c < nerve.chart_count(); ++c) {
    const Chart& chart = nerve.charts[c];
    roots[c].assign(chart.points.size(), cplx{});
    const BfsOrder bfs = bfs_order(chart.points, chart.edges);
    for (const auto& [p, parent] : bfs.order) {
      const int s = nerve.chart_slot(c, p);
      if (parent < 0) {
        roots[c][s] = principal_sqrt(values[c][s]);
      } else {
        const int sp = nerve.chart_slot(c, parent);
        roots[c][s] = sqrt_step(values[c][sp], roots[c][sp], values[c][s], tol);
      }
    }
    for (const Edge& e : bfs.non_tree) {
      const int sa = nerve.chart_slot(c, e[0]), sb = nerve.chart_slot(c, e[1]);
      const cplx next = sqrt_step(values[c][sa], roots[c][sa], values[c][sb], tol);
      if (std::abs(next - roots[c][sb]) > std::abs(next + roots[c][sb])) {
        throw TrackingError("square root of delta has monodromy on chart " + chart.id);
      }
    }
  }
  return roots;
}

// diag(1, ..., 1, d) M diag(1, ..., 1, e)^{-1}.
CMat rescale_last(const CMat& M, cplx d, cplx e) {
  CMat out = M;
  const Eigen::Index last = M.rows() - 1;
  out.row(last) *= d;
  out.col(last) /= e;
  return out;
}

}  // namespace

PairDataCheck check_pair_data(const Nerve& nerve, const PolarizationPairData& data,
                              const Tolerances& tol) {
  PairDataCheck r;
  const int k = data.pair_cocycle.k;
  if (data.delta_samples.size() != nerve.charts.size()) {
    throw DomainError("pair data: delta samples missing for some charts");
  }
  r.min_abs_delta = std::numeric_limits<double>::infinity();
  for (int c = 0; c < nerve.chart_count(); ++c) {
    if (data.delta_samples[c].size() != nerve.charts[c].points.size()) {
      throw DomainError("pair data: delta samples misaligned on chart " + nerve.charts[c].id);
    }
    for (cplx d : data.delta_samples[c]) r.min_abs_delta = std::min(r.min_abs_delta, std::abs(d));
  }
  if (r.min_abs_delta < tol.singular) r.failures.push_back("a delta sample vanishes");
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    const Overlap& ov = nerve.overlaps[o];
    for (std::size_t q = 0; q < ov.components.size(); ++q) {
      const auto& comp = ov.components[q];
      for (std::size_t s = 0; s < comp.points.size(); ++s) {
        const GlPair& g = data.pair_cocycle.values[o][q][s];
        const int p = comp.points[s];
        const double m = GroupOps<GlPair>::membership(g, data.pair_cocycle.n, k, tol);
        r.membership = std::max(r.membership, m);
        const cplx da = data.delta_samples[ov.a][nerve.chart_slot(ov.a, p)];
        const cplx db = data.delta_samples[ov.b][nerve.chart_slot(ov.b, p)];
        const cplx detA = real_block_det(g.g1, k);
        const cplx expected = da * std::conj(det(g.g1)) * det(g.g2) / (detA * detA);
        const double res = std::abs(db - expected) / std::abs(db);
        r.transform_residual = std::max(r.transform_residual, res);
        if (!(m <= tol.rel) || !(res <= tol.rel)) {
          r.failures.push_back(overlap_location(nerve, static_cast<int>(o), static_cast<int>(q), p));
        }
      }
    }
  }
  r.pass = r.failures.empty();
  return r;
}

NormalizedPairData normalize_sections(const Nerve& nerve, const PolarizationPairData& data,
                                      const Tolerances& tol) {
  const int n = data.pair_cocycle.n, k = data.pair_cocycle.k;
  NormalizedPairData out;
  out.original_delta = data.delta_samples;
  for (const auto& chart : data.delta_samples) {
    for (cplx d : chart) {
      if (std::abs(d) < tol.singular) throw DomainError("normalize_sections: delta sample vanishes");
    }
  }
  if (k == n) {
    // Empty pairing determinant: the samples must already be 1.
    for (const auto& chart : data.delta_samples)
      for (cplx d : chart)
        if (std::abs(d - 1.0) > tol.rel) {
          throw DomainError("normalize_sections: k = n requires delta = 1");
        }
    out.data = data;
    out.zeta.assign(data.delta_samples.size(), {});
    for (std::size_t c = 0; c < data.delta_samples.size(); ++c)
      out.zeta[c].assign(data.delta_samples[c].size(), cplx{1.0, 0.0});
    return out;
  }
  out.zeta = chart_roots(nerve, data.delta_samples, tol);
  out.data.pair_cocycle = data.pair_cocycle;
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    const Overlap& ov = nerve.overlaps[o];
    for (std::size_t q = 0; q < ov.components.size(); ++q) {
      for (std::size_t s = 0; s < ov.components[q].points.size(); ++s) {
        const int p = ov.components[q].points[s];
        const cplx da = data.delta_samples[ov.a][nerve.chart_slot(ov.a, p)];
        const cplx db = data.delta_samples[ov.b][nerve.chart_slot(ov.b, p)];
        GlPair& g = out.data.pair_cocycle.values[o][q][s];
        g.g2 = rescale_last(g.g2, da, db);
      }
    }
  }
  // delta(s . (1, h)) = delta(s) det D2(h) with h = diag(1, ..., 1, 1/delta).
  out.data.delta_samples = data.delta_samples;
  for (auto& chart : out.data.delta_samples) {
    for (cplx& d : chart) {
      const cplx scaled = d * (1.0 / d);
      out.max_delta_residual = std::max(out.max_delta_residual, std::abs(scaled - 1.0));
      d = scaled;
    }
  }
  if (out.max_delta_residual > tol.rel) {
    throw DomainError("normalize_sections: rescaled delta differs from 1");
  }
  return out;
}

Cocycle<MlElement> normalize_lift(const Nerve& nerve, const NormalizedPairData& norm,
                                  const Cocycle<MlElement>& z2, const Tolerances& tol) {
  Cocycle<MlElement> out;
  out.group = GroupKind::Ml;
  out.n = z2.n;
  out.k = z2.k;
  out.values.resize(z2.values.size());
  const bool trivial = norm.data.pair_cocycle.k == norm.data.pair_cocycle.n;
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    const Overlap& ov = nerve.overlaps[o];
    out.values[o].resize(ov.components.size());
    for (std::size_t q = 0; q < ov.components.size(); ++q) {
      for (std::size_t s = 0; s < ov.components[q].points.size(); ++s) {
        const int p = ov.components[q].points[s];
        const int sa = nerve.chart_slot(ov.a, p), sb = nerve.chart_slot(ov.b, p);
        const MlElement& x = z2.values[o][q][s];
        if (trivial) {
          out.values[o][q].push_back(x);
          continue;
        }
        const cplx da = norm.original_delta[ov.a][sa], db = norm.original_delta[ov.b][sb];
        out.values[o][q].emplace_back(rescale_last(x.matrix(), da, db),
                                      norm.zeta[ov.a][sa] * x.z() / norm.zeta[ov.b][sb], tol);
      }
    }
  }
  return out;
}

Cocycle<MlElement> denormalize_lift(const Nerve& nerve, const NormalizedPairData& norm,
                                    const Cocycle<MlElement>& z2n, const Tolerances& tol) {
  Cocycle<MlElement> out;
  out.group = GroupKind::Ml;
  out.n = z2n.n;
  out.k = z2n.k;
  out.values.resize(z2n.values.size());
  const bool trivial = norm.data.pair_cocycle.k == norm.data.pair_cocycle.n;
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    const Overlap& ov = nerve.overlaps[o];
    out.values[o].resize(ov.components.size());
    for (std::size_t q = 0; q < ov.components.size(); ++q) {
      for (std::size_t s = 0; s < ov.components[q].points.size(); ++s) {
        const int p = ov.components[q].points[s];
        const int sa = nerve.chart_slot(ov.a, p), sb = nerve.chart_slot(ov.b, p);
        const MlElement& x = z2n.values[o][q][s];
        if (trivial) {
          out.values[o][q].push_back(x);
          continue;
        }
        const cplx da = norm.original_delta[ov.a][sa], db = norm.original_delta[ov.b][sb];
        out.values[o][q].emplace_back(rescale_last(x.matrix(), 1.0 / da, 1.0 / db),
                                      norm.zeta[ov.b][sb] * x.z() / norm.zeta[ov.a][sa], tol);
      }
    }
  }
  return out;
}

Cocycle<MlElement> induce_compatible(const Nerve& nerve, const NormalizedPairData& norm,
                                     const Cocycle<MlElement>& z1, const Tolerances& tol) {
  const Cocycle<GlPair>& pc = norm.data.pair_cocycle;
  const int k = pc.k;
  Cocycle<MlElement> out;
  out.group = GroupKind::Ml;
  out.n = pc.n;
  out.k = k;
  out.values.resize(nerve.overlaps.size());
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    const Overlap& ov = nerve.overlaps[o];
    out.values[o].resize(ov.components.size());
    for (std::size_t q = 0; q < ov.components.size(); ++q) {
      for (std::size_t s = 0; s < ov.components[q].points.size(); ++s) {
        const GlPair& g = pc.values[o][q][s];
        const MlElement& x = z1.values[o][q][s];
        const std::string where = overlap_location(nerve, static_cast<int>(o),
                                                   static_cast<int>(q), ov.components[q].points[s]);
        if (max_abs(x.matrix() - g.g1) > tol.rel * std::max(1.0, max_abs(g.g1))) {
          throw DomainError("induce_compatible: z1 does not lift g1 at " + where);
        }
        const cplx detA = real_block_det(g.g1, k);
        const cplx premise = std::conj(det(g.g1)) * det(g.g2) / (detA * detA);
        if (std::abs(premise - 1.0) > tol.rel) {
          throw DomainError("induce_compatible: conj(det g1) det g2 det(A)^-2 = " +
                            std::to_string(premise.real()) + "+" + std::to_string(premise.imag()) +
                            "i differs from 1 at " + where);
        }
        out.values[o][q].emplace_back(g.g2, std::abs(detA) / std::conj(x.z()), tol);
      }
    }
  }
  return out;
}

cplx evaluate(const DeltaTildeData& d, int chart, int slot, const MlPair& h) {
  return d.base[chart][slot] * std::conj(h.z1.z()) * h.z2.z() /
         std::abs(real_block_det(h.z1.matrix(), d.k));
}

MlPair random_mlkd(int n, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  RMat A;
  do {
    A = RMat::Identity(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) A(i, j) += 0.5 * N(rng);
  } while (k > 0 && std::abs(A.determinant()) < 0.1);
  auto draw = [&]() {
    CMat g = CMat::Zero(n, n);
    g.topLeftCorner(k, k) = A.cast<cplx>();
    for (int i = 0; i < k; ++i)
      for (int j = k; j < n; ++j) g(i, j) = cplx(N(rng), N(rng));
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j)
        g(i, j) = (i == j ? 1.0 : 0.0) + 0.5 * cplx(N(rng), N(rng));
    if (std::abs(det(g)) < 0.05) g.bottomRightCorner(n - k, n - k) += CMat::Identity(n - k, n - k);
    const cplx z = principal_sqrt(det(g));
    return MlElement(g, (rng() & 1U) ? z : -z);
  };
  MlElement z1 = draw();
  MlElement z2 = draw();
  return {std::move(z1), std::move(z2)};
}

std::vector<std::vector<std::vector<cplx>>> gluing_ratios(const Nerve& nerve,
                                                          const Cocycle<MlElement>& z1,
                                                          const Cocycle<MlElement>& z2) {
  std::vector<std::vector<std::vector<cplx>>> out(nerve.overlaps.size());
  const int k = z1.k;
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    out[o].resize(nerve.overlaps[o].components.size());
    for (std::size_t q = 0; q < out[o].size(); ++q) {
      for (std::size_t s = 0; s < z1.values[o][q].size(); ++s) {
        const MlElement& a = z1.values[o][q][s];
        const MlElement& b = z2.values[o][q][s];
        out[o][q].push_back(std::conj(a.z()) * b.z() / std::abs(real_block_det(a.matrix(), k)));
      }
    }
  }
  return out;
}

GluingResult glue_signs(const Nerve& nerve,
                        const std::vector<std::vector<std::vector<cplx>>>& ratios,
                        const std::vector<std::uint8_t>* flips, const Tolerances& tol,
                        bool collect_failures) {
  const int C = nerve.component_count();
  auto flip = [&](int g) { return flips && (*flips)[static_cast<std::size_t>(g)] ? -1.0 : 1.0; };
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(C));
  Gf2System sys(nerve.chart_count());
  for (int g = 0; g < C; ++g) {
    const ComponentRef& ref = nerve.component_ref(g);
    const cplx q0 = flip(g) * ratios[ref.overlap][ref.component][0];
    bits[static_cast<std::size_t>(g)] = q0.real() < 0.0 ? 1 : 0;
    const Overlap& ov = nerve.overlaps[ref.overlap];
    sys.add_equation({ov.a, ov.b}, bits[static_cast<std::size_t>(g)] != 0);
  }
  GluingResult r;
  const auto sol = sys.solve();
  r.feasible = sol.feasible;
  std::vector<std::int8_t> eps(static_cast<std::size_t>(nerve.chart_count()), 0);
  if (sol.feasible) {
    for (std::size_t c = 0; c < eps.size(); ++c) eps[c] = sol.x[c] ? -1 : 1;
  } else {
    // Spread signs along a spanning forest of the chart graph; the leftover
    // components then show up as gluing residuals.
    bool changed = true;
    while (changed) {
      changed = false;
      for (int g = 0; g < C; ++g) {
        const Overlap& ov = nerve.overlaps[nerve.component_ref(g).overlap];
        const std::int8_t s = bits[static_cast<std::size_t>(g)] ? -1 : 1;
        if (eps[ov.a] == 0 && eps[ov.b] == 0) continue;
        if (eps[ov.a] == 0) {
          eps[ov.a] = static_cast<std::int8_t>(eps[ov.b] * s);
          changed = true;
        } else if (eps[ov.b] == 0) {
          eps[ov.b] = static_cast<std::int8_t>(eps[ov.a] * s);
          changed = true;
        }
      }
      if (!changed) {
        auto it = std::find(eps.begin(), eps.end(), 0);
        if (it != eps.end()) {
          *it = 1;
          changed = true;
        }
      }
    }
  }
  r.chart_signs = eps;
  for (int g = 0; g < C; ++g) {
    const ComponentRef& ref = nerve.component_ref(g);
    const Overlap& ov = nerve.overlaps[ref.overlap];
    const auto& qs = ratios[ref.overlap][ref.component];
    for (std::size_t s = 0; s < qs.size(); ++s) {
      const double res = std::abs(double(eps[ov.b]) - double(eps[ov.a]) * flip(g) * qs[s]);
      r.residual = std::max(r.residual, res);
      if (collect_failures && !(res <= tol.rel) && r.failures.size() < 20) {
        r.failures.push_back(overlap_location(nerve, ref.overlap, ref.component,
                                              ov.components[ref.component].points[s]));
      }
    }
  }
  return r;
}

DeltaTildeData build_delta_tilde(const Nerve& nerve, const NormalizedPairData& norm,
                                 const Cocycle<MlElement>& z1, const Cocycle<MlElement>& z2n,
                                 std::uint64_t seed, int draws, const Tolerances& tol) {
  const int n = norm.data.pair_cocycle.n, k = norm.data.pair_cocycle.k;
  DeltaTildeData d;
  d.k = k;
  const GluingResult g = glue_signs(nerve, gluing_ratios(nerve, z1, z2n), nullptr, tol);
  d.chart_signs = g.chart_signs;
  d.overlap_residual = g.residual;
  d.overlap_failures = g.failures;
  d.base.resize(nerve.charts.size());
  for (int c = 0; c < nerve.chart_count(); ++c) {
    for (std::size_t s = 0; s < nerve.charts[c].points.size(); ++s) {
      const cplx value = double(d.chart_signs[c]) * norm.zeta[c][s];
      d.base[c].push_back(value);
      const cplx delta = norm.original_delta[c][s];
      d.square_residual = std::max(d.square_residual, std::abs(value * value - delta) / std::abs(delta));
    }
  }
  for (int c = 0; c < nerve.chart_count(); ++c) {
    const int size = static_cast<int>(nerve.charts[c].points.size());
    for (int i = 0; i < draws; ++i) {
      const MlPair h = random_mlkd(n, k, seed ^ (0x9E3779B97F4A7C15ULL * (c * 1000003ULL + i + 1)));
      const int s = i % size;
      const cplx detA = real_block_det(h.z1.matrix(), k);
      const cplx value = evaluate(d, c, s, h);
      const cplx expected = norm.original_delta[c][s] * std::conj(det(h.z1.matrix()) / detA) *
                            (det(h.z2.matrix()) / detA);
      d.equivariance_residual =
          std::max(d.equivariance_residual, std::abs(value * value - expected) / std::abs(expected));
      ++d.equivariance_draws;
    }
  }
  d.glued = d.overlap_residual <= tol.rel;
  return d;
}

UniquenessResult verify_uniqueness(const Nerve& nerve, const NormalizedPairData&,
                                   const Cocycle<MlElement>& z1, const Cocycle<MlElement>& z2a,
                                   const Cocycle<MlElement>& z2b, const Tolerances& tol) {
  UniquenessResult r;
  r.first_glues = glue_signs(nerve, gluing_ratios(nerve, z1, z2a), nullptr, tol).residual <= tol.rel;
  r.second_glues = glue_signs(nerve, gluing_ratios(nerve, z1, z2b), nullptr, tol).residual <= tol.rel;
  if (!r.first_glues || !r.second_glues) {
    throw DomainError("verify_uniqueness: both lifts must admit a glued half-form pairing");
  }
  r.witness = lifts_equivalent(nerve, z2a, z2b, tol);
  r.falsified = !r.witness.has_value();
  return r;
}

UniquenessEnumeration enumerate_uniqueness(const Nerve& nerve, const Cocycle<MlElement>& z1,
                                           const Cocycle<MlElement>& z2, const Tolerances& tol) {
  const int C = nerve.component_count();
  if (C > 24) throw DomainError("enumerate_uniqueness: too many overlap components");
  const auto ratios = gluing_ratios(nerve, z1, z2);
  UniquenessEnumeration e;
  e.patterns = std::size_t{1} << C;
  e.min_failed_residual = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(C));
  for (std::size_t mask = 0; mask < e.patterns; ++mask) {
    for (int g = 0; g < C; ++g) bits[static_cast<std::size_t>(g)] = (mask >> g) & 1U;
    const GluingResult g = glue_signs(nerve, ratios, &bits, tol, false);
    const bool glued = g.residual <= tol.rel;
    const bool equivalent = ratio_bits_equivalent(nerve, bits).has_value();
    e.glued += glued;
    e.equivalent += equivalent;
    e.mismatches += glued != equivalent;
    e.glued_inequivalent += glued && !equivalent;
    if (glued) {
      e.max_glued_residual = std::max(e.max_glued_residual, g.residual);
    } else {
      e.min_failed_residual = std::min(e.min_failed_residual, g.residual);
    }
  }
  return e;
}

SelfCompatResult self_compat(const Nerve& nerve, const PolarizationPairData& data,
                             const Cocycle<MlElement>& z1, std::uint64_t seed, int draws,
                             const Tolerances& tol) {
  const int n = data.pair_cocycle.n, k = data.pair_cocycle.k;
  for (const auto& ov : data.pair_cocycle.values)
    for (const auto& comp : ov)
      for (const GlPair& g : comp)
        if (max_abs(g.g1 - g.g2) > tol.abs * std::max(1.0, max_abs(g.g1))) {
          throw DomainError("self_compat: pair cocycle is not diagonal");
        }
  int sign = 0;
  for (const auto& chart : data.delta_samples) {
    for (cplx d : chart) {
      if (std::abs(d.imag()) > tol.abs * std::max(1.0, std::abs(d))) {
        throw DomainError("self_compat: delta is not real");
      }
      const int s = d.real() > 0.0 ? 1 : -1;
      if (sign != 0 && s != sign) throw DomainError("self_compat: delta changes sign");
      sign = s;
    }
  }
  SelfCompatResult r;
  r.epsilon = sign < 0 ? 1 : 0;
  const cplx phase = r.epsilon ? cplx{0.0, 1.0} : cplx{1.0, 0.0};
  DeltaTildeData& d = r.delta_tilde;
  d.k = k;
  d.chart_signs.assign(nerve.charts.size(), 1);
  d.base.resize(nerve.charts.size());
  r.normalized.resize(nerve.charts.size());
  r.normalized_min_real = std::numeric_limits<double>::infinity();
  for (int c = 0; c < nerve.chart_count(); ++c) {
    for (cplx delta : data.delta_samples[c]) {
      const cplx value = phase * std::sqrt(std::abs(delta));
      d.base[c].push_back(value);
      d.square_residual = std::max(d.square_residual, std::abs(value * value - delta) / std::abs(delta));
      const cplx normal = value * std::conj(phase);
      r.normalized[c].push_back(normal);
      r.normalized_min_real = std::min(r.normalized_min_real, normal.real());
      r.normalized_max_imag = std::max(r.normalized_max_imag, std::abs(normal.imag()));
    }
  }
  // With z2 = z1 the gluing ratio is |z1|^2 / |det A|.
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    const Overlap& ov = nerve.overlaps[o];
    for (std::size_t q = 0; q < ov.components.size(); ++q) {
      for (std::size_t s = 0; s < ov.components[q].points.size(); ++s) {
        const int p = ov.components[q].points[s];
        const MlElement& z = z1.values[o][q][s];
        const cplx ratio = std::conj(z.z()) * z.z() / std::abs(real_block_det(z.matrix(), k));
        const cplx vb = d.base[ov.b][nerve.chart_slot(ov.b, p)];
        const cplx va = d.base[ov.a][nerve.chart_slot(ov.a, p)];
        const double res = std::abs(vb - va * ratio) / std::abs(vb);
        d.overlap_residual = std::max(d.overlap_residual, res);
        if (!(res <= tol.rel) && d.overlap_failures.size() < 20) {
          d.overlap_failures.push_back(
              overlap_location(nerve, static_cast<int>(o), static_cast<int>(q), p));
        }
      }
    }
  }
  for (int c = 0; c < nerve.chart_count(); ++c) {
    const int size = static_cast<int>(nerve.charts[c].points.size());
    for (int i = 0; i < draws; ++i) {
      const MlPair h = random_mlkd(n, k, seed ^ (0xD1B54A32D192ED03ULL * (c * 1000003ULL + i + 1)));
      const int s = i % size;
      const cplx detA = real_block_det(h.z1.matrix(), k);
      const cplx value = evaluate(d, c, s, h);
      const cplx delta = data.delta_samples[c][s];
      const cplx expected =
          delta * std::conj(det(h.z1.matrix()) / detA) * (det(h.z2.matrix()) / detA);
      d.equivariance_residual =
          std::max(d.equivariance_residual, std::abs(value * value - expected) / std::abs(expected));
      ++d.equivariance_draws;
      // On equal meta-frame pairs (h, h) the normalized value stays positive.
      const cplx equal = r.normalized[c][s] * std::conj(h.z1.z()) * h.z1.z() / std::abs(detA);
      r.normalized_min_real = std::min(r.normalized_min_real, equal.real());
      r.normalized_max_imag = std::max(r.normalized_max_imag, std::abs(equal.imag()));
    }
  }
  d.glued = d.overlap_residual <= tol.rel;
  return r;
}

}  // namespace hfe
