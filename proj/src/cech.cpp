#include "hfe/cech.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_set>

#include "hfe/gf2.hpp"
#include "hfe/tracking.hpp"

namespace hfe {

namespace {

double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double matrix_distance(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  return max_abs(a - b) / std::max(1.0, max_abs(b));
}

double scalar_distance(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

long long pair_key(int a, int b) { return static_cast<long long>(a) * 1000003LL + b; }

}  // namespace

// Nerve ------------------------------------------------------------------------

BfsOrder bfs_order(const std::vector<int>& points, const std::vector<Edge>& edges) {
  BfsOrder out;
  if (points.empty()) return out;
  std::unordered_map<int, int> index;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!index.emplace(points[i], static_cast<int>(i)).second) {
      throw DomainError("sample graph lists point " + std::to_string(points[i]) + " twice");
    }
  }
  std::vector<std::vector<int>> adj(points.size());
  for (const Edge& e : edges) {
    auto ia = index.find(e[0]);
    auto ib = index.find(e[1]);
    if (ia == index.end() || ib == index.end()) {
      throw DomainError("sample graph edge (" + std::to_string(e[0]) + "," +
                        std::to_string(e[1]) + ") leaves the point set");
    }
    adj[ia->second].push_back(ib->second);
    adj[ib->second].push_back(ia->second);
  }
  std::vector<int> parent(points.size(), -2);
  std::deque<int> queue{0};
  parent[0] = -1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    out.order.push_back({points[u], parent[u] < 0 ? -1 : points[parent[u]]});
    for (int v : adj[u]) {
      if (parent[v] == -2) {
        parent[v] = u;
        queue.push_back(v);
      }
    }
  }
  if (out.order.size() != points.size()) {
    throw DomainError("sample graph rooted at point " + std::to_string(points[0]) +
                      " is not connected");
  }
  for (const Edge& e : edges) {
    const int a = index.at(e[0]), b = index.at(e[1]);
    if (parent[a] != b && parent[b] != a) out.non_tree.push_back(e);
  }
  return out;
}

void Nerve::finalize() {
  const int np = static_cast<int>(points.size());
  auto check_point = [&](int p) {
    if (p < 0 || p >= np) throw DomainError("nerve: point id " + std::to_string(p) + " out of range");
  };
  chart_index_.assign(charts.size(), {});
  for (std::size_t c = 0; c < charts.size(); ++c) {
    for (std::size_t s = 0; s < charts[c].points.size(); ++s) {
      check_point(charts[c].points[s]);
      chart_index_[c][charts[c].points[s]] = static_cast<int>(s);
    }
    if (!charts[c].local.empty() && charts[c].local.size() != charts[c].points.size()) {
      throw DomainError("nerve: chart " + charts[c].id + " local coordinates misaligned");
    }
    bfs_order(charts[c].points, charts[c].edges);
  }
  overlap_lookup_.clear();
  component_refs_.clear();
  component_offset_.clear();
  component_index_.assign(overlaps.size(), {});
  for (std::size_t o = 0; o < overlaps.size(); ++o) {
    const Overlap& ov = overlaps[o];
    if (ov.a < 0 || ov.b >= chart_count() || ov.a >= ov.b) {
      throw DomainError("nerve: overlap pairs must be (a, b) with a < b");
    }
    if (!overlap_lookup_.emplace(pair_key(ov.a, ov.b), static_cast<int>(o)).second) {
      throw DomainError("nerve: duplicate overlap");
    }
    component_offset_.push_back(static_cast<int>(component_refs_.size()));
    for (std::size_t q = 0; q < ov.components.size(); ++q) {
      const OverlapComponent& comp = ov.components[q];
      if (comp.points.empty()) throw DomainError("nerve: empty overlap component");
      std::unordered_map<int, int> idx;
      for (std::size_t s = 0; s < comp.points.size(); ++s) {
        const int p = comp.points[s];
        check_point(p);
        if (!chart_index_[ov.a].count(p) || !chart_index_[ov.b].count(p)) {
          throw DomainError("nerve: overlap point " + std::to_string(p) +
                            " lies outside one of its charts");
        }
        idx[p] = static_cast<int>(s);
      }
      if (!comp.local.empty() && comp.local.size() != comp.points.size()) {
        throw DomainError("nerve: component local coordinates misaligned");
      }
      bfs_order(comp.points, comp.edges);
      component_index_[o].push_back(std::move(idx));
      component_refs_.push_back({static_cast<int>(o), static_cast<int>(q)});
    }
  }
  triple_point_count_ = 0;
  for (const Triple& t : triples) {
    if (!(t.a < t.b && t.b < t.c)) throw DomainError("nerve: triples must be sorted a < b < c");
    const int ov[3] = {overlap_index(t.a, t.b), overlap_index(t.b, t.c), overlap_index(t.a, t.c)};
    for (int o : ov) {
      if (o < 0) throw DomainError("nerve: triple without pairwise overlap");
    }
    for (const TriplePoint& p : t.points) {
      for (int i = 0; i < 3; ++i) {
        const int q = p.components[i];
        if (q < 0 || q >= static_cast<int>(overlaps[ov[i]].components.size()) ||
            !component_index_[ov[i]][q].count(p.point)) {
          throw DomainError("nerve: triple point " + std::to_string(p.point) +
                            " is not in its stated overlap component");
        }
      }
    }
    triple_point_count_ += static_cast<int>(t.points.size());
  }
  finalized_ = true;
}

std::vector<Triple> derive_triples(const Nerve& nerve) {
  std::vector<std::unordered_set<int>> members(nerve.charts.size());
  for (std::size_t c = 0; c < nerve.charts.size(); ++c)
    members[c].insert(nerve.charts[c].points.begin(), nerve.charts[c].points.end());
  auto find_component = [&](int a, int b, int p) {
    const int o = nerve.overlap_index(a, b);
    const auto& comps = nerve.overlaps[o].components;
    for (std::size_t q = 0; q < comps.size(); ++q) {
      if (std::find(comps[q].points.begin(), comps[q].points.end(), p) != comps[q].points.end()) {
        return static_cast<int>(q);
      }
    }
    throw DomainError("nerve: point " + std::to_string(p) + " of charts " + nerve.charts[a].id +
                      ", " + nerve.charts[b].id + " lies in no overlap component");
  };
  std::vector<Triple> out;
  const int C = nerve.chart_count();
  for (int a = 0; a < C; ++a)
    for (int b = a + 1; b < C; ++b)
      for (int c = b + 1; c < C; ++c) {
        if (nerve.overlap_index(a, b) < 0 || nerve.overlap_index(b, c) < 0 ||
            nerve.overlap_index(a, c) < 0) {
          continue;
        }
        Triple t{a, b, c, {}};
        for (int p : nerve.charts[a].points) {
          if (!members[b].count(p) || !members[c].count(p)) continue;
          t.points.push_back({p, {find_component(a, b, p), find_component(b, c, p),
                                  find_component(a, c, p)}});
        }
        if (!t.points.empty()) out.push_back(std::move(t));
      }
  return out;
}

int Nerve::overlap_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = overlap_lookup_.find(pair_key(a, b));
  return it == overlap_lookup_.end() ? -1 : it->second;
}

int Nerve::global_component(int overlap, int component) const {
  return component_offset_[overlap] + component;
}

int Nerve::component_slot(int overlap, int component, int point) const {
  const auto& idx = component_index_[overlap][component];
  auto it = idx.find(point);
  if (it == idx.end()) {
    throw DomainError("nerve: point " + std::to_string(point) + " not in overlap component");
  }
  return it->second;
}

int Nerve::chart_slot(int chart, int point) const {
  auto it = chart_index_[chart].find(point);
  if (it == chart_index_[chart].end()) {
    throw DomainError("nerve: point " + std::to_string(point) + " not in chart " + charts[chart].id);
  }
  return it->second;
}

std::vector<std::array<int, 2>> Nerve::chart_graph_edges() const {
  std::vector<std::array<int, 2>> out;
  for (const Overlap& o : overlaps) out.push_back({o.a, o.b});
  return out;
}

bool SignCochain::trivial() const {
  return std::all_of(values.begin(), values.end(), [](std::int8_t v) { return v == 1; });
}

// Group kinds ------------------------------------------------------------------

const char* to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::Gl: return "Gl";
    case GroupKind::Ml: return "Ml";
    case GroupKind::Sp: return "Sp";
    case GroupKind::Mp: return "Mp";
    case GroupKind::Glkd: return "Glkd";
    case GroupKind::Mlkd: return "Mlkd";
    case GroupKind::Spk: return "Spk";
  }
  return "?";
}

std::optional<GroupKind> group_from_string(const std::string& s) {
  for (GroupKind k : {GroupKind::Gl, GroupKind::Ml, GroupKind::Sp, GroupKind::Mp,
                      GroupKind::Glkd, GroupKind::Mlkd, GroupKind::Spk}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

double GroupOps<CMat>::distance(const CMat& a, const CMat& b) { return matrix_distance(a, b); }

double GroupOps<CMat>::membership(const CMat& a, int, int, const Tolerances& tol) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return std::abs(det(a)) > tol.singular ? 0.0 : std::numeric_limits<double>::infinity();
}

double GroupOps<MlElement>::distance(const MlElement& a, const MlElement& b) {
  return std::max(matrix_distance(a.matrix(), b.matrix()), scalar_distance(a.z(), b.z()));
}

double GroupOps<MlElement>::membership(const MlElement& a, int, int, const Tolerances&) {
  return a.residual();
}

double GroupOps<SpElement>::distance(const SpElement& a, const SpElement& b) {
  return matrix_distance(a.matrix().cast<cplx>(), b.matrix().cast<cplx>());
}

double GroupOps<SpElement>::membership(const SpElement& a, int, int k, const Tolerances& tol) {
  const double m = a.matrix().cwiseAbs().maxCoeff();
  double r = sp_residuals(a.matrix()).max() / std::max(1.0, m * m);
  if (k > 0 && !classify_spk(a, k, tol).member()) r = std::numeric_limits<double>::infinity();
  return r;
}

double GroupOps<MpElement>::distance(const MpElement& a, const MpElement& b) {
  return std::max(GroupOps<SpElement>::distance(a.g(), b.g()),
                  scalar_distance(a.zeta(), b.zeta()));
}

double GroupOps<MpElement>::membership(const MpElement& a, int n, int k, const Tolerances& tol) {
  const cplx d = det(alpha(a.g(), BallPoint::zero(a.n()), tol).C.matrix());
  return std::max(GroupOps<SpElement>::membership(a.g(), n, k, tol),
                  std::abs(a.zeta() * a.zeta() - d) / std::abs(d));
}

double GroupOps<GlPair>::distance(const GlPair& a, const GlPair& b) {
  return std::max(matrix_distance(a.g1, b.g1), matrix_distance(a.g2, b.g2));
}

double GroupOps<GlPair>::membership(const GlPair& a, int, int k, const Tolerances& tol) {
  if (std::abs(det(a.g1)) <= tol.singular || std::abs(det(a.g2)) <= tol.singular) {
    return std::numeric_limits<double>::infinity();
  }
  return classify_glkd(a.g1, a.g2, k, tol).member() ? 0.0
                                                    : std::numeric_limits<double>::infinity();
}

double GroupOps<MlPair>::distance(const MlPair& a, const MlPair& b) {
  return std::max(GroupOps<MlElement>::distance(a.z1, b.z1),
                  GroupOps<MlElement>::distance(a.z2, b.z2));
}

double GroupOps<MlPair>::membership(const MlPair& a, int, int k, const Tolerances& tol) {
  if (!classify_mlkd(a.z1, a.z2, k, tol).member()) return std::numeric_limits<double>::infinity();
  return std::max(a.z1.residual(), a.z2.residual());
}

// Pushforward ------------------------------------------------------------------

std::optional<PushTag> push_tag_from_string(const std::string& s) {
  if (s == "ml_to_gl") return PushTag::MlToGl;
  if (s == "mp_to_sp") return PushTag::MpToSp;
  if (s == "det") return PushTag::GlDet;
  if (s == "abs_det_half") return PushTag::GlAbsDetHalf;
  if (s == "abs_det_minus_half") return PushTag::GlAbsDetMinusHalf;
  if (s == "ball_alpha") return PushTag::SpBallAlpha;
  return std::nullopt;
}

Cocycle<CMat> push_cocycle(const Cocycle<MlElement>& c, PushTag tag) {
  if (tag != PushTag::MlToGl) throw DomainError("push_cocycle: tag does not apply to Ml");
  return map_cocycle(c, GroupKind::Gl, [](const MlElement& x) { return CMat(x.matrix()); });
}

Cocycle<SpElement> push_cocycle(const Cocycle<MpElement>& c, PushTag tag) {
  if (tag != PushTag::MpToSp) throw DomainError("push_cocycle: tag does not apply to Mp");
  auto out = map_cocycle(c, GroupKind::Sp, [](const MpElement& x) { return x.g(); });
  out.k = 0;
  return out;
}

Cocycle<CMat> push_cocycle(const Cocycle<CMat>& c, PushTag tag) {
  auto scalar = [](cplx v) {
    CMat m(1, 1);
    m(0, 0) = v;
    return m;
  };
  Cocycle<CMat> out;
  switch (tag) {
    case PushTag::GlDet:
      out = map_cocycle(c, GroupKind::Gl, [&](const CMat& a) { return scalar(det(a)); });
      break;
    case PushTag::GlAbsDetHalf:
      out = map_cocycle(c, GroupKind::Gl,
                        [&](const CMat& a) { return scalar(std::sqrt(std::abs(det(a)))); });
      break;
    case PushTag::GlAbsDetMinusHalf:
      out = map_cocycle(c, GroupKind::Gl,
                        [&](const CMat& a) { return scalar(1.0 / std::sqrt(std::abs(det(a)))); });
      break;
    default:
      throw DomainError("push_cocycle: tag does not apply to Gl");
  }
  out.n = 1;
  out.k = 0;
  return out;
}

Cocycle<CMat> push_cocycle(const Cocycle<SpElement>& c, PushTag tag, const Tolerances& tol) {
  if (tag != PushTag::SpBallAlpha) throw DomainError("push_cocycle: tag does not apply to Sp");
  auto out = map_cocycle(c, GroupKind::Gl, [&](const SpElement& g) {
    return CMat(alpha(g, BallPoint::zero(g.n()), tol).C.matrix());
  });
  out.k = 0;
  return out;
}

// Double covers -------------------------------------------------------------------

Cocycle<MlElement> track_square_roots(const Nerve& nerve, const Cocycle<CMat>& c,
                                      const Tolerances& tol) {
  Cocycle<MlElement> out;
  out.group = GroupKind::Ml;
  out.n = c.n;
  out.k = c.k;
  out.values.resize(nerve.overlaps.size());
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    const auto& comps = nerve.overlaps[o].components;
    out.values[o].resize(comps.size());
    for (std::size_t q = 0; q < comps.size(); ++q) {
      const OverlapComponent& comp = comps[q];
      std::vector<cplx> dets(comp.points.size()), roots(comp.points.size());
      for (std::size_t s = 0; s < comp.points.size(); ++s) dets[s] = det(c.values[o][q][s]);
      const BfsOrder bfs = bfs_order(comp.points, comp.edges);
      for (const auto& [p, parent] : bfs.order) {
        const int s = nerve.component_slot(static_cast<int>(o), static_cast<int>(q), p);
        if (parent < 0) {
          roots[s] = principal_sqrt(dets[s]);
        } else {
          const int sp = nerve.component_slot(static_cast<int>(o), static_cast<int>(q), parent);
          roots[s] = sqrt_step(dets[sp], roots[sp], dets[s], tol);
        }
      }
      for (const Edge& e : bfs.non_tree) {
        const int sa = nerve.component_slot(static_cast<int>(o), static_cast<int>(q), e[0]);
        const int sb = nerve.component_slot(static_cast<int>(o), static_cast<int>(q), e[1]);
        const cplx next = sqrt_step(dets[sa], roots[sa], dets[sb], tol);
        if (std::abs(next - roots[sb]) > std::abs(next + roots[sb])) {
          throw TrackingError("square root of det has monodromy around a cycle of an overlap "
                              "component");
        }
      }
      out.values[o][q].reserve(comp.points.size());
      for (std::size_t s = 0; s < comp.points.size(); ++s) {
        Tolerances t = tol;
        t.rel = std::max(tol.rel, 1e-12);
        out.values[o][q].emplace_back(c.values[o][q][s], roots[s], t);
      }
    }
  }
  return out;
}

namespace {

// Ratio z_ab z_bc / z_ac at every triple point, in triple order.
std::vector<cplx> triple_ratios(const Nerve& nerve, const Cocycle<MlElement>& z) {
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(nerve.triple_point_count()));
  for (const Triple& t : nerve.triples) {
    const int ab = nerve.overlap_index(t.a, t.b);
    const int bc = nerve.overlap_index(t.b, t.c);
    const int ac = nerve.overlap_index(t.a, t.c);
    for (const TriplePoint& p : t.points) {
      out.push_back(z.at(nerve, ab, p.components[0], p.point).z() *
                    z.at(nerve, bc, p.components[1], p.point).z() /
                    z.at(nerve, ac, p.components[2], p.point).z());
    }
  }
  return out;
}

// Global component numbers (ab, bc, ac) of every triple point.
std::vector<std::array<int, 3>> triple_components(const Nerve& nerve) {
  std::vector<std::array<int, 3>> out;
  for (const Triple& t : nerve.triples) {
    const int ov[3] = {nerve.overlap_index(t.a, t.b), nerve.overlap_index(t.b, t.c),
                       nerve.overlap_index(t.a, t.c)};
    for (const TriplePoint& p : t.points) {
      out.push_back({nerve.global_component(ov[0], p.components[0]),
                     nerve.global_component(ov[1], p.components[1]),
                     nerve.global_component(ov[2], p.components[2])});
    }
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> solve_coboundary(const Nerve& nerve,
                                                          const std::vector<std::uint8_t>& bits) {
  Gf2System sys(nerve.component_count());
  const auto comps = triple_components(nerve);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    sys.add_equation({comps[i][0], comps[i][1], comps[i][2]}, bits[i] != 0);
  }
  const auto r = sys.solve();
  if (!r.feasible) return std::nullopt;
  return r.x;
}

}  // namespace

SignCochain lift_defect(const Nerve& nerve, const Cocycle<MlElement>& z, const Tolerances& tol) {
  SignCochain c;
  c.degree = 2;
  for (cplx r : triple_ratios(nerve, z)) {
    const double s = r.real() < 0.0 ? -1.0 : 1.0;
    if (std::abs(r - s) > tol.track) {
      throw DomainError("lift_defect: z_ab z_bc / z_ac is not +-1; input is not a cocycle");
    }
    c.values.push_back(static_cast<std::int8_t>(s));
  }
  return c;
}

Cocycle<MlElement> apply_flips(const Cocycle<MlElement>& z, const Nerve& nerve,
                               const std::vector<std::uint8_t>& flips) {
  Cocycle<MlElement> out = z;
  for (int g = 0; g < nerve.component_count(); ++g) {
    if (!flips[static_cast<std::size_t>(g)]) continue;
    const ComponentRef& ref = nerve.component_ref(g);
    for (MlElement& x : out.values[ref.overlap][ref.component]) x = ml_deck(x);
  }
  return out;
}

LiftResult lift_double_cover(const Nerve& nerve, const Cocycle<CMat>& c, const Tolerances& tol) {
  LiftResult r;
  const Cocycle<MlElement> z = track_square_roots(nerve, c, tol);
  r.defect = lift_defect(nerve, z, tol);
  std::vector<std::uint8_t> bits;
  for (std::int8_t v : r.defect.values) bits.push_back(v < 0 ? 1 : 0);
  const auto flips = solve_coboundary(nerve, bits);
  if (!flips) {
    r.obstruction = r.defect;
    return r;
  }
  SignCochain f;
  f.degree = 1;
  for (std::uint8_t b : *flips) f.values.push_back(b ? -1 : 1);
  r.flips = f;
  r.lift = apply_flips(z, nerve, *flips);
  return r;
}

std::optional<SignCochain> z2_coboundary_solve(const Nerve& nerve, const SignCochain& c2) {
  if (c2.degree != 2 || static_cast<int>(c2.values.size()) != nerve.triple_point_count()) {
    throw DomainError("z2_coboundary_solve: expected a degree-2 cochain on all triple points");
  }
  std::vector<std::uint8_t> bits;
  for (std::int8_t v : c2.values) bits.push_back(v < 0 ? 1 : 0);
  const auto x = solve_coboundary(nerve, bits);
  if (!x) return std::nullopt;
  SignCochain d;
  d.degree = 1;
  for (std::uint8_t b : *x) d.values.push_back(b ? -1 : 1);
  return d;
}

std::optional<std::vector<std::int8_t>> ratio_bits_equivalent(
    const Nerve& nerve, const std::vector<std::uint8_t>& bits) {
  Gf2System sys(nerve.chart_count());
  for (int g = 0; g < nerve.component_count(); ++g) {
    const Overlap& ov = nerve.overlaps[nerve.component_ref(g).overlap];
    sys.add_equation({ov.a, ov.b}, bits[static_cast<std::size_t>(g)] != 0);
  }
  const auto r = sys.solve();
  if (!r.feasible) return std::nullopt;
  std::vector<std::int8_t> eps;
  for (std::uint8_t b : r.x) eps.push_back(b ? -1 : 1);
  return eps;
}

std::optional<std::vector<std::int8_t>> lifts_equivalent(const Nerve& nerve,
                                                         const Cocycle<MlElement>& l1,
                                                         const Cocycle<MlElement>& l2,
                                                         const Tolerances& tol) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(nerve.component_count()), 0);
  for (int g = 0; g < nerve.component_count(); ++g) {
    const ComponentRef& ref = nerve.component_ref(g);
    const auto& v1 = l1.values[ref.overlap][ref.component];
    const auto& v2 = l2.values[ref.overlap][ref.component];
    if (v1.size() != v2.size()) throw DomainError("lifts_equivalent: table size mismatch");
    for (std::size_t s = 0; s < v1.size(); ++s) {
      if (matrix_distance(v1[s].matrix(), v2[s].matrix()) > tol.abs) {
        throw DomainError("lifts_equivalent: the lifts project to different cocycles");
      }
      const cplx ratio = v2[s].z() / v1[s].z();
      const std::uint8_t bit = ratio.real() < 0.0 ? 1 : 0;
      if (std::abs(ratio - (bit ? -1.0 : 1.0)) > tol.abs) {
        throw DomainError("lifts_equivalent: ratio of lifts is not +-1");
      }
      if (s == 0) {
        bits[static_cast<std::size_t>(g)] = bit;
      } else if (bits[static_cast<std::size_t>(g)] != bit) {
        throw DomainError("lifts_equivalent: ratio changes sign inside a component");
      }
    }
  }
  return ratio_bits_equivalent(nerve, bits);
}

LiftEnumeration enumerate_lifts(const Nerve& nerve, const Cocycle<MlElement>& base,
                                const Tolerances& tol) {
  const int C = nerve.component_count();
  if (C > 24) throw DomainError("enumerate_lifts: too many overlap components to enumerate");
  const std::vector<cplx> ratios = triple_ratios(nerve, base);
  const auto comps = triple_components(nerve);
  LiftEnumeration out;
  out.patterns = std::size_t{1} << C;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(C));
  for (std::size_t mask = 0; mask < out.patterns; ++mask) {
    for (int g = 0; g < C; ++g) bits[static_cast<std::size_t>(g)] = (mask >> g) & 1U;
    bool cocycle = true;
    for (std::size_t i = 0; i < ratios.size() && cocycle; ++i) {
      const int flips = bits[comps[i][0]] + bits[comps[i][1]] + bits[comps[i][2]];
      const cplx r = (flips % 2 == 1) ? -ratios[i] : ratios[i];
      cocycle = std::abs(r - 1.0) <= tol.track;
    }
    if (!cocycle) continue;
    ++out.cocycles;
    bool known = false;
    for (const auto& rep : out.classes) {
      std::vector<std::uint8_t> diff(bits.size());
      for (std::size_t g = 0; g < bits.size(); ++g) diff[g] = bits[g] ^ rep[g];
      if (ratio_bits_equivalent(nerve, diff)) {
        known = true;
        break;
      }
    }
    if (!known) out.classes.push_back(bits);
  }
  return out;
}

}  // namespace hfe
