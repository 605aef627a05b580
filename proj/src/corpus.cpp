#include "hfe/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <unordered_set>

namespace hfe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Nerve assembly ----------------------------------------------------------------

struct Layout {
  std::vector<SamplePoint> points;
  std::vector<Edge> edges;
  std::vector<std::string> ids;
  std::vector<std::vector<int>> members;
  std::vector<std::vector<std::vector<double>>> local;
};

// Charts take the edges inside them; overlap components are the connected
// pieces of the induced graph, listed in breadth-first order.
Nerve assemble(const Layout& L) {
  Nerve nv;
  nv.points = L.points;
  std::vector<std::unordered_set<int>> sets;
  for (std::size_t c = 0; c < L.members.size(); ++c) {
    sets.emplace_back(L.members[c].begin(), L.members[c].end());
    Chart chart;
    chart.id = L.ids[c];
    chart.points = L.members[c];
    if (c < L.local.size()) chart.local = L.local[c];
    for (const Edge& e : L.edges)
      if (sets[c].count(e[0]) && sets[c].count(e[1])) chart.edges.push_back(e);
    nv.charts.push_back(std::move(chart));
  }
  std::vector<std::vector<int>> adj(L.points.size());
  for (const Edge& e : L.edges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  for (int a = 0; a < static_cast<int>(sets.size()); ++a)
    for (int b = a + 1; b < static_cast<int>(sets.size()); ++b) {
      std::unordered_set<int> inter;
      for (int p : L.members[a])
        if (sets[b].count(p)) inter.insert(p);
      if (inter.empty()) continue;
      Overlap ov{a, b, {}};
      std::unordered_set<int> seen;
      for (int p : L.members[a]) {
        if (!inter.count(p) || seen.count(p)) continue;
        OverlapComponent comp;
        std::deque<int> queue{p};
        seen.insert(p);
        while (!queue.empty()) {
          const int u = queue.front();
          queue.pop_front();
          comp.points.push_back(u);
          for (int v : adj[u])
            if (inter.count(v) && !seen.count(v)) {
              seen.insert(v);
              queue.push_back(v);
            }
        }
        std::unordered_set<int> in(comp.points.begin(), comp.points.end());
        for (const Edge& e : L.edges)
          if (in.count(e[0]) && in.count(e[1])) comp.edges.push_back(e);
        ov.components.push_back(std::move(comp));
      }
      nv.overlaps.push_back(std::move(ov));
    }
  nv.finalize();
  nv.triples = derive_triples(nv);
  nv.finalize();
  return nv;
}

template <class T, class F>
Cocycle<T> tabulate(const Nerve& nv, GroupKind group, int n, int k, F&& f) {
  Cocycle<T> c;
  c.group = group;
  c.n = n;
  c.k = k;
  c.values.resize(nv.overlaps.size());
  for (std::size_t o = 0; o < nv.overlaps.size(); ++o) {
    const Overlap& ov = nv.overlaps[o];
    c.values[o].resize(ov.components.size());
    for (std::size_t q = 0; q < ov.components.size(); ++q)
      for (int p : ov.components[q].points) c.values[o][q].push_back(f(ov.a, ov.b, p));
  }
  return c;
}

template <class T, class F>
std::vector<std::vector<T>> chart_table(const Nerve& nv, F&& f) {
  std::vector<std::vector<T>> out(nv.charts.size());
  for (int c = 0; c < nv.chart_count(); ++c)
    for (std::size_t s = 0; s < nv.charts[c].points.size(); ++s) out[c].push_back(f(c, s));
  return out;
}

CMat scalar(cplx z) { return CMat::Constant(1, 1, z); }

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Circle ------------------------------------------------------------------------
//
// 20 points x = 0.05 i on R/Z. Chart a is the arc (-0.1, 0.6), chart b the
// arc (0.4, 1.1); their overlap has the components near x = 0.5 and near
// x = 0, the latter carrying the twist.

constexpr int kCircle = 20;

double circle_x(int i) { return 0.05 * i; }

bool in_arc_a(int i) { return i <= 11 || i == 19; }
bool in_arc_b(int i) { return i >= 9 || i <= 1; }
bool twist_region(double x) { return x < 0.2 || x > 0.8; }

// Chart-local coordinate of x on arc 0 (a) or 1 (b).
double arc_local(int arc, double x) {
  if (arc == 0) return x > 0.8 ? x - 1.0 : x;
  return x < 0.2 ? x + 1.0 : x;
}

std::vector<int> arc_members(int arc) {
  std::vector<int> out;
  if (arc == 0) {
    out.push_back(19);
    for (int i = 0; i <= 11; ++i) out.push_back(i);
  } else {
    for (int i = 9; i < kCircle; ++i) out.push_back(i);
    out.push_back(0);
    out.push_back(1);
  }
  return out;
}

Nerve circle_nerve() {
  Layout L;
  for (int i = 0; i < kCircle; ++i) {
    L.points.push_back({{circle_x(i)}});
    L.edges.push_back({i, (i + 1) % kCircle});
  }
  L.ids = {"a", "b"};
  for (int arc = 0; arc < 2; ++arc) {
    L.members.push_back(arc_members(arc));
    std::vector<std::vector<double>> loc;
    for (int p : L.members.back()) loc.push_back({arc_local(arc, circle_x(p))});
    L.local.push_back(std::move(loc));
  }
  return assemble(L);
}

double point_x(const Nerve& nv, int p) { return nv.points[p].coords[0]; }

// The scalar pair data with delta_alpha = lambda_alpha: g2 = lambda_b / (lambda_a conj(g1)).
template <class G1, class Lambda>
PairCase scalar_pair(const Nerve& nv, const std::string& name, G1&& g1, Lambda&& lambda) {
  PairCase pc;
  pc.name = name;
  pc.k = 0;
  pc.data.pair_cocycle = tabulate<GlPair>(nv, GroupKind::Glkd, 1, 0, [&](int a, int b, int p) {
    const cplx t = g1(a, b, p);
    return GlPair{scalar(t), scalar(lambda(b, p) / (lambda(a, p) * std::conj(t)))};
  });
  pc.data.delta_samples = chart_table<cplx>(nv, [&](int c, std::size_t s) {
    return lambda(c, nv.charts[c].points[s]);
  });
  return pc;
}

LagFrame ball_frame(cplx w, cplx c) {
  return phi_inv(BallPoint(scalar(w)), GlElement(scalar(c)));
}

Scenario circle_mobius() {
  Scenario sc;
  sc.name = "circle_mobius";
  sc.description =
      "Two arcs covering the circle with two overlap components; the first polarization carries a "
      "det = -1 twist on one component, so its metalinear lifts form two classes.";
  sc.n = 1;
  sc.nerve = circle_nerve();
  const Nerve& nv = sc.nerve;
  const double c_h[2] = {0.3, 0.7};
  auto h = [&](int chart, int p) { return std::exp(I_unit * c_h[chart] * std::sin(kTwoPi * point_x(nv, p))); };
  auto g1 = [&](int a, int b, int p) {
    const double sign = twist_region(point_x(nv, p)) ? -1.0 : 1.0;
    return sign * h(b, p) / h(a, p);
  };
  sc.cocycle = tabulate<CMat>(nv, GroupKind::Gl, 1, 0, [&](int a, int b, int p) { return scalar(g1(a, b, p)); });
  auto lambda = [&](int chart, int p) {
    const double x = point_x(nv, p);
    return chart == 0 ? 2.0 * std::exp(0.3 * I_unit * std::sin(kTwoPi * x))
                      : cplx(1.0, 1.0) * std::exp(0.2 * I_unit * std::cos(kTwoPi * x));
  };
  sc.pairs.push_back(scalar_pair(nv, "mobius", g1, lambda));

  // Quarter turn on the twisted component, identity on the other.
  MetaplecticBundleData mp;
  mp.k = 0;
  mp.d_adapted = true;
  const SpElement quarter = sp_rotation({std::numbers::pi / 2});
  const MpElement quarter_lift = mp_lift(quarter).first;
  mp.mp = tabulate<MpElement>(nv, GroupKind::Mp, 1, 0, [&](int, int, int p) {
    return twist_region(point_x(nv, p)) ? quarter_lift : MpElement::identity(1);
  });
  sc.mp = mp;
  // The quarter turn sends W to -W, so the second family runs from -w0 to
  // w0 across chart a.
  const cplx w0(0.3, 0.2);
  SectionFamilies f;
  f.first.sigma = chart_table<LagFrame>(nv, [&](int, std::size_t) { return ball_frame(0.0, 1.0); });
  f.second.sigma = chart_table<LagFrame>(nv, [&](int c, std::size_t s) {
    if (c == 1) return ball_frame(w0, 1.0);
    const double x = nv.charts[c].local[s][0];
    return ball_frame(w0 * (2.0 * smoothstep((x - 0.1) / 0.3) - 1.0), 1.0);
  });
  sc.sections = std::move(f);
  sc.pipelines = {"validate", "lift",   "induce",  "delta_tilde", "uniqueness",
                  "recipe",   "delta_D", "cross_check"};
  sc.expected.lift_classes = 2;
  return sc;
}

// Torus -------------------------------------------------------------------------

int torus_index(int i, int j) { return i + kCircle * j; }

Scenario torus_grid() {
  Scenario sc;
  sc.name = "torus_grid";
  sc.description =
      "A 20 x 20 grid on the torus covered by the four products of the circle arcs; H^1(., Z/2) "
      "has rank 2, so a liftable cocycle has four classes of lifts.";
  sc.n = 1;
  Layout L;
  for (int j = 0; j < kCircle; ++j)
    for (int i = 0; i < kCircle; ++i) {
      L.points.push_back({{circle_x(i), circle_x(j)}});
      L.edges.push_back({torus_index(i, j), torus_index((i + 1) % kCircle, j)});
      L.edges.push_back({torus_index(i, j), torus_index(i, (j + 1) % kCircle)});
    }
  for (int ax = 0; ax < 2; ++ax)
    for (int ay = 0; ay < 2; ++ay) {
      L.ids.push_back(std::string(1, "ab"[ax]) + "ab"[ay]);
      std::vector<int> mem;
      std::vector<std::vector<double>> loc;
      for (int j : arc_members(ay))
        for (int i : arc_members(ax)) {
          mem.push_back(torus_index(i, j));
          loc.push_back({arc_local(ax, circle_x(i)), arc_local(ay, circle_x(j))});
        }
      L.members.push_back(std::move(mem));
      L.local.push_back(std::move(loc));
    }
  sc.nerve = assemble(L);
  const Nerve& nv = sc.nerve;
  auto xs = [&](int p) { return nv.points[p].coords[0]; };
  auto ys = [&](int p) { return nv.points[p].coords[1]; };
  // Chart c = 2 ax + ay; the twist is pulled back along x.
  auto twist = [&](int a, int b, int p) {
    return (a / 2 != b / 2 && twist_region(xs(p))) ? -1.0 : 1.0;
  };
  const double c_h[4] = {0.1, 0.25, 0.4, 0.55};
  auto h = [&](int chart, int p) {
    return std::exp(I_unit * c_h[chart] * (std::sin(kTwoPi * xs(p)) + std::cos(kTwoPi * ys(p))));
  };
  auto g1 = [&](int a, int b, int p) { return twist(a, b, p) * h(b, p) / h(a, p); };
  sc.cocycle = tabulate<CMat>(nv, GroupKind::Gl, 1, 0, [&](int a, int b, int p) { return scalar(g1(a, b, p)); });
  auto lambda = [&](int chart, int p) {
    return (1.0 + 0.3 * chart) * std::exp(0.4 * I_unit * std::sin(kTwoPi * (xs(p) + ys(p))));
  };
  sc.pairs.push_back(scalar_pair(nv, "twisted", g1, lambda));

  const double t_theta[4] = {0.2, 0.5, -0.3, 0.8};
  auto theta = [&](int chart, int p) {
    return t_theta[chart] * (std::sin(kTwoPi * xs(p)) + 0.5 * std::sin(kTwoPi * ys(p)));
  };
  MetaplecticBundleData mp;
  mp.k = 0;
  mp.d_adapted = true;
  mp.mp = tabulate<MpElement>(nv, GroupKind::Mp, 1, 0, [&](int a, int b, int p) {
    const double d = theta(a, p) - theta(b, p);
    return MpElement(sp_rotation({d}), twist(a, b, p) * std::exp(0.5 * I_unit * d));
  });
  sc.mp = mp;
  SectionFamilies f;
  f.first.sigma = chart_table<LagFrame>(nv, [&](int, std::size_t) { return ball_frame(0.0, 1.0); });
  f.second.sigma = chart_table<LagFrame>(nv, [&](int c, std::size_t s) {
    const int p = nv.charts[c].points[s];
    const cplx u = 0.4 * std::exp(kTwoPi * I_unit * xs(p)) * (0.6 + 0.3 * std::cos(kTwoPi * ys(p)));
    return ball_frame(std::exp(-2.0 * I_unit * theta(c, p)) * u, 1.0);
  });
  sc.sections = std::move(f);
  sc.pipelines = {"validate", "lift",   "induce",  "delta_tilde", "uniqueness",
                  "recipe",   "delta_D", "cross_check"};
  sc.expected.lift_classes = 4;
  return sc;
}

// Sphere ------------------------------------------------------------------------
//
// Six charts around the octahedron vertices. Each edge of the octahedron
// contributes one overlap component: a path from one adjacent face centre
// to the other through seven interior points. Face centres are the triple
// points.

Scenario sphere_octa() {
  Scenario sc;
  sc.name = "sphere_octa";
  sc.description =
      "Octahedral cover of the sphere carrying a Gl(1) cocycle that winds once along one edge; the "
      "sign defect of its square roots is odd, so no metalinear lift exists.";
  sc.n = 1;
  using V3 = std::array<double, 3>;
  auto normalize = [](V3 v) {
    const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return std::vector<double>{v[0] / r, v[1] / r, v[2] / r};
  };
  const V3 vert[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  Layout L;
  for (const V3& v : vert) L.points.push_back({normalize(v)});
  // Faces: one vertex from each axis pair.
  std::vector<std::array<int, 3>> faces;
  for (int x = 0; x < 2; ++x)
    for (int y = 2; y < 4; ++y)
      for (int z = 4; z < 6; ++z) {
        faces.push_back({x, y, z});
        V3 c{};
        for (int v : {x, y, z})
          for (int d = 0; d < 3; ++d) c[d] += vert[v][d];
        L.points.push_back({normalize(c)});
      }
  auto face_point = [](int f) { return 6 + f; };
  std::vector<std::vector<int>> members(6);
  for (int v = 0; v < 6; ++v) members[v].push_back(v);
  constexpr int kInterior = 7;
  for (int u = 0; u < 6; ++u)
    for (int v = u + 1; v < 6; ++v) {
      if (v == u + 1 && u % 2 == 0) continue;  // antipodal
      std::vector<int> fs;
      for (int f = 0; f < 8; ++f)
        if (std::count(faces[f].begin(), faces[f].end(), u) && std::count(faces[f].begin(), faces[f].end(), v)) fs.push_back(f);
      int prev = face_point(fs[0]);
      const auto& p0 = L.points[face_point(fs[0])].coords;
      const auto& p1 = L.points[face_point(fs[1])].coords;
      int middle = -1;
      for (int j = 1; j <= kInterior; ++j) {
        const double t = double(j) / (kInterior + 1);
        V3 mid{};
        for (int d = 0; d < 3; ++d) mid[d] = (1 - t) * p0[d] + t * p1[d] + 0.25 * (vert[u][d] + vert[v][d]) * std::sin(std::numbers::pi * t);
        const int id = static_cast<int>(L.points.size());
        L.points.push_back({normalize(mid)});
        L.edges.push_back({prev, id});
        prev = id;
        members[u].push_back(id);
        members[v].push_back(id);
        if (j == (kInterior + 1) / 2) middle = id;
      }
      L.edges.push_back({prev, face_point(fs[1])});
      L.edges.push_back({u, middle});
      L.edges.push_back({v, middle});
    }
  for (int f = 0; f < 8; ++f)
    for (int v : faces[f]) members[v].push_back(face_point(f));
  L.members = members;
  L.ids = {"+x", "-x", "+y", "-y", "+z", "-z"};
  sc.nerve = assemble(L);
  const Nerve& nv = sc.nerve;
  // e^{2 pi i s} along the component of (+x, +y), s running 0 -> 1 from its
  // first point in path order; 1 elsewhere.
  const int wind_o = nv.overlap_index(0, 2);
  std::vector<double> s_of(nv.points.size(), 0.0);
  {
    const OverlapComponent& comp = nv.overlaps[wind_o].components[0];
    // Order the path from one end.
    std::vector<int> deg(nv.points.size(), 0);
    for (const Edge& e : comp.edges) ++deg[e[0]], ++deg[e[1]];
    int start = -1;
    for (int p : comp.points)
      if (deg[p] == 1 && (start < 0 || p < start)) start = p;
    std::vector<int> path{start};
    std::unordered_set<int> used{start};
    while (path.size() < comp.points.size()) {
      for (const Edge& e : comp.edges) {
        const int a = e[0], b = e[1], last = path.back();
        const int next = a == last ? b : (b == last ? a : -1);
        if (next >= 0 && !used.count(next)) {
          path.push_back(next);
          used.insert(next);
          break;
        }
      }
    }
    for (std::size_t i = 0; i < path.size(); ++i) s_of[path[i]] = double(i) / double(path.size() - 1);
  }
  sc.cocycle = tabulate<CMat>(nv, GroupKind::Gl, 1, 0, [&](int a, int b, int p) {
    if (nv.overlap_index(a, b) != wind_o) return scalar(1.0);
    return scalar(std::exp(kTwoPi * I_unit * s_of[p]));
  });
  sc.pipelines = {"validate", "lift"};
  sc.expected.obstructed = true;
  return sc;
}

// Plane -------------------------------------------------------------------------

LagFrame frame1(cplx u, cplx v) { return validate_lagrangian(scalar(u), scalar(v)); }

Scenario trivial_r2() {
  Scenario sc;
  sc.name = "trivial_r2";
  sc.description =
      "R^2 with one chart: vertical/holomorphic (k = 0), horizontal/horizontal (k = 1) and the "
      "diagonal pairs of the frames (1, i) and (1, -i).";
  sc.n = 1;
  Layout L;
  constexpr int kPoints = 5;
  for (int i = 0; i < kPoints; ++i) {
    L.points.push_back({{0.25 * i, 0.0}});
    if (i + 1 < kPoints) L.edges.push_back({i, i + 1});
  }
  L.ids = {"plane"};
  L.members.push_back({0, 1, 2, 3, 4});
  sc.nerve = assemble(L);
  const Nerve& nv = sc.nerve;
  auto make_pair = [&](const std::string& name, int k, const LagFrame& f1, const LagFrame& f2, bool self) {
    PairCase pc;
    pc.name = name;
    pc.k = k;
    pc.self_compat = self;
    pc.data.pair_cocycle = tabulate<GlPair>(nv, GroupKind::Glkd, 1, k, [](int, int, int) {
      return GlPair{scalar(1.0), scalar(1.0)};
    });
    pc.data.delta_samples = chart_table<cplx>(nv, [&](int, std::size_t) { return delta(make_frame_pair(f1, f2, k)); });
    return pc;
  };
  const LagFrame vertical = frame1(0.0, 1.0), horizontal = frame1(1.0, 0.0);
  const LagFrame holo = frame1(1.0, I_unit), antiholo = frame1(1.0, -I_unit);
  sc.pairs.push_back(make_pair("vertical_holomorphic", 0, vertical, holo, false));
  sc.pairs.push_back(make_pair("horizontal", 1, horizontal, horizontal, false));
  sc.pairs.push_back(make_pair("diagonal_positive", 0, holo, holo, true));
  sc.pairs.push_back(make_pair("diagonal_negative", 0, antiholo, antiholo, true));
  MetaplecticBundleData mp;
  mp.k = 0;
  mp.d_adapted = true;
  mp.mp = tabulate<MpElement>(nv, GroupKind::Mp, 1, 0, [](int, int, int) { return MpElement::identity(1); });
  sc.mp = mp;
  SectionFamilies f;
  f.first.sigma = chart_table<LagFrame>(nv, [&](int, std::size_t) { return vertical; });
  f.second.sigma = chart_table<LagFrame>(nv, [&](int, std::size_t) { return holo; });
  sc.sections = std::move(f);
  sc.pipelines = {"validate", "lift", "induce", "delta_tilde", "uniqueness",
                  "self_compat", "recipe", "delta_D", "cross_check"};
  sc.expected.lift_classes = 1;
  return sc;
}

// k = 1 over the circle -----------------------------------------------------------
//
// n = 2 frames U = [[A, B], [0, Ur]], V = [[0, 0], [0, Vr]] with
// (Ur, Vr) = Phi^{-1}(w, c). The twisted component carries an Sp_1 element
// with A_g = -1; chart a interpolates between g F N^{-1} and F.

struct BlockParams {
  double A;
  cplx B, w, c;
};

LagFrame block_frame(const BlockParams& q) {
  CMat U = CMat::Zero(2, 2), V = CMat::Zero(2, 2);
  U(0, 0) = q.A;
  U(0, 1) = q.B;
  U(1, 1) = 0.5 * (1.0 + q.w) * q.c;
  V(1, 1) = 0.5 * I_unit * (1.0 - q.w) * q.c;
  return validate_lagrangian(U, V);
}

BlockParams block_params(const CMat& U, const CMat& V) {
  const cplx c = U(1, 1) - I_unit * V(1, 1);
  return {U(0, 0).real(), U(0, 1), (U(1, 1) + I_unit * V(1, 1)) / c, c};
}

BlockParams blend(const BlockParams& p, const BlockParams& q, double t) {
  return {(1 - t) * p.A + t * q.A, (1 - t) * p.B + t * q.B, (1 - t) * p.w + t * q.w,
          p.c * std::exp(t * std::log(q.c / p.c))};
}

Scenario abstract_k1_nonorientable() {
  Scenario sc;
  sc.name = "abstract_k1_nonorientable";
  sc.description =
      "n = 2, k = 1 over the circle cover; the transition on one component lies in the det A_g < 0 "
      "part of Sp_1, so the induced metalinear transitions reach both components of Ml_1^2.";
  sc.n = 2;
  sc.nerve = circle_nerve();
  const Nerve& nv = sc.nerve;
  RMat S(2, 2);
  S << 0.2, 0.1, 0.1, -0.3;
  const SpElement g = make_spk(RMat::Constant(1, 1, -1.0), RMat::Constant(1, 1, 0.3), S, sp_rotation({0.7}));
  const MpElement gt = mp_lift(g).first;
  MetaplecticBundleData mp;
  mp.k = 1;
  mp.d_adapted = true;
  mp.mp = tabulate<MpElement>(nv, GroupKind::Mp, 2, 1, [&](int, int, int p) {
    return twist_region(point_x(nv, p)) ? gt : MpElement::identity(2);
  });
  sc.mp = mp;
  auto amp = [](double x) { return 1.2 + 0.3 * std::sin(kTwoPi * x); };
  auto F1 = [&](double x) {
    const cplx e = std::exp(kTwoPi * I_unit * x);
    return BlockParams{amp(x), 0.4 * e, 0.3 * e,
                       (1.0 + 0.2 * std::cos(kTwoPi * x)) * std::exp(0.3 * I_unit * std::sin(kTwoPi * x))};
  };
  auto F2 = [&](double x) {
    return BlockParams{amp(x), cplx(-0.2, 0.3 * std::cos(kTwoPi * x)), cplx(-0.25, 0.2 * std::sin(kTwoPi * x)),
                       0.8 * std::exp(-0.2 * I_unit * std::cos(kTwoPi * x))};
  };
  CMat N1(2, 2), N2(2, 2);
  N1 << -1.0, 0.25, 0.0, cplx(1.1, 0.2);
  N2 << -1.0, cplx(0.0, -0.4), 0.0, cplx(0.9, -0.3);
  auto family = [&](auto&& F, const CMat& N) {
    FrameSectionData d;
    d.sigma = chart_table<LagFrame>(nv, [&](int c, std::size_t s) {
      const double x = nv.charts[c].local[s][0];
      if (c == 1) return block_frame(F(x));
      const LagFrame f = block_frame(F(x + 1.0));
      const CMat gX = g.matrix().cast<cplx>() * f.stacked();
      const CMat Ninv = N.inverse();
      const BlockParams moved = block_params(gX.topRows(2) * Ninv, gX.bottomRows(2) * Ninv);
      return block_frame(blend(moved, F(x), smoothstep((x - 0.1) / 0.3)));
    });
    return d;
  };
  SectionFamilies f;
  f.first = family(F1, N1);
  f.second = family(F2, N2);
  sc.sections = std::move(f);
  sc.pipelines = {"validate", "recipe", "delta_D", "cross_check"};
  return sc;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"trivial_r2", "circle_mobius", "torus_grid", "sphere_octa",
                                                 "abstract_k1_nonorientable"};
  return names;
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "trivial_r2") return trivial_r2();
  if (name == "circle_mobius") return circle_mobius();
  if (name == "torus_grid") return torus_grid();
  if (name == "sphere_octa") return sphere_octa();
  if (name == "abstract_k1_nonorientable") return abstract_k1_nonorientable();
  throw DomainError("unknown built-in scenario \"" + name + "\"");
}

}  // namespace hfe
