#include "hfe/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hfe/tracking.hpp"

namespace hfe {

using nlohmann::json;

namespace {

// Reading ------------------------------------------------------------------

std::string at_key(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at_index(const std::string& path, std::size_t i) {
  return path + "/" + std::to_string(i);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path, "missing key \"" + key + "\"");
  return *it;
}

const json& require_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  return j;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.get<int>();
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return j.get<double>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ParseError(path, "expected true or false");
  return j.get<bool>();
}

// A complex number is a number or a pair [re, im].
cplx as_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ParseError(path, "expected a number or [re, im]");
}

CMat as_cmat(const json& j, const std::string& path, int rows = -1, int cols = -1) {
  require_array(j, path);
  const int r = static_cast<int>(j.size());
  if (rows >= 0 && r != rows) {
    throw ParseError(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(r));
  }
  int c = cols;
  CMat m;
  for (int i = 0; i < r; ++i) {
    const std::string pi = at_index(path, static_cast<std::size_t>(i));
    require_array(j[i], pi);
    if (c < 0) c = static_cast<int>(j[i].size());
    if (static_cast<int>(j[i].size()) != c) throw ParseError(pi, "ragged matrix row");
    if (i == 0) m.resize(r, c);
    for (int k = 0; k < c; ++k) m(i, k) = as_complex(j[i][k], at_index(pi, static_cast<std::size_t>(k)));
  }
  if (r == 0) m.resize(0, std::max(c, 0));
  return m;
}

RMat as_rmat(const json& j, const std::string& path, int rows = -1, int cols = -1) {
  const CMat m = as_cmat(j, path, rows, cols);
  if (m.size() > 0 && m.imag().cwiseAbs().maxCoeff() != 0.0) {
    throw ParseError(path, "expected a real matrix");
  }
  return m.real();
}

std::vector<int> as_int_list(const json& j, const std::string& path) {
  require_array(j, path);
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_int(j[i], at_index(path, i)));
  return out;
}

std::vector<double> as_double_list(const json& j, const std::string& path) {
  require_array(j, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double(j[i], at_index(path, i)));
  return out;
}

std::vector<Edge> as_edges(const json& j, const std::string& path) {
  require_array(j, path);
  std::vector<Edge> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto v = as_int_list(j[i], at_index(path, i));
    if (v.size() != 2) throw ParseError(at_index(path, i), "an edge has two endpoints");
    out.push_back({v[0], v[1]});
  }
  return out;
}

std::vector<std::vector<double>> as_coords(const json& j, const std::string& path) {
  require_array(j, path);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double_list(j[i], at_index(path, i)));
  return out;
}

int chart_ref(const json& j, const std::vector<Chart>& charts, const std::string& path) {
  if (j.is_string()) {
    for (std::size_t c = 0; c < charts.size(); ++c)
      if (charts[c].id == j.get<std::string>()) return static_cast<int>(c);
    throw ParseError(path, "unknown chart id \"" + j.get<std::string>() + "\"");
  }
  const int c = as_int(j, path);
  if (c < 0 || c >= static_cast<int>(charts.size())) throw ParseError(path, "chart index out of range");
  return c;
}

Nerve read_nerve(const json& j, const std::string& path) {
  Nerve nerve;
  const std::string pp = at_key(path, "points");
  if (j.contains("points")) {
    for (auto& c : as_coords(j["points"], pp)) nerve.points.push_back({std::move(c)});
  }
  const json& charts = require_array(require(j, "charts", path), at_key(path, "charts"));
  int max_point = -1;
  for (std::size_t c = 0; c < charts.size(); ++c) {
    const std::string pc = at_index(at_key(path, "charts"), c);
    Chart chart;
    chart.id = charts[c].contains("id") ? as_string(charts[c]["id"], at_key(pc, "id"))
                                        : std::to_string(c);
    for (const Chart& other : nerve.charts)
      if (other.id == chart.id) throw ParseError(at_key(pc, "id"), "duplicate chart id");
    chart.points = as_int_list(require(charts[c], "points", pc), at_key(pc, "points"));
    if (charts[c].contains("edges")) chart.edges = as_edges(charts[c]["edges"], at_key(pc, "edges"));
    if (charts[c].contains("local")) chart.local = as_coords(charts[c]["local"], at_key(pc, "local"));
    if (charts[c].contains("contractible")) {
      chart.contractible = as_bool(charts[c]["contractible"], at_key(pc, "contractible"));
    }
    for (int p : chart.points) max_point = std::max(max_point, p);
    nerve.charts.push_back(std::move(chart));
  }
  if (j.contains("overlaps")) {
    const std::string po = at_key(path, "overlaps");
    const json& overlaps = require_array(j["overlaps"], po);
    for (std::size_t o = 0; o < overlaps.size(); ++o) {
      const std::string pov = at_index(po, o);
      const json& pair = require(overlaps[o], "pair", pov);
      if (!pair.is_array() || pair.size() != 2) throw ParseError(at_key(pov, "pair"), "expected [a, b]");
      Overlap ov;
      ov.a = chart_ref(pair[0], nerve.charts, at_index(at_key(pov, "pair"), 0));
      ov.b = chart_ref(pair[1], nerve.charts, at_index(at_key(pov, "pair"), 1));
      if (ov.a >= ov.b) throw ParseError(at_key(pov, "pair"), "overlap pairs must be sorted a < b");
      const std::string pcs = at_key(pov, "components");
      const json& comps = require_array(require(overlaps[o], "components", pov), pcs);
      for (std::size_t q = 0; q < comps.size(); ++q) {
        const std::string pq = at_index(pcs, q);
        OverlapComponent comp;
        comp.points = as_int_list(require(comps[q], "points", pq), at_key(pq, "points"));
        if (comps[q].contains("edges")) comp.edges = as_edges(comps[q]["edges"], at_key(pq, "edges"));
        if (comps[q].contains("local")) comp.local = as_coords(comps[q]["local"], at_key(pq, "local"));
        if (comps[q].contains("contractible")) {
          comp.contractible = as_bool(comps[q]["contractible"], at_key(pq, "contractible"));
        }
        ov.components.push_back(std::move(comp));
      }
      nerve.overlaps.push_back(std::move(ov));
    }
  }
  while (static_cast<int>(nerve.points.size()) <= max_point) nerve.points.push_back({});
  const bool explicit_triples = j.contains("triples");
  if (explicit_triples) {
    const std::string pt = at_key(path, "triples");
    const json& triples = require_array(j["triples"], pt);
    for (std::size_t t = 0; t < triples.size(); ++t) {
      const std::string ptt = at_index(pt, t);
      const json& cs = require(triples[t], "charts", ptt);
      if (!cs.is_array() || cs.size() != 3) throw ParseError(at_key(ptt, "charts"), "expected [a, b, c]");
      Triple tr;
      tr.a = chart_ref(cs[0], nerve.charts, at_key(ptt, "charts"));
      tr.b = chart_ref(cs[1], nerve.charts, at_key(ptt, "charts"));
      tr.c = chart_ref(cs[2], nerve.charts, at_key(ptt, "charts"));
      const std::string pps = at_key(ptt, "points");
      const json& pts = require_array(require(triples[t], "points", ptt), pps);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string pi = at_index(pps, i);
        TriplePoint tp;
        tp.point = as_int(require(pts[i], "point", pi), at_key(pi, "point"));
        const auto comps = as_int_list(require(pts[i], "components", pi), at_key(pi, "components"));
        if (comps.size() != 3) throw ParseError(at_key(pi, "components"), "expected three components");
        tp.components = {comps[0], comps[1], comps[2]};
        tr.points.push_back(tp);
      }
      nerve.triples.push_back(std::move(tr));
    }
  }
  try {
    nerve.finalize();
    if (!explicit_triples) {
      nerve.triples = derive_triples(nerve);
      nerve.finalize();
    }
  } catch (const DomainError& e) {
    throw ParseError(path, e.what());
  }
  return nerve;
}

// Generators -----------------------------------------------------------------

struct PointContext {
  const std::vector<double>* global;
  const std::vector<double>* local;

  double coordinate(const json& params, const std::string& path) const {
    const int i = params.contains("coord") ? as_int(params["coord"], at_key(path, "coord")) : 0;
    const bool use_local = params.contains("local") && as_bool(params["local"], at_key(path, "local"));
    const std::vector<double>* v = use_local ? local : global;
    if (v == nullptr || i < 0 || i >= static_cast<int>(v->size())) {
      throw ParseError(path, "coordinate " + std::to_string(i) + " is not available at this point");
    }
    return (*v)[static_cast<std::size_t>(i)];
  }
};

struct Generator {
  std::string name;
  json params;
  std::string path;
};

Generator read_generator(const json& j, const std::string& path) {
  const json& g = require(j, "generator", path);
  const std::string pg = at_key(path, "generator");
  Generator out{as_string(require(g, "name", pg), at_key(pg, "name")),
                g.contains("params") ? g["params"] : json::object(), at_key(pg, "params")};
  if (!out.params.is_object()) throw ParseError(out.path, "expected an object");
  return out;
}

const json& table_entry(const Generator& g, std::size_t slot, std::size_t size) {
  const json& values = require_array(require(g.params, "values", g.path), at_key(g.path, "values"));
  if (values.size() != size) {
    throw ParseError(at_key(g.path, "values"), "table has " + std::to_string(values.size()) +
                                                   " entries for " + std::to_string(size) + " points");
  }
  return values[slot];
}

[[noreturn]] void unknown_generator(const Generator& g, const char* group) {
  throw ParseError(g.path, "unknown generator \"" + g.name + "\" for group " + group);
}

CMat gl_value(const Generator& g, int n, const PointContext& ctx, std::size_t slot, std::size_t size) {
  const CMat id = CMat::Identity(n, n);
  if (g.name == "identity") return id;
  if (g.name == "constant") return as_cmat(require(g.params, "matrix", g.path), at_key(g.path, "matrix"), n, n);
  if (g.name == "sign") return as_double(require(g.params, "value", g.path), at_key(g.path, "value")) * id;
  if (g.name == "phase") {
    const double w = g.params.contains("winding") ? as_double(g.params["winding"], at_key(g.path, "winding")) : 1.0;
    const double off = g.params.contains("offset") ? as_double(g.params["offset"], at_key(g.path, "offset")) : 0.0;
    return std::exp(2.0 * std::numbers::pi * I_unit * (w * ctx.coordinate(g.params, g.path) + off)) * id;
  }
  if (g.name == "table") {
    return as_cmat(table_entry(g, slot, size), at_index(at_key(g.path, "values"), slot), n, n);
  }
  unknown_generator(g, "Gl");
}

GlPair pair_value(const Generator& g, int n, const PointContext& ctx, std::size_t slot, std::size_t size) {
  if (g.name == "identity") return {CMat::Identity(n, n), CMat::Identity(n, n)};
  if (g.name == "constant" || g.name == "table") {
    const json& e = g.name == "table" ? table_entry(g, slot, size) : g.params;
    const std::string pe = g.name == "table" ? at_index(at_key(g.path, "values"), slot) : g.path;
    return {as_cmat(require(e, "g1", pe), at_key(pe, "g1"), n, n),
            as_cmat(require(e, "g2", pe), at_key(pe, "g2"), n, n)};
  }
  (void)ctx;
  unknown_generator(g, "Gl_k^2");
}

MlElement ml_value(const Generator& g, int n, std::size_t slot, std::size_t size, const Tolerances& tol) {
  if (g.name == "identity") return MlElement::identity(n);
  if (g.name == "constant" || g.name == "table") {
    const json& e = g.name == "table" ? table_entry(g, slot, size) : g.params;
    const std::string pe = g.name == "table" ? at_index(at_key(g.path, "values"), slot) : g.path;
    try {
      return MlElement(as_cmat(require(e, "A", pe), at_key(pe, "A"), n, n),
                       as_complex(require(e, "z", pe), at_key(pe, "z")), tol);
    } catch (const DomainError& err) {
      throw ParseError(pe, err.what());
    }
  }
  unknown_generator(g, "Ml");
}

SpElement sp_value(const Generator& g, int n, const PointContext& ctx, std::size_t slot,
                   std::size_t size, const Tolerances& tol) {
  try {
    if (g.name == "identity") return SpElement::identity(n);
    if (g.name == "constant") {
      return sp_validate(as_rmat(require(g.params, "matrix", g.path), at_key(g.path, "matrix"), 2 * n, 2 * n), tol);
    }
    if (g.name == "table") {
      const json& e = table_entry(g, slot, size);
      const std::string pe = at_index(at_key(g.path, "values"), slot);
      return sp_validate(as_rmat(require(e, "g", pe), at_key(pe, "g"), 2 * n, 2 * n), tol);
    }
    if (g.name == "sp_rotation") {
      std::vector<double> theta;
      if (g.params.contains("theta")) {
        theta = as_double_list(g.params["theta"], at_key(g.path, "theta"));
      } else {
        const auto scale = as_double_list(require(g.params, "scale", g.path), at_key(g.path, "scale"));
        std::vector<double> offset(scale.size(), 0.0);
        if (g.params.contains("offset")) offset = as_double_list(g.params["offset"], at_key(g.path, "offset"));
        if (offset.size() != scale.size()) throw ParseError(at_key(g.path, "offset"), "length differs from scale");
        const double x = ctx.coordinate(g.params, g.path);
        for (std::size_t i = 0; i < scale.size(); ++i) theta.push_back(offset[i] + scale[i] * x);
      }
      if (static_cast<int>(theta.size()) != n) throw ParseError(g.path, "one angle per plane expected");
      return sp_rotation(theta);
    }
    if (g.name == "spk") {
      const int k = as_int(require(g.params, "k", g.path), at_key(g.path, "k"));
      if (k < 0 || k > n) throw ParseError(at_key(g.path, "k"), "k out of range");
      const RMat A = as_rmat(require(g.params, "A_g", g.path), at_key(g.path, "A_g"), k, k);
      const RMat B = g.params.contains("B_g") ? as_rmat(g.params["B_g"], at_key(g.path, "B_g"), k, n - k)
                                              : RMat::Zero(k, n - k);
      const RMat S = g.params.contains("S") ? as_rmat(g.params["S"], at_key(g.path, "S"), n, n)
                                            : RMat::Zero(n, n);
      const SpElement gr =
          g.params.contains("g_r")
              ? sp_validate(as_rmat(g.params["g_r"], at_key(g.path, "g_r"), 2 * (n - k), 2 * (n - k)), tol)
              : SpElement::identity(n - k);
      return make_spk(A, B, S, gr, tol);
    }
  } catch (const DomainError& err) {
    throw ParseError(g.path, err.what());
  }
  unknown_generator(g, "Sp");
}

template <class T, class F>
Cocycle<T> read_cocycle(const json& j, const std::string& path, const Nerve& nerve, F&& value) {
  Cocycle<T> c;
  const std::string group = as_string(require(j, "group", path), at_key(path, "group"));
  const auto kind = group_from_string(group);
  if (!kind) throw ParseError(at_key(path, "group"), "unknown group \"" + group + "\"");
  c.group = *kind;
  c.n = as_int(require(j, "n", path), at_key(path, "n"));
  if (c.n < 1) throw ParseError(at_key(path, "n"), "n must be positive");
  c.k = j.contains("k") ? as_int(j["k"], at_key(path, "k")) : 0;
  if (c.k < 0 || c.k > c.n) throw ParseError(at_key(path, "k"), "k out of range");
  c.values.resize(nerve.overlaps.size());
  std::vector<std::vector<bool>> seen(nerve.overlaps.size());
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    c.values[o].resize(nerve.overlaps[o].components.size());
    seen[o].assign(nerve.overlaps[o].components.size(), false);
  }
  const std::string pt = at_key(path, "transitions");
  const json& ts = require_array(require(j, "transitions", path), pt);
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const std::string ptt = at_index(pt, t);
    const json& pair = require(ts[t], "pair", ptt);
    if (!pair.is_array() || pair.size() != 2) throw ParseError(at_key(ptt, "pair"), "expected [a, b]");
    const int a = chart_ref(pair[0], nerve.charts, at_key(ptt, "pair"));
    const int b = chart_ref(pair[1], nerve.charts, at_key(ptt, "pair"));
    const int o = nerve.overlap_index(a, b);
    if (o < 0 || a >= b) throw ParseError(at_key(ptt, "pair"), "no overlap (a, b) with a < b");
    const int q = ts[t].contains("component") ? as_int(ts[t]["component"], at_key(ptt, "component")) : 0;
    const auto& comps = nerve.overlaps[o].components;
    if (q < 0 || q >= static_cast<int>(comps.size())) throw ParseError(at_key(ptt, "component"), "no such component");
    if (seen[o][q]) throw ParseError(ptt, "duplicate transition");
    seen[o][q] = true;
    const Generator g = read_generator(ts[t], ptt);
    const OverlapComponent& comp = comps[q];
    for (std::size_t s = 0; s < comp.points.size(); ++s) {
      const PointContext ctx{&nerve.points[comp.points[s]].coords, comp.local.empty() ? nullptr : &comp.local[s]};
      c.values[o][q].push_back(value(g, c.n, ctx, s, comp.points.size(), o, static_cast<std::size_t>(q)));
    }
  }
  for (std::size_t o = 0; o < seen.size(); ++o)
    for (std::size_t q = 0; q < seen[o].size(); ++q)
      if (!seen[o][q]) {
        throw ParseError(pt, "no transition for overlap (" + nerve.charts[nerve.overlaps[o].a].id + "," +
                                 nerve.charts[nerve.overlaps[o].b].id + ") component " + std::to_string(q));
      }
  return c;
}

Cocycle<MpElement> read_mp_cocycle(const json& j, const std::string& path, const Nerve& nerve,
                                   const Tolerances& tol) {
  // Sp values first; anchors are continued along each component afterwards.
  std::vector<std::vector<std::vector<cplx>>> given_zeta(nerve.overlaps.size());
  std::vector<std::vector<double>> sheet(nerve.overlaps.size());
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    given_zeta[o].resize(nerve.overlaps[o].components.size());
    sheet[o].assign(nerve.overlaps[o].components.size(), 1.0);
  }
  std::vector<std::vector<std::string>> where(nerve.overlaps.size());
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) where[o].resize(nerve.overlaps[o].components.size());
  std::vector<std::vector<std::optional<cplx>>> root_zeta(nerve.overlaps.size());
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) root_zeta[o].resize(nerve.overlaps[o].components.size());

  const auto sp = read_cocycle<SpElement>(
      j, path, nerve,
      [&](const Generator& g, int n, const PointContext& ctx, std::size_t s, std::size_t size,
          std::size_t o, std::size_t q) {
        if (s == 0) {
          where[o][q] = g.path;
          if (g.name == "table") {
            const json& values = require(g.params, "values", g.path);
            for (std::size_t i = 0; i < size && i < values.size(); ++i) {
              const std::string pe = at_index(at_key(g.path, "values"), i);
              given_zeta[o][q].push_back(as_complex(require(values[i], "zeta", pe), at_key(pe, "zeta")));
            }
          } else if (g.params.contains("zeta")) {
            root_zeta[o][q] = as_complex(g.params["zeta"], at_key(g.path, "zeta"));
          } else if (g.params.contains("sheet")) {
            const int sh = as_int(g.params["sheet"], at_key(g.path, "sheet"));
            if (sh != 1 && sh != -1) throw ParseError(at_key(g.path, "sheet"), "sheet is 1 or -1");
            sheet[o][q] = sh;
          }
        }
        return sp_value(g, n, ctx, s, size, tol);
      });
  Cocycle<MpElement> c;
  c.group = sp.group;
  c.n = sp.n;
  c.k = sp.k;
  c.values.resize(sp.values.size());
  for (std::size_t o = 0; o < sp.values.size(); ++o) {
    c.values[o].resize(sp.values[o].size());
    for (std::size_t q = 0; q < sp.values[o].size(); ++q) {
      const OverlapComponent& comp = nerve.overlaps[o].components[q];
      const auto& gs = sp.values[o][q];
      try {
        if (!given_zeta[o][q].empty()) {
          for (std::size_t s = 0; s < gs.size(); ++s) c.values[o][q].emplace_back(gs[s], given_zeta[o][q][s], tol);
          continue;
        }
        std::vector<cplx> dets(gs.size()), roots(gs.size());
        for (std::size_t s = 0; s < gs.size(); ++s) dets[s] = det(alpha(gs[s], BallPoint::zero(c.n), tol).C.matrix());
        const BfsOrder bfs = bfs_order(comp.points, comp.edges);
        for (const auto& [p, parent] : bfs.order) {
          const int s = nerve.component_slot(static_cast<int>(o), static_cast<int>(q), p);
          if (parent < 0) {
            roots[s] = root_zeta[o][q] ? *root_zeta[o][q] : sheet[o][q] * principal_sqrt(dets[s]);
          } else {
            const int sp_ = nerve.component_slot(static_cast<int>(o), static_cast<int>(q), parent);
            roots[s] = sqrt_step(dets[sp_], roots[sp_], dets[s], tol);
          }
        }
        for (std::size_t s = 0; s < gs.size(); ++s) c.values[o][q].emplace_back(gs[s], roots[s], tol);
      } catch (const std::exception& err) {
        throw ParseError(where[o][q], err.what());
      }
    }
  }
  return c;
}

template <class T, class F>
std::vector<std::vector<T>> read_chart_tables(const json& j, const std::string& path, const Nerve& nerve,
                                              F&& value) {
  std::vector<std::vector<T>> out(nerve.charts.size());
  std::vector<bool> seen(nerve.charts.size(), false);
  require_array(j, path);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string pi = at_index(path, i);
    const int c = chart_ref(require(j[i], "chart", pi), nerve.charts, at_key(pi, "chart"));
    if (seen[c]) throw ParseError(pi, "duplicate chart entry");
    seen[c] = true;
    const Generator g = read_generator(j[i], pi);
    const Chart& chart = nerve.charts[c];
    for (std::size_t s = 0; s < chart.points.size(); ++s) {
      const PointContext ctx{&nerve.points[chart.points[s]].coords, chart.local.empty() ? nullptr : &chart.local[s]};
      out[c].push_back(value(g, ctx, s, chart.points.size()));
    }
  }
  for (std::size_t c = 0; c < seen.size(); ++c)
    if (!seen[c]) throw ParseError(path, "no entry for chart " + nerve.charts[c].id);
  return out;
}

std::vector<std::vector<cplx>> read_delta_samples(const json& j, const std::string& path, const Nerve& nerve) {
  return read_chart_tables<cplx>(j, path, nerve, [](const Generator& g, const PointContext& ctx, std::size_t s, std::size_t size) {
    if (g.name == "constant") return as_complex(require(g.params, "value", g.path), at_key(g.path, "value"));
    if (g.name == "table") return as_complex(table_entry(g, s, size), at_index(at_key(g.path, "values"), s));
    if (g.name == "phase") {
      const double w = g.params.contains("winding") ? as_double(g.params["winding"], at_key(g.path, "winding")) : 1.0;
      const cplx scale = g.params.contains("scale") ? as_complex(g.params["scale"], at_key(g.path, "scale")) : cplx(1.0);
      return scale * std::exp(2.0 * std::numbers::pi * I_unit * w * ctx.coordinate(g.params, g.path));
    }
    unknown_generator(g, "delta samples");
  });
}

FrameSectionData read_sections(const json& j, const std::string& path, const Nerve& nerve, int n,
                               const Tolerances& tol) {
  FrameSectionData out;
  out.sigma = read_chart_tables<LagFrame>(
      j, path, nerve, [&](const Generator& g, const PointContext&, std::size_t s, std::size_t size) {
        const json& e = g.name == "table" ? table_entry(g, s, size) : g.params;
        const std::string pe = g.name == "table" ? at_index(at_key(g.path, "values"), s) : g.path;
        try {
          if (g.name == "constant" || g.name == "table") {
            return validate_lagrangian(as_cmat(require(e, "U", pe), at_key(pe, "U"), n, n),
                                       as_cmat(require(e, "V", pe), at_key(pe, "V"), n, n), tol);
          }
          if (g.name == "ball") {
            return phi_inv(BallPoint(as_cmat(require(e, "W", pe), at_key(pe, "W"), n, n), tol),
                           GlElement(as_cmat(require(e, "C", pe), at_key(pe, "C"), n, n), tol), tol);
          }
        } catch (const DomainError& err) {
          throw ParseError(pe, err.what());
        }
        unknown_generator(g, "sections");
      });
  return out;
}

PairCase read_pair(const json& j, const std::string& path, const Nerve& nerve, int n, const Tolerances& tol) {
  PairCase pc;
  pc.name = j.contains("name") ? as_string(j["name"], at_key(path, "name")) : "pair";
  pc.k = j.contains("k") ? as_int(j["k"], at_key(path, "k")) : 0;
  if (pc.k < 0 || pc.k > n) throw ParseError(at_key(path, "k"), "k out of range");
  const std::string pp = at_key(path, "pair_cocycle");
  pc.data.pair_cocycle = read_cocycle<GlPair>(
      require(j, "pair_cocycle", path), pp, nerve,
      [](const Generator& g, int nn, const PointContext& ctx, std::size_t s, std::size_t size, std::size_t, std::size_t) {
        return pair_value(g, nn, ctx, s, size);
      });
  if (pc.data.pair_cocycle.n != n) throw ParseError(at_key(pp, "n"), "dimension differs from the scenario");
  pc.data.pair_cocycle.k = pc.k;
  if (j.contains("delta_samples")) {
    pc.data.delta_samples = read_delta_samples(j["delta_samples"], at_key(path, "delta_samples"), nerve);
  } else if (j.contains("frames")) {
    const std::string pf = at_key(path, "frames");
    const FrameSectionData f1 = read_sections(require(j["frames"], "first", pf), at_key(pf, "first"), nerve, n, tol);
    const FrameSectionData f2 = read_sections(require(j["frames"], "second", pf), at_key(pf, "second"), nerve, n, tol);
    pc.data.delta_samples.resize(nerve.charts.size());
    for (std::size_t c = 0; c < nerve.charts.size(); ++c)
      for (std::size_t s = 0; s < f1.sigma[c].size(); ++s) {
        try {
          pc.data.delta_samples[c].push_back(delta(make_frame_pair(f1.sigma[c][s], f2.sigma[c][s], pc.k, tol), tol));
        } catch (const DomainError& err) {
          throw ParseError(pf, "chart " + nerve.charts[c].id + " point " +
                                   std::to_string(nerve.charts[c].points[s]) + ": " + err.what());
        }
      }
  } else {
    throw ParseError(path, "missing key \"delta_samples\" (or \"frames\")");
  }
  if (j.contains("ml_lift")) {
    pc.ml_lift = read_cocycle<MlElement>(
        j["ml_lift"], at_key(path, "ml_lift"), nerve,
        [&](const Generator& g, int nn, const PointContext&, std::size_t s, std::size_t size, std::size_t, std::size_t) {
          return ml_value(g, nn, s, size, tol);
        });
  }
  if (j.contains("self_compat")) pc.self_compat = as_bool(j["self_compat"], at_key(path, "self_compat"));
  return pc;
}

// Writing -------------------------------------------------------------------

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json cmat_json(const CMat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json rmat_json(const RMat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json edges_json(const std::vector<Edge>& edges) {
  json out = json::array();
  for (const Edge& e : edges) out.push_back({e[0], e[1]});
  return out;
}

json nerve_json(const Nerve& nerve) {
  json j;
  j["points"] = json::array();
  for (const auto& p : nerve.points) j["points"].push_back(p.coords);
  j["charts"] = json::array();
  for (const Chart& c : nerve.charts) {
    json cj{{"id", c.id}, {"points", c.points}, {"edges", edges_json(c.edges)}, {"contractible", c.contractible}};
    if (!c.local.empty()) cj["local"] = c.local;
    j["charts"].push_back(std::move(cj));
  }
  j["overlaps"] = json::array();
  for (const Overlap& o : nerve.overlaps) {
    json comps = json::array();
    for (const auto& q : o.components) {
      json qj{{"points", q.points}, {"edges", edges_json(q.edges)}, {"contractible", q.contractible}};
      if (!q.local.empty()) qj["local"] = q.local;
      comps.push_back(std::move(qj));
    }
    j["overlaps"].push_back({{"pair", {o.a, o.b}}, {"components", std::move(comps)}});
  }
  j["triples"] = json::array();
  for (const Triple& t : nerve.triples) {
    json pts = json::array();
    for (const TriplePoint& p : t.points) {
      pts.push_back({{"point", p.point}, {"components", {p.components[0], p.components[1], p.components[2]}}});
    }
    j["triples"].push_back({{"charts", {t.a, t.b, t.c}}, {"points", std::move(pts)}});
  }
  return j;
}

template <class T, class F>
json cocycle_json(const Nerve& nerve, const Cocycle<T>& c, F&& entry) {
  json ts = json::array();
  for (std::size_t o = 0; o < c.values.size(); ++o)
    for (std::size_t q = 0; q < c.values[o].size(); ++q) {
      json values = json::array();
      for (const T& v : c.values[o][q]) values.push_back(entry(v));
      ts.push_back({{"pair", {nerve.overlaps[o].a, nerve.overlaps[o].b}},
                    {"component", q},
                    {"generator", {{"name", "table"}, {"params", {{"values", std::move(values)}}}}}});
    }
  return {{"group", to_string(c.group)}, {"n", c.n}, {"k", c.k}, {"transitions", std::move(ts)}};
}

template <class T, class F>
json chart_tables_json(const std::vector<std::vector<T>>& tables, F&& entry) {
  json out = json::array();
  for (std::size_t c = 0; c < tables.size(); ++c) {
    json values = json::array();
    for (const T& v : tables[c]) values.push_back(entry(v));
    out.push_back({{"chart", c}, {"generator", {{"name", "table"}, {"params", {{"values", std::move(values)}}}}}});
  }
  return out;
}

json sections_json(const FrameSectionData& s) {
  return chart_tables_json(s.sigma, [](const LagFrame& f) { return json{{"U", cmat_json(f.U)}, {"V", cmat_json(f.V)}}; });
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  const Tolerances tol = Tolerances::defaults();
  Scenario sc;
  if (!j.is_object()) throw ParseError("", "a scenario is a JSON object");
  sc.name = as_string(require(j, "name", ""), "/name");
  if (j.contains("description")) sc.description = as_string(j["description"], "/description");
  sc.n = j.contains("n") ? as_int(j["n"], "/n") : 1;
  if (sc.n < 1) throw ParseError("/n", "n must be positive");
  sc.nerve = read_nerve(require(j, "nerve", ""), "/nerve");
  if (j.contains("cocycle")) {
    sc.cocycle = read_cocycle<CMat>(
        j["cocycle"], "/cocycle", sc.nerve,
        [](const Generator& g, int n, const PointContext& ctx, std::size_t s, std::size_t size, std::size_t, std::size_t) {
          return gl_value(g, n, ctx, s, size);
        });
  }
  if (j.contains("pairs")) {
    const json& pairs = require_array(j["pairs"], "/pairs");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      sc.pairs.push_back(read_pair(pairs[i], at_index("/pairs", i), sc.nerve, sc.n, tol));
    }
  }
  if (j.contains("pair_cocycle")) sc.pairs.push_back(read_pair(j, "", sc.nerve, sc.n, tol));
  for (std::size_t a = 0; a < sc.pairs.size(); ++a)
    for (std::size_t b = a + 1; b < sc.pairs.size(); ++b)
      if (sc.pairs[a].name == sc.pairs[b].name) throw ParseError("/pairs", "duplicate pair name \"" + sc.pairs[a].name + "\"");
  if (j.contains("mp_cocycle")) {
    MetaplecticBundleData mp;
    mp.mp = read_mp_cocycle(j["mp_cocycle"], "/mp_cocycle", sc.nerve, tol);
    if (mp.mp.n != sc.n) throw ParseError("/mp_cocycle/n", "dimension differs from the scenario");
    mp.d_adapted = j.contains("d_adapted") && as_bool(j["d_adapted"], "/d_adapted");
    mp.k = j.contains("k") ? as_int(j["k"], "/k") : 0;
    if (mp.k < 0 || mp.k > sc.n) throw ParseError("/k", "k out of range");
    mp.mp.k = mp.k;
    sc.mp = std::move(mp);
  }
  if (j.contains("sections")) {
    const json& s = j["sections"];
    SectionFamilies f;
    f.first = read_sections(require(s, "first", "/sections"), "/sections/first", sc.nerve, sc.n, tol);
    f.second = read_sections(require(s, "second", "/sections"), "/sections/second", sc.nerve, sc.n, tol);
    sc.sections = std::move(f);
  }
  if (j.contains("pipelines")) {
    const json& p = require_array(j["pipelines"], "/pipelines");
    for (std::size_t i = 0; i < p.size(); ++i) sc.pipelines.push_back(as_string(p[i], at_index("/pipelines", i)));
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) throw ParseError("/tolerances", "expected an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (it.key() != "rel" && it.key() != "abs" && it.key() != "singular" && it.key() != "track") {
        throw ParseError("/tolerances/" + it.key(), "unknown tolerance");
      }
      sc.tolerances[it.key()] = as_double(it.value(), "/tolerances/" + it.key());
    }
  }
  if (j.contains("expected")) {
    const json& e = j["expected"];
    if (e.contains("lift_classes")) sc.expected.lift_classes = as_int(e["lift_classes"], "/expected/lift_classes");
    if (e.contains("obstructed")) sc.expected.obstructed = as_bool(e["obstructed"], "/expected/obstructed");
  }
  return sc;
}

Scenario scenario_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  return scenario_from_json(j);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return scenario_from_text(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["description"] = s.description;
  j["n"] = s.n;
  j["nerve"] = nerve_json(s.nerve);
  if (s.cocycle) j["cocycle"] = cocycle_json(s.nerve, *s.cocycle, [](const CMat& m) { return cmat_json(m); });
  if (!s.pairs.empty()) {
    j["pairs"] = json::array();
    for (const PairCase& p : s.pairs) {
      json pj{{"name", p.name},
              {"k", p.k},
              {"self_compat", p.self_compat},
              {"pair_cocycle", cocycle_json(s.nerve, p.data.pair_cocycle, [](const GlPair& g) {
                 return json{{"g1", cmat_json(g.g1)}, {"g2", cmat_json(g.g2)}};
               })},
              {"delta_samples", chart_tables_json(p.data.delta_samples, [](cplx z) { return complex_json(z); })}};
      if (p.ml_lift) {
        pj["ml_lift"] = cocycle_json(s.nerve, *p.ml_lift, [](const MlElement& m) {
          return json{{"A", cmat_json(m.matrix())}, {"z", complex_json(m.z())}};
        });
      }
      j["pairs"].push_back(std::move(pj));
    }
  }
  if (s.mp) {
    j["mp_cocycle"] = cocycle_json(s.nerve, s.mp->mp, [](const MpElement& g) {
      return json{{"g", rmat_json(g.g().matrix())}, {"zeta", complex_json(g.zeta())}};
    });
    j["d_adapted"] = s.mp->d_adapted;
    j["k"] = s.mp->k;
  }
  if (s.sections) j["sections"] = {{"first", sections_json(s.sections->first)}, {"second", sections_json(s.sections->second)}};
  if (!s.pipelines.empty()) j["pipelines"] = s.pipelines;
  if (!s.tolerances.empty()) j["tolerances"] = s.tolerances;
  json e = json::object();
  if (s.expected.lift_classes) e["lift_classes"] = *s.expected.lift_classes;
  if (s.expected.obstructed) e["obstructed"] = *s.expected.obstructed;
  if (!e.empty()) j["expected"] = e;
  return j;
}

const json& scenario_schema() {
  static const json schema = json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "hfe scenario",
  "type": "object",
  "required": ["name", "nerve"],
  "$defs": {
    "complex": {"oneOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]},
    "matrix": {"type": "array", "items": {"type": "array", "items": {"$ref": "#/$defs/complex"}}},
    "edges": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}},
    "chartRef": {"oneOf": [{"type": "integer", "minimum": 0}, {"type": "string"}]},
    "generator": {
      "type": "object",
      "required": ["name"],
      "properties": {
        "name": {"enum": ["identity", "constant", "sign", "phase", "sp_rotation", "spk", "ball", "table"]},
        "params": {"type": "object"}
      }
    },
    "cocycle": {
      "type": "object",
      "required": ["group", "n", "transitions"],
      "properties": {
        "group": {"enum": ["Gl", "Ml", "Sp", "Mp", "Glkd", "Mlkd", "Spk"]},
        "n": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 0},
        "transitions": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["pair", "generator"],
            "properties": {
              "pair": {"type": "array", "items": {"$ref": "#/$defs/chartRef"}, "minItems": 2, "maxItems": 2},
              "component": {"type": "integer", "minimum": 0},
              "generator": {"$ref": "#/$defs/generator"}
            }
          }
        }
      }
    },
    "chartTables": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["chart", "generator"],
        "properties": {"chart": {"$ref": "#/$defs/chartRef"}, "generator": {"$ref": "#/$defs/generator"}}
      }
    },
    "pair": {
      "type": "object",
      "required": ["pair_cocycle"],
      "properties": {
        "name": {"type": "string"},
        "k": {"type": "integer", "minimum": 0},
        "self_compat": {"type": "boolean"},
        "pair_cocycle": {"$ref": "#/$defs/cocycle"},
        "delta_samples": {"$ref": "#/$defs/chartTables"},
        "frames": {
          "type": "object",
          "required": ["first", "second"],
          "properties": {"first": {"$ref": "#/$defs/chartTables"}, "second": {"$ref": "#/$defs/chartTables"}}
        },
        "ml_lift": {"$ref": "#/$defs/cocycle"}
      }
    }
  },
  "properties": {
    "name": {"type": "string"},
    "description": {"type": "string"},
    "n": {"type": "integer", "minimum": 1},
    "nerve": {
      "type": "object",
      "required": ["charts"],
      "properties": {
        "points": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "charts": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["points"],
            "properties": {
              "id": {"type": "string"},
              "points": {"type": "array", "items": {"type": "integer", "minimum": 0}},
              "edges": {"$ref": "#/$defs/edges"},
              "local": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
              "contractible": {"type": "boolean"}
            }
          }
        },
        "overlaps": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["pair", "components"],
            "properties": {
              "pair": {"type": "array", "items": {"$ref": "#/$defs/chartRef"}, "minItems": 2, "maxItems": 2},
              "components": {
                "type": "array",
                "items": {
                  "type": "object",
                  "required": ["points"],
                  "properties": {
                    "points": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "edges": {"$ref": "#/$defs/edges"},
                    "local": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
                    "contractible": {"type": "boolean"}
                  }
                }
              }
            }
          }
        },
        "triples": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["charts", "points"],
            "properties": {
              "charts": {"type": "array", "items": {"$ref": "#/$defs/chartRef"}, "minItems": 3, "maxItems": 3},
              "points": {
                "type": "array",
                "items": {
                  "type": "object",
                  "required": ["point", "components"],
                  "properties": {
                    "point": {"type": "integer", "minimum": 0},
                    "components": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 3, "maxItems": 3}
                  }
                }
              }
            }
          }
        }
      }
    },
    "cocycle": {"$ref": "#/$defs/cocycle"},
    "pairs": {"type": "array", "items": {"$ref": "#/$defs/pair"}},
    "pair_cocycle": {"$ref": "#/$defs/cocycle"},
    "delta_samples": {"$ref": "#/$defs/chartTables"},
    "mp_cocycle": {"$ref": "#/$defs/cocycle"},
    "d_adapted": {"type": "boolean"},
    "k": {"type": "integer", "minimum": 0},
    "sections": {
      "type": "object",
      "required": ["first", "second"],
      "properties": {"first": {"$ref": "#/$defs/chartTables"}, "second": {"$ref": "#/$defs/chartTables"}}
    },
    "pipelines": {
      "type": "array",
      "items": {"enum": ["validate", "lift", "induce", "delta_tilde", "uniqueness", "self_compat", "recipe", "delta_D", "cross_check"]}
    },
    "tolerances": {
      "type": "object",
      "properties": {"rel": {"type": "number"}, "abs": {"type": "number"}, "singular": {"type": "number"}, "track": {"type": "number"}},
      "additionalProperties": false
    },
    "expected": {
      "type": "object",
      "properties": {"lift_classes": {"type": "integer"}, "obstructed": {"type": "boolean"}}
    }
  }
})");
  return schema;
}

}  // namespace hfe
