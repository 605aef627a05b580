#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <type_traits>
#include <string>
#include <unordered_map>
#include <vector>

#include "hfe/core.hpp"
#include "hfe/frames.hpp"
#include "hfe/groups.hpp"

namespace hfe {

// Nerve ----------------------------------------------------------------------

struct SamplePoint {
  std::vector<double> coords;
};

using Edge = std::array<int, 2>;

/// A chart: the sample points it contains and a connected tracking graph.
/// `local` optionally carries chart-local coordinates aligned with `points`.
struct Chart {
  std::string id;
  std::vector<int> points;
  std::vector<Edge> edges;
  std::vector<std::vector<double>> local;
  bool contractible = true;
};

/// One connected component of a pairwise overlap, sampled as a graph.
struct OverlapComponent {
  std::vector<int> points;
  std::vector<Edge> edges;
  std::vector<std::vector<double>> local;
  bool contractible = true;
};

/// Overlap of charts a < b.
struct Overlap {
  int a = 0;
  int b = 0;
  std::vector<OverlapComponent> components;
};

/// A sample point of a triple intersection a < b < c with the component it
/// occupies in the overlaps (a,b), (b,c) and (a,c), in that order.
struct TriplePoint {
  int point = 0;
  std::array<int, 3> components{};
};

struct Triple {
  int a = 0;
  int b = 0;
  int c = 0;
  std::vector<TriplePoint> points;
};

/// (overlap index, component index) of a global component number.
struct ComponentRef {
  int overlap;
  int component;
};

class Nerve {
 public:
  std::vector<SamplePoint> points;
  std::vector<Chart> charts;
  std::vector<Overlap> overlaps;
  std::vector<Triple> triples;

  /// Checks the invariants (sorted chart pairs, connected graphs, triple
  /// points inside all three overlaps) and builds lookup tables. Must be
  /// called once the vectors are filled; throws DomainError.
  void finalize();

  int chart_count() const { return static_cast<int>(charts.size()); }
  /// Index into `overlaps` of the pair {a, b}, or -1.
  int overlap_index(int a, int b) const;
  int component_count() const { return static_cast<int>(component_refs_.size()); }
  int global_component(int overlap, int component) const;
  const ComponentRef& component_ref(int global) const { return component_refs_[global]; }
  int triple_point_count() const { return triple_point_count_; }
  /// Position of `point` within the component's point list.
  int component_slot(int overlap, int component, int point) const;
  int chart_slot(int chart, int point) const;
  /// Chart pairs joined by at least one overlap.
  std::vector<std::array<int, 2>> chart_graph_edges() const;

 private:
  std::vector<ComponentRef> component_refs_;
  std::vector<int> component_offset_;
  std::vector<std::vector<std::unordered_map<int, int>>> component_index_;
  std::vector<std::unordered_map<int, int>> chart_index_;
  std::unordered_map<long long, int> overlap_lookup_;
  int triple_point_count_ = 0;
  bool finalized_ = false;
};

/// Breadth-first order of a connected sampled graph: pairs (point, parent)
/// with parent -1 for the root `points[0]`, followed by the non-tree edges.
struct BfsOrder {
  std::vector<std::array<int, 2>> order;
  std::vector<Edge> non_tree;
};

BfsOrder bfs_order(const std::vector<int>& points, const std::vector<Edge>& edges);

/// Every point lying in three charts a < b < c, with the overlap
/// components containing it. Throws DomainError when such a point is
/// missing from all components of one of the pairwise overlaps.
std::vector<Triple> derive_triples(const Nerve& nerve);

// Cochains and cocycles ------------------------------------------------------------

/// +-1 values on overlap components (degree 1, indexed by global component)
/// or on triple points (degree 2, in triple order).
struct SignCochain {
  int degree = 1;
  std::vector<std::int8_t> values;

  bool trivial() const;
};

enum class GroupKind { Gl, Ml, Sp, Mp, Glkd, Mlkd, Spk };

const char* to_string(GroupKind kind);
std::optional<GroupKind> group_from_string(const std::string& s);

struct GlPair {
  CMat g1;
  CMat g2;
};

struct MlPair {
  MlElement z1;
  MlElement z2;
};

/// Sampled transition functions t_ab for a < b: values[overlap][component]
/// is aligned with the component's point list. t_ba is t_ab^{-1}.
template <class T>
struct Cocycle {
  GroupKind group = GroupKind::Gl;
  int n = 0;
  int k = 0;
  std::vector<std::vector<std::vector<T>>> values;

  const T& at(const Nerve& nerve, int overlap, int component, int point) const {
    return values[overlap][component][nerve.component_slot(overlap, component, point)];
  }
};

/// Group operations used by the generic cocycle code.
template <class T>
struct GroupOps;

template <>
struct GroupOps<CMat> {
  static CMat mul(const CMat& a, const CMat& b, const Tolerances&) { return a * b; }
  static double distance(const CMat& a, const CMat& b);
  static double membership(const CMat& a, int n, int k, const Tolerances& tol);
};

template <>
struct GroupOps<MlElement> {
  static MlElement mul(const MlElement& a, const MlElement& b, const Tolerances& tol) {
    return ml_mul(a, b, tol);
  }
  static double distance(const MlElement& a, const MlElement& b);
  static double membership(const MlElement& a, int n, int k, const Tolerances& tol);
};

template <>
struct GroupOps<SpElement> {
  static SpElement mul(const SpElement& a, const SpElement& b, const Tolerances& tol) {
    return sp_mul(a, b, tol);
  }
  static double distance(const SpElement& a, const SpElement& b);
  static double membership(const SpElement& a, int n, int k, const Tolerances& tol);
};

template <>
struct GroupOps<MpElement> {
  static MpElement mul(const MpElement& a, const MpElement& b, const Tolerances& tol) {
    return mp_mul(a, b, tol);
  }
  static double distance(const MpElement& a, const MpElement& b);
  static double membership(const MpElement& a, int n, int k, const Tolerances& tol);
};

template <>
struct GroupOps<GlPair> {
  static GlPair mul(const GlPair& a, const GlPair& b, const Tolerances&) {
    return {a.g1 * b.g1, a.g2 * b.g2};
  }
  static double distance(const GlPair& a, const GlPair& b);
  static double membership(const GlPair& a, int n, int k, const Tolerances& tol);
};

template <>
struct GroupOps<MlPair> {
  static MlPair mul(const MlPair& a, const MlPair& b, const Tolerances& tol) {
    return {ml_mul(a.z1, b.z1, tol), ml_mul(a.z2, b.z2, tol)};
  }
  static double distance(const MlPair& a, const MlPair& b);
  static double membership(const MlPair& a, int n, int k, const Tolerances& tol);
};

/// Where a check failed: a human-readable location such as
/// "triple(0,1,2) point 17".
using Location = std::string;

struct CocycleReport {
  double max_residual = 0.0;     // cocycle identity at triple points
  double max_membership = 0.0;   // group membership of every sampled value
  std::vector<Location> failures;
  bool pass = true;
};

/// Checks t_ab t_bc = t_ac at every triple point and group membership of
/// every sampled value. Throws DomainError when a transition is missing.
template <class T>
CocycleReport validate_cocycle(const Nerve& nerve, const Cocycle<T>& c,
                               const Tolerances& tol = Tolerances::defaults()) {
  CocycleReport r;
  if (c.values.size() != nerve.overlaps.size()) {
    throw DomainError("validate_cocycle: transitions missing for some overlaps");
  }
  for (std::size_t o = 0; o < nerve.overlaps.size(); ++o) {
    const auto& comps = nerve.overlaps[o].components;
    if (c.values[o].size() != comps.size()) {
      throw DomainError("validate_cocycle: transitions missing for some components");
    }
    for (std::size_t q = 0; q < comps.size(); ++q) {
      if (c.values[o][q].size() != comps[q].points.size()) {
        throw DomainError("validate_cocycle: sampled table size mismatch");
      }
      for (std::size_t s = 0; s < comps[q].points.size(); ++s) {
        const double m = GroupOps<T>::membership(c.values[o][q][s], c.n, c.k, tol);
        r.max_membership = std::max(r.max_membership, m);
        if (!(m <= tol.rel)) {
          r.failures.push_back("overlap(" + std::to_string(nerve.overlaps[o].a) + "," +
                               std::to_string(nerve.overlaps[o].b) + ") component " +
                               std::to_string(q) + " point " +
                               std::to_string(comps[q].points[s]) + ": not a group element");
        }
      }
    }
  }
  for (const Triple& t : nerve.triples) {
    const int ab = nerve.overlap_index(t.a, t.b);
    const int bc = nerve.overlap_index(t.b, t.c);
    const int ac = nerve.overlap_index(t.a, t.c);
    for (const TriplePoint& p : t.points) {
      double res;
      try {
        const T lhs = GroupOps<T>::mul(c.at(nerve, ab, p.components[0], p.point),
                                       c.at(nerve, bc, p.components[1], p.point), tol);
        res = GroupOps<T>::distance(lhs, c.at(nerve, ac, p.components[2], p.point));
      } catch (const std::exception&) {
        res = std::numeric_limits<double>::infinity();
      }
      r.max_residual = std::max(r.max_residual, res);
      if (!(res <= tol.rel)) {
        r.failures.push_back("triple(" + std::to_string(t.a) + "," + std::to_string(t.b) + "," +
                             std::to_string(t.c) + ") point " + std::to_string(p.point));
      }
    }
  }
  r.pass = r.failures.empty();
  return r;
}

/// Applies f to every sampled value.
template <class T, class F>
auto map_cocycle(const Cocycle<T>& c, GroupKind group, F&& f) {
  using U = std::decay_t<decltype(f(c.values[0][0][0]))>;
  Cocycle<U> out;
  out.group = group;
  out.n = c.n;
  out.k = c.k;
  out.values.resize(c.values.size());
  for (std::size_t o = 0; o < c.values.size(); ++o) {
    out.values[o].resize(c.values[o].size());
    for (std::size_t q = 0; q < c.values[o].size(); ++q) {
      out.values[o][q].reserve(c.values[o][q].size());
      for (const T& x : c.values[o][q]) out.values[o][q].push_back(f(x));
    }
  }
  return out;
}

// Pushforward ------------------------------------------------------------------

enum class PushTag {
  MlToGl,         // (A, z) -> A
  MpToSp,         // (g, zeta) -> g
  GlDet,          // A -> det A
  GlAbsDetHalf,   // A -> |det A|^{1/2}
  GlAbsDetMinusHalf,  // A -> |det A|^{-1/2}
  SpBallAlpha,    // g -> alpha(g, 0), not a homomorphism; validated only
};

std::optional<PushTag> push_tag_from_string(const std::string& s);

Cocycle<CMat> push_cocycle(const Cocycle<MlElement>& c, PushTag tag);
Cocycle<SpElement> push_cocycle(const Cocycle<MpElement>& c, PushTag tag);
Cocycle<CMat> push_cocycle(const Cocycle<CMat>& c, PushTag tag);
Cocycle<CMat> push_cocycle(const Cocycle<SpElement>& c, PushTag tag,
                           const Tolerances& tol = Tolerances::defaults());

// Double covers -------------------------------------------------------------------

/// Square roots of det t along every overlap component, continued from the
/// principal root at the component's first point.
Cocycle<MlElement> track_square_roots(const Nerve& nerve, const Cocycle<CMat>& c,
                                      const Tolerances& tol = Tolerances::defaults());

/// The degree-2 cochain of sign defects z_ab z_bc / z_ac at triple points.
SignCochain lift_defect(const Nerve& nerve, const Cocycle<MlElement>& z,
                        const Tolerances& tol = Tolerances::defaults());

/// Multiplies z on every component whose flip bit is set by -1.
Cocycle<MlElement> apply_flips(const Cocycle<MlElement>& z, const Nerve& nerve,
                               const std::vector<std::uint8_t>& flips);

struct LiftResult {
  std::optional<Cocycle<MlElement>> lift;
  SignCochain defect;                   // before flips
  std::optional<SignCochain> flips;     // degree 1, when the lift exists
  std::optional<SignCochain> obstruction;
};

LiftResult lift_double_cover(const Nerve& nerve, const Cocycle<CMat>& c,
                             const Tolerances& tol = Tolerances::defaults());

/// A degree-1 cochain d with (delta d) = c2 over GF(2), or nullopt.
std::optional<SignCochain> z2_coboundary_solve(const Nerve& nerve, const SignCochain& c2);

/// Chart signs eps with z2_ab = eps_a z1_ab eps_b, or nullopt.
/// Throws DomainError when the ratio is not +-1 or not constant on a
/// component (the inputs do not lift the same cocycle).
std::optional<std::vector<std::int8_t>> lifts_equivalent(
    const Nerve& nerve, const Cocycle<MlElement>& l1, const Cocycle<MlElement>& l2,
    const Tolerances& tol = Tolerances::defaults());

/// Same test on ratio bits per global component (1 = ratio -1).
std::optional<std::vector<std::int8_t>> ratio_bits_equivalent(
    const Nerve& nerve, const std::vector<std::uint8_t>& bits);

struct LiftEnumeration {
  std::size_t patterns = 0;
  std::size_t cocycles = 0;   // sign patterns that keep the cocycle identity
  std::vector<std::vector<std::uint8_t>> classes;  // one representative each
};

/// Tries every sign pattern on the components of `base` and groups the
/// patterns that are cocycles into equivalence classes.
LiftEnumeration enumerate_lifts(const Nerve& nerve, const Cocycle<MlElement>& base,
                                const Tolerances& tol = Tolerances::defaults());

}  // namespace hfe
