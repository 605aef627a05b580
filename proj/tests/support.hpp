#pragma once

// Hand-rolled generators shared by the unit tests and the acceptance runner.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hfe/cech.hpp"
#include "hfe/frames.hpp"
#include "hfe/groups.hpp"

namespace hfe::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double normal() { return normal_(eng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool coin() { return (eng_() & 1U) != 0; }
  cplx complex() { return {normal(), normal()}; }

  RMat real(int r, int c) {
    RMat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = normal();
    return m;
  }
  CMat cmat(int r, int c) {
    CMat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = complex();
    return m;
  }
  RMat symmetric(int n) {
    const RMat m = real(n, n);
    return 0.5 * (m + m.transpose());
  }

  /// Real matrix with |det| bounded away from zero.
  RMat invertible_real(int n, double min_det = 0.1) {
    RMat m;
    do {
      m = RMat::Identity(n, n) + 0.5 * real(n, n);
    } while (n > 0 && std::abs(m.determinant()) < min_det);
    return m;
  }
  CMat invertible(int n, double min_det = 0.05) {
    CMat m;
    do {
      m = cmat(n, n);
    } while (n > 0 && std::abs(det(m)) < min_det);
    return m;
  }

  /// Symmetric complex matrix of operator norm below `max_norm`, by
  /// rejection from a box that accepts often enough at n <= 4.
  CMat ball(int n, double max_norm = 0.95) {
    for (;;) {
      CMat w(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) w(i, j) = w(j, i) = cplx(uniform(-1, 1), uniform(-1, 1)) / double(n);
      if (operator_norm(w) < max_norm) return w;
    }
  }

  /// Product of symplectic generators with moderate entries.
  SpElement sp(int n) {
    SpElement g = sp_embed_gl(invertible_real(n));
    g = sp_mul(g, sp_upper_shear(0.5 * symmetric(n)));
    g = sp_mul(g, sp_lower_shear(0.5 * symmetric(n)));
    std::vector<double> theta(n);
    for (double& t : theta) t = uniform(-3.0, 3.0);
    return sp_mul(g, sp_rotation(theta));
  }

  /// Positive frame Phi^{-1}(W, C).
  LagFrame positive_frame(int n) { return phi_inv(BallPoint(ball(n)), GlElement(invertible(n))); }

  /// Pair of Lagrangian frames sharing k real columns: block form in
  /// standard coordinates moved by a random real symplectic matrix.
  LagFramePair frame_pair(int n, int k) {
    const SpElement E = sp(n);
    const RMat A = invertible_real(k);
    auto block = [&](const CMat& Ur, const CMat& Vr) {
      CMat U = CMat::Zero(n, n), V = CMat::Zero(n, n);
      U.topLeftCorner(k, k) = A.cast<cplx>();
      U.topRightCorner(k, n - k) = cmat(k, n - k);
      U.bottomRightCorner(n - k, n - k) = Ur;
      V.bottomRightCorner(n - k, n - k) = Vr;
      auto [gu, gv] = sp_act(E, U, V);
      return validate_lagrangian(gu, gv);
    };
    const int r = n - k;
    auto reduced = [&]() {
      const LagFrame f = phi_inv(BallPoint(ball(r)), GlElement(invertible(r)));
      return std::pair<CMat, CMat>{f.U, f.V};
    };
    auto [U1, V1] = reduced();
    auto [U2, V2] = reduced();
    return make_frame_pair(block(U1, V1), block(U2, V2), k);
  }

  /// (g1, g2) in Gl_k^2: shared real A, arbitrary B, invertible D.
  std::pair<CMat, CMat> glkd(int n, int k) {
    const RMat A = invertible_real(k);
    auto draw = [&]() {
      CMat g = CMat::Zero(n, n);
      g.topLeftCorner(k, k) = A.cast<cplx>();
      g.topRightCorner(k, n - k) = cmat(k, n - k);
      g.bottomRightCorner(n - k, n - k) = invertible(n - k);
      return g;
    };
    CMat g1 = draw();
    CMat g2 = draw();
    return {g1, g2};
  }

  /// Ml lift of a Gl_k^2 pair with random sheets.
  std::pair<MlElement, MlElement> mlkd(int n, int k) {
    auto [g1, g2] = glkd(n, k);
    auto lift = [&](const CMat& g) {
      const cplx z = std::sqrt(det(g));
      return MlElement(g, coin() ? z : -z);
    };
    return {lift(g1), lift(g2)};
  }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

inline double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs_diff(const CMat& a, const CMat& b) { return max_abs(a - b); }

/// Consecutive edges along a list of points.
inline std::vector<Edge> path_edges(const std::vector<int>& pts) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i < pts.size(); ++i) e.push_back({pts[i - 1], pts[i]});
  return e;
}

struct OverlapSpec {
  int a;
  int b;
  std::vector<std::vector<int>> components;  // each a path
};

/// Nerve whose charts and overlap components are paths through the listed
/// points; triple points are derived.
inline Nerve make_nerve(int points, const std::vector<std::vector<int>>& charts,
                        const std::vector<OverlapSpec>& overlaps) {
  Nerve nv;
  for (int p = 0; p < points; ++p) nv.points.push_back({{double(p)}});
  for (std::size_t c = 0; c < charts.size(); ++c) {
    nv.charts.push_back({"c" + std::to_string(c), charts[c], path_edges(charts[c]), {}, true});
  }
  for (const OverlapSpec& o : overlaps) {
    Overlap ov{o.a, o.b, {}};
    for (const auto& comp : o.components) ov.components.push_back({comp, path_edges(comp), {}, true});
    nv.overlaps.push_back(std::move(ov));
  }
  nv.finalize();
  nv.triples = derive_triples(nv);
  nv.finalize();
  return nv;
}

/// Two charts covering a circle of 8 points; the overlap has the two
/// components {3} and {7}.
inline Nerve circle_nerve() {
  return make_nerve(8, {{7, 0, 1, 2, 3}, {3, 4, 5, 6, 7}}, {{0, 1, {{3}, {7}}}});
}

/// Three charts meeting in a single point.
inline Nerve triple_nerve() {
  return make_nerve(3, {{0, 1}, {0, 2}, {0}}, {{0, 1, {{0}}}, {1, 2, {{0}}}, {0, 2, {{0}}}});
}

/// A cocycle with one constant value per overlap component.
template <class T>
Cocycle<T> constant_cocycle(const Nerve& nv, GroupKind group, int n,
                            const std::vector<std::vector<T>>& per_component, int k = 0) {
  Cocycle<T> c;
  c.group = group;
  c.n = n;
  c.k = k;
  for (std::size_t o = 0; o < nv.overlaps.size(); ++o) {
    c.values.emplace_back();
    for (std::size_t q = 0; q < nv.overlaps[o].components.size(); ++q) {
      c.values[o].emplace_back(nv.overlaps[o].components[q].points.size(), per_component[o][q]);
    }
  }
  return c;
}

/// det of the lower-right (n-k) block.
inline cplx det_D(const CMat& g, int k) {
  const Eigen::Index r = g.rows() - k;
  return det(g.bottomRightCorner(r, r));
}

}  // namespace hfe::testing
