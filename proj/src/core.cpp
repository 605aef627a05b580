#include "hfe/core.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "hfe/tracking.hpp"

namespace hfe {

const Tolerances& Tolerances::defaults() {
  static const Tolerances value = [] {
    Tolerances t;
    if (const char* env = std::getenv("HFE_TOL_REL")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end != env && v > 0.0 && std::isfinite(v)) t.rel = v;
    }
    return t;
  }();
  return value;
}

cplx principal_sqrt(cplx w) {
  cplx r = std::sqrt(w);
  // std::sqrt maps the lower side of the negative axis to -i|w|^(1/2).
  if (r.real() == 0.0 && r.imag() < 0.0) r = -r;
  return r;
}

cplx nearest_sqrt(cplx w, cplx previous) {
  const cplx r = principal_sqrt(w);
  return std::abs(r - previous) <= std::abs(r + previous) ? r : -r;
}

double operator_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

cplx det(const CMat& m) {
  if (m.rows() == 0) return {1.0, 0.0};
  return m.determinant();
}

namespace {

double arg_gap(cplx from, cplx to) { return std::abs(std::arg(to / from)); }

}  // namespace

cplx sqrt_step(cplx prev, cplx root_prev, cplx next, const Tolerances& tol) {
  if (std::abs(next) <= tol.singular) {
    throw TrackingError("tracked value vanishes along a sampled edge");
  }
  if (arg_gap(prev, next) >= std::numbers::pi / 2) {
    throw TrackingError("argument jump of pi/2 or more along a sampled edge");
  }
  return nearest_sqrt(next, root_prev);
}

cplx continue_sqrt(const std::function<cplx(double)>& f, cplx root_at_start,
                   const Tolerances& tol, bool allow_zero_at_end) {
  constexpr double kMaxStep = 1.0 / 32.0;
  double t = 0.0;
  double h = kMaxStep;
  cplx value = f(0.0);
  cplx root = root_at_start;
  const double scale = std::max(std::abs(value), 1.0);
  while (t < 1.0) {
    const double next_t = std::min(1.0, t + h);
    const cplx next = f(next_t);
    if (std::abs(next) <= tol.singular * scale) {
      if (next_t >= 1.0 && allow_zero_at_end) return {0.0, 0.0};
      throw TrackingError("tracked determinant vanishes inside the path");
    }
    if (arg_gap(value, next) < std::numbers::pi / 2) {
      root = nearest_sqrt(next, root);
      value = next;
      t = next_t;
      h = std::min(2.0 * h, kMaxStep);
    } else {
      h *= 0.5;
      if (h < tol.track) {
        throw TrackingError("square-root tracking step fell below tol_track");
      }
    }
  }
  return root;
}

}  // namespace hfe
