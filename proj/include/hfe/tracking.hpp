#pragma once

#include <functional>

#include "hfe/core.hpp"

namespace hfe {

/// Continues a square root of `f(t)` from `root_at_start` (a square root of
/// `f(0)`) to t = 1.
///
/// Steps are bisected until consecutive values of `f` differ in argument by
/// less than pi/2, so the continued root never jumps sheet. A value of `f`
/// that vanishes before t = 1 - tol.track raises TrackingError; when
/// `allow_zero_at_end` is set a vanishing endpoint returns 0.
cplx continue_sqrt(const std::function<cplx(double)>& f, cplx root_at_start,
                   const Tolerances& tol = Tolerances::defaults(),
                   bool allow_zero_at_end = false);

/// One discrete tracking step along a sampled edge: the square root of
/// `next` closest to `root_prev`, after checking that the argument of
/// `next / prev` stays below pi/2. Throws TrackingError otherwise.
cplx sqrt_step(cplx prev, cplx root_prev, cplx next, const Tolerances& tol);

}  // namespace hfe
