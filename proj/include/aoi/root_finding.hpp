#pragma once

#include <cmath>
#include <limits>

#include "aoi/errors.hpp"

namespace aoi {

/// Bisection on a monotonically decreasing residual g with g(lo) > 0 and
/// g(hi) < 0. Stops as soon as |g(mid)| <= tol; the interval collapsing to
/// rounding resolution without hitting the residual target is an error.
template <typename G>
double bisect_decreasing(const G& g, double lo, double hi, double tol,
                         int max_iter = 400) {
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) <= tol) {
            return mid;
        }
        if (gm > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (!(hi - lo > std::numeric_limits<double>::epsilon() *
                            (std::abs(lo) + std::abs(hi)) &&
              hi > lo)) {
            break;
        }
    }
    const double mid = 0.5 * (lo + hi);
    if (std::abs(g(mid)) <= tol) {
        return mid;
    }
    throw BracketError("bisection did not reach the residual tolerance");
}

} // namespace aoi
