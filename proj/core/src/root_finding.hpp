#pragma once

// Safeguarded Newton iteration for a convex function that is <= 0 at `lo`
// and >= 0 at `hi`. Starting from `hi`, Newton steps move monotonically down
// to the largest root; any step that leaves the bracket becomes a bisection.

#include "effridge/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace effridge::detail {

struct RootResult {
  double root = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Up to two further Newton steps, each kept only if it shrinks |g|. The
/// tolerance test alone can leave relative errors near 1e-10 where g' is small.
template <class Eval>
RootResult polish(Eval& eval, RootResult r) {
  for (int k = 0; k < 2; ++k) {
    double value = 0.0;
    double slope = 0.0;
    eval(r.root, value, slope);
    if (!(slope > 0.0) || value == 0.0) break;
    const double next = r.root - value / slope;
    double next_value = 0.0;
    eval(next, next_value, slope);
    if (!(std::abs(next_value) < std::abs(value))) break;
    r.root = next;
    r.value = next_value;
  }
  return r;
}

/// `eval(t, value, slope)` fills g(t) and g'(t). Converges when |g| < tol(t).
template <class Eval, class Tol>
RootResult newton_in_bracket(Eval&& eval, double lo, double hi, Tol&& tol, int max_iter = 500) {
  double t = hi;
  double value = 0.0;
  double slope = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    eval(t, value, slope);
    if (!std::isfinite(value)) throw NumericError("root finder hit a non-finite value");
    if (std::abs(value) < tol(t)) return polish(eval, {t, value, it + 1});
    if (value > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    double next = slope > 0.0 ? t - value / slope : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi)) {
      eval(next, value, slope);
      if (std::abs(value) < tol(next)) return polish(eval, {next, value, it + 1});
      throw NumericError("root bracket collapsed at t=" + std::to_string(next) +
                         " with residual " + std::to_string(value));
    }
    t = next;
  }
  throw NumericError("root finder did not converge in " + std::to_string(max_iter) +
                     " iterations");
}

}  // namespace effridge::detail
