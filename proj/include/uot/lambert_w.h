#pragma once

#include <cmath>
#include <limits>

#include "uot/errors.h"

namespace uot {

// Principal branch of Lambert W in logarithmic form: returns the w > 0 with
// w + log(w) = log_z, i.e. w * exp(w) = exp(log_z), without ever forming exp(log_z).
//
// Halley's method runs on t = log(w), where h(t) = e^t + t - log_z is convex and
// increasing, so the iteration is safe for log_z anywhere in the double range.
template <typename Scalar = double>
Scalar lambert_w_log(Scalar log_z) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::log1p;
  if (std::isnan(log_z)) return log_z;
  if (std::isinf(log_z)) return log_z > 0 ? log_z : Scalar(0);

  Scalar t;
  if (log_z > Scalar(1)) {
    t = log(log_z - log(log_z));
  } else {
    t = log_z - log1p(exp(log_z));
  }

  const Scalar tol = Scalar(1e-13) * (Scalar(1) + abs(log_z));
  bool polished = false;
  for (int iter = 0; iter < 50; ++iter) {
    const Scalar w = exp(t);
    const Scalar h = w + t - log_z;
    if (abs(h) <= tol) {
      // one extra step once inside tolerance; cubic convergence puts it at round-off
      if (polished || h == Scalar(0)) break;
      polished = true;
    }
    const Scalar dh = w + Scalar(1);
    const Scalar d2h = w;
    t -= Scalar(2) * h * dh / (Scalar(2) * dh * dh - h * d2h);
  }
  return exp(t);
}

// Principal branch W(z) for z >= 0.
template <typename Scalar = double>
Scalar lambert_w(Scalar z) {
  if (z < Scalar(0)) throw DomainError("lambert_w: argument must be nonnegative");
  if (z == Scalar(0)) return Scalar(0);
  if (std::isinf(z)) return z;
  return lambert_w_log(std::log(z));
}

}  // namespace uot
