#pragma once

#include <functional>

#include "uot/entropy.h"
#include "uot/extended_real.h"
#include "uot/measures.h"
#include "uot/sinkhorn.h"

namespace uot {

// <C, pi> + D_phi(pi 1 | alpha) + D_phi(pi^T 1 | beta) + eps KL(pi | alpha x beta),
// for a plan given as an |alpha| x |beta| matrix. `indicator_tol` widens the
// domain of the Balanced and Range entropies by a relative slack.
ExtendedReal primal_cost(const Matrix& plan, const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                         const CostMatrix& cost, const Entropy& entropy, double eps, double indicator_tol = 0.0);

// min over t >= 0 of c t + m1 phi(t / m1) + m2 phi(t / m2) + eps (t log(t / (m1 m2)) - t + m1 m2),
// by golden-section search on [0, 10 max(m1, m2) e].
double dirac_pair_value(const Entropy& entropy, double m1, double m2, double c, double eps);

// The objective minimized by dirac_pair_value.
ExtendedReal dirac_pair_objective(const Entropy& entropy, double m1, double m2, double c, double eps, double t);

struct FdGradient {
  Vector weights;
  Points points;
};

// Central differences of `value` w.r.t. every weight and coordinate of `m`.
// Throws FDDomainError when a probe is not finite.
FdGradient fd_gradient(const std::function<double(const DiscreteMeasure&)>& value, const DiscreteMeasure& m,
                       double h);

struct GapReport {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;  // primal - dual
  double residual_a = 0.0;  // max_i |(pi 1)_i / alpha_i - 1|
  double residual_b = 0.0;
};

GapReport duality_gap(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostMatrix& cost,
                      const DualPotentials& pots, double indicator_tol = 1e-6);

}  // namespace uot
