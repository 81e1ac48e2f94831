#pragma once

#include <optional>

#include "uot/entropy.h"
#include "uot/extended_real.h"
#include "uot/measures.h"
#include "uot/sinkhorn.h"

namespace uot {

struct DivergenceValue {
  ExtendedReal value;
  std::optional<DualPotentials> potentials;  // cross-term potentials (symmetric f for F)
  SolveReport report;
  // For smooth entropies: the dual value with the quadratic term replaced by
  // its first-order optimality form. Agrees with `value` at convergence.
  std::optional<double> linear_form;
};

struct Gradients {
  Vector d_weights_a;
  Vector d_weights_b;
  Points d_points_a;
  Points d_points_b;
  ExtendedReal value;
};

enum class Objective { OT, S };

// OT_eps(alpha, beta). A null input gives m(other) phi(0).
DivergenceValue ot_eps(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostSpec& cost,
                       const Entropy& entropy, double eps, const SolveOptions& opts = {});

// F_eps(alpha) = -OT_eps(alpha, alpha) / 2 + eps m(alpha)^2 / 2.
DivergenceValue sinkhorn_entropy_F(const DiscreteMeasure& alpha, const CostSpec& cost, const Entropy& entropy,
                                   double eps, const SolveOptions& opts = {});

DivergenceValue sinkhorn_divergence_S(const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                                      const CostSpec& cost, const Entropy& entropy, double eps,
                                      const SolveOptions& opts = {});

// <alpha - beta, grad F(alpha) - grad F(beta)>. KL, Power and Berg only.
DivergenceValue hausdorff_H(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostSpec& cost,
                            const Entropy& entropy, double eps, const SolveOptions& opts = {});

// Weight gradients. KL, Power and Berg only; both measures non-null.
Gradients grad_weights(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostSpec& cost,
                       const Entropy& entropy, double eps, Objective which, const SolveOptions& opts = {});

// Position gradients for any entropy.
Gradients grad_positions(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostSpec& cost,
                         const Entropy& entropy, double eps, Objective which, const SolveOptions& opts = {});

// ---- evaluation at given potentials ----

// Dual objective <alpha, -phi*(-f)> + <beta, -phi*(-g)> - eps <alpha x beta, exp((f + g - C) / eps) - 1>.
ExtendedReal dual_value(const DualPotentials& pots, const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                        const CostMatrix& cost);

// exp((f_i - Smin_beta(C_i. - g)) / eps): density of the first plan marginal w.r.t. alpha.
// With wrt = B, the same for the second marginal w.r.t. beta.
Vector marginal_density(const DualPotentials& pots, const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                        const CostMatrix& cost, Side wrt);

// -phi*(-f) - eps <beta, exp((f + g - C) / eps) - 1>, per atom of alpha (wrt = A) or beta (wrt = B).
// A subgradient for TV and Range.
Vector weight_gradient(const DualPotentials& pots, const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                       const CostMatrix& cost, Side wrt);

// sum_j pi_ij grad_x C(x_i, y_j) for the plan pi (n x m).
Points transport_force(const Matrix& plan, const Points& xs, const Points& ys, const CostSpec& cost);

// Entropy for the self-term of one side: a spatially varying rho is mirrored onto both sides.
Entropy self_entropy(const Entropy& e, Side side);

// OT_eps(alpha, alpha) from its symmetric potential.
ExtendedReal symmetric_value(const Vector& f, const DiscreteMeasure& alpha, const CostMatrix& cost_aa,
                             const Entropy& entropy, double eps);

// (eps / 2) |alpha e^{f_a / eps} - beta e^{g_b / eps}|^2 in the kernel exp(-C / eps),
// with f_a, g_b the symmetric potentials of alpha and beta.
double kernel_norm_bound(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const Vector& f_a,
                         const Vector& g_b, const CostSpec& cost, double eps);

}  // namespace uot
