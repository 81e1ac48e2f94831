#pragma once

#include <optional>
#include <vector>

#include "uot/entropy.h"
#include "uot/measures.h"

namespace uot {

// Dual potentials sampled on the supports of alpha (f) and beta (g).
// They encode the plan pi_ij = alpha_i beta_j exp((f_i + g_j - C_ij) / eps).
struct DualPotentials {
  Vector f;
  Vector g;
  double eps = 1.0;
  Entropy entropy = Entropy::balanced();
};

enum class InitKind { Asymptotic, Zero, Provided };

struct SolveOptions {
  double tol = 1e-9;  // sup-norm threshold on the potential updates of one sweep
  int max_iter = 10000;
  InitKind init = InitKind::Asymptotic;
  Vector init_f;  // used with InitKind::Provided
  Vector init_g;  // optional for Provided; zeros when empty
  bool record_history = false;
};

enum class SolveStatus { Converged, MaxIter, Infeasible };

const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  double final_update = 0.0;
  std::vector<double> update_history;    // max(|df|, |dg|) per sweep
  std::vector<double> f_update_history;  // |df| per sweep (the only entry for symmetric solves)
};

struct SolveResult {
  std::optional<DualPotentials> potentials;
  SolveReport report;
};

struct SymmetricSolveResult {
  Vector f;
  SolveReport report;
};

// One Sinkhorn half-step: for every target t,
//   out_t = damp(Smin_{m_other}(C(., t) - pot_other)).
// `cost_other_by_target` is |m_other| x |targets|; `target_side` selects the
// rho field entries when the entropy is spatially varying.
Vector half_update(double eps, const Entropy& entropy, const DiscreteMeasure& m_other, const Vector& pot_other,
                   const CostMatrix& cost_other_by_target, Side target_side = Side::A);

// Generalized Sinkhorn loop: g <- T_alpha(f), then f <- T_beta(g), until the
// sup-norm change of both potentials over one sweep is <= tol.
// `cost` is |alpha| x |beta|. Both measures must be non-null.
SolveResult solve(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostMatrix& cost,
                  const Entropy& entropy, double eps, const SolveOptions& opts = {});

// Symmetric potential f = T_alpha(f) for OT_eps(alpha, alpha), found by the
// averaged iteration f <- (f + T_alpha(f)) / 2. Stops once |T_alpha(f) - f| <= tol.
// `side` picks the rho field entries for spatially varying KL.
SymmetricSolveResult solve_symmetric(const DiscreteMeasure& alpha, const CostMatrix& cost_aa, const Entropy& entropy,
                                     double eps, const SolveOptions& opts = {}, Side side = Side::A);

// Continuous extension of the potentials through the Sinkhorn mapping.
// source_side A integrates against (alpha, f) and evaluates g at `new_points`;
// source_side B integrates against (beta, g) and evaluates f.
Vector extrapolate(const DualPotentials& pots, Side source_side, const DiscreteMeasure& m_source,
                   const Points& new_points, const CostSpec& cost);

// pi_ij = alpha_i beta_j exp((f_i + g_j - C_ij) / eps), as an N x M matrix.
Matrix implicit_plan(const DualPotentials& pots, const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                     const CostMatrix& cost);

// The plan as a measure on the product support; atom (i, j) sits at (x_i, y_j),
// stored in row-major order. Underflowed entries are dropped.
DiscreteMeasure plan_as_measure(const Matrix& plan, const DiscreteMeasure& alpha, const DiscreteMeasure& beta);

}  // namespace uot
