#pragma once

#include <optional>
#include <vector>

#include "uot/entropy.h"
#include "uot/measures.h"
#include "uot/sinkhorn.h"

namespace uot {

// Particles (x_i, r_i) standing for alpha = sum_i r_i^2 delta_{x_i}.
struct FlowState {
  Points positions;
  Vector r;
  int step = 0;

  static FlowState from_measure(const DiscreteMeasure& m);
  DiscreteMeasure measure() const;
};

// Warm-started solves capped at a few hundred sweeps; a capped step keeps
// converging on the next one.
inline SolveOptions flow_solve_defaults() {
  SolveOptions o;
  o.tol = 1e-6;
  o.max_iter = 500;
  return o;
}

// Which rate multiplies the mirror step on r.
enum class MassRate { EtaX, EtaR };

struct FlowParams {
  double eta_x = 60.0;
  double eta_r = 0.3;
  double eps = 1e-3;
  Entropy entropy = Entropy::kl(0.1);
  int steps = 300;
  bool mass_updates = true;  // ignored (off) for Balanced
  MassRate mass_rate = MassRate::EtaX;
  SolveOptions solve = flow_solve_defaults();
};

// Potentials carried from one step to the next.
struct FlowCache {
  Vector f;       // cross term, on alpha
  Vector g;       // cross term, on beta
  Vector f_self;  // symmetric potential of alpha
  std::optional<double> target_self_value;  // OT_eps(beta, beta)
  Vector g_self;
};

// S_eps(alpha, beta) and its gradients w.r.t. the particles of alpha.
struct FlowEvaluation {
  double value = 0.0;
  Points d_positions;
  Vector d_weights;  // w.r.t. alpha_i; empty when mass updates are off
  int iterations = 0;  // Sinkhorn sweeps spent (cross + self)
};

FlowEvaluation evaluate_flow_objective(const FlowState& state, const DiscreteMeasure& target, const CostSpec& cost,
                                       const FlowParams& params, FlowCache* cache = nullptr, bool gradients = true);

// One synchronous update; `value_out` receives S_eps at the input state.
FlowState flow_step(const FlowState& state, const DiscreteMeasure& target, const CostSpec& cost,
                    const FlowParams& params, FlowCache* cache = nullptr, double* value_out = nullptr);

struct FlowSnapshot {
  FlowState state;
  double s_eps = 0.0;
};

// Snapshots at step 0, every `snapshot_every` steps, and after the last step.
std::vector<FlowSnapshot> run_flow(const FlowState& init, const DiscreteMeasure& target, const CostSpec& cost,
                                   const FlowParams& params, int snapshot_every = 1);

}  // namespace uot
