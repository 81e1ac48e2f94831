#include "uot/flows.h"

#include <cmath>

#include "uot/divergences.h"
#include "uot/errors.h"

namespace uot {

FlowState FlowState::from_measure(const DiscreteMeasure& m) {
  return {m.points(), m.weights().array().sqrt().matrix(), 0};
}

DiscreteMeasure FlowState::measure() const { return {r.array().square().matrix(), positions}; }

namespace {

bool mass_moves(const FlowParams& p) { return p.mass_updates && p.entropy.kind() != Entropy::Kind::Balanced; }

SolveOptions warm(const SolveOptions& base, const Vector& f, const Vector& g, Index n) {
  SolveOptions o = base;
  if (f.size() == n) {
    o.init = InitKind::Provided;
    o.init_f = f;
    o.init_g = g;
  }
  return o;
}

}  // namespace

FlowEvaluation evaluate_flow_objective(const FlowState& state, const DiscreteMeasure& target, const CostSpec& cost,
                                       const FlowParams& params, FlowCache* cache, bool gradients) {
  if (state.r.size() != state.positions.rows()) throw DomainError("flow state: r and positions disagree");
  if ((state.r.array().square() <= 0.0).any()) throw DomainError("flow state: particle mass is zero or underflowed");
  FlowCache local;
  FlowCache& c = cache ? *cache : local;
  const double eps = params.eps;
  const Entropy& e = params.entropy;
  const DiscreteMeasure alpha = state.measure();
  const Index n = alpha.size();
  FlowEvaluation out;

  if (!c.target_self_value) {
    const Entropy eb = self_entropy(e, Side::B);
    const CostMatrix c_bb = cost_matrix(target.points(), target.points(), cost);
    SymmetricSolveResult sb = solve_symmetric(target, c_bb, eb, eps, params.solve, Side::A);
    if (sb.report.status == SolveStatus::Infeasible) throw DomainError("flow target self-term is infeasible");
    c.target_self_value = symmetric_value(sb.f, target, c_bb, eb, eps).value();
    c.g_self = std::move(sb.f);
  }

  const CostMatrix c_ab = cost_matrix(alpha.points(), target.points(), cost);
  SolveResult cross = solve(alpha, target, c_ab, e, eps, warm(params.solve, c.f, c.g, n));
  if (!cross.potentials) throw DomainError("flow objective is infeasible (balanced flows need equal masses)");
  const DualPotentials& pc = *cross.potentials;

  const Entropy ea = self_entropy(e, Side::A);
  const CostMatrix c_aa = cost_matrix(alpha.points(), alpha.points(), cost);
  SolveOptions so = params.solve;
  if (c.f_self.size() == n) {
    so.init = InitKind::Provided;
    so.init_f = c.f_self;
  }
  SymmetricSolveResult self = solve_symmetric(alpha, c_aa, ea, eps, so, Side::A);
  const DualPotentials ps{self.f, self.f, eps, ea};

  const double dm = total_mass(alpha) - total_mass(target);
  out.value = dual_value(pc, alpha, target, c_ab).value() - 0.5 * dual_value(ps, alpha, alpha, c_aa).value() -
              0.5 * *c.target_self_value + 0.5 * eps * dm * dm;
  out.iterations = cross.report.iterations + self.report.iterations;

  if (gradients) {
    out.d_positions = transport_force(implicit_plan(pc, alpha, target, c_ab), alpha.points(), target.points(), cost);
    out.d_positions -= transport_force(implicit_plan(ps, alpha, alpha, c_aa), alpha.points(), alpha.points(), cost);
    if (mass_moves(params)) {
      out.d_weights = weight_gradient(pc, alpha, target, c_ab, Side::A) - weight_gradient(ps, alpha, alpha, c_aa, Side::A);
      out.d_weights.array() += eps * dm;
    }
  }
  c.f = pc.f;
  c.g = pc.g;
  c.f_self = std::move(self.f);
  return out;
}

FlowState flow_step(const FlowState& state, const DiscreteMeasure& target, const CostSpec& cost,
                    const FlowParams& params, FlowCache* cache, double* value_out) {
  const FlowEvaluation ev = evaluate_flow_objective(state, target, cost, params, cache, true);
  if (value_out) *value_out = ev.value;
  FlowState next = state;
  next.step = state.step + 1;
  next.positions -= params.eta_x * ev.d_positions;
  if (mass_moves(params)) {
    const double eta = params.mass_rate == MassRate::EtaX ? params.eta_x : params.eta_r;
    // d S / d r_i = 2 r_i d S / d alpha_i
    const Eigen::ArrayXd d_r = 2.0 * state.r.array() * ev.d_weights.array();
    next.r = (state.r.array() * (-2.0 * eta * d_r).exp()).matrix();
    if ((next.r.array() <= 0.0).any() || !next.r.allFinite())
      throw DomainError("mass update left the positive reals (step too large)");
  }
  return next;
}

std::vector<FlowSnapshot> run_flow(const FlowState& init, const DiscreteMeasure& target, const CostSpec& cost,
                                   const FlowParams& params, int snapshot_every) {
  if (params.steps < 0) throw DomainError("steps must be nonnegative");
  if (!(params.eta_x >= 0.0 && params.eta_r >= 0.0 && params.eps > 0.0)) throw DomainError("invalid flow rates");
  if (snapshot_every < 1) snapshot_every = 1;
  FlowCache cache;
  std::vector<FlowSnapshot> traj;
  FlowState cur = init;
  for (int s = 0; s < params.steps; ++s) {
    double value = 0.0;
    FlowState next = flow_step(cur, target, cost, params, &cache, &value);
    if (s % snapshot_every == 0) traj.push_back({cur, value});
    cur = std::move(next);
  }
  if (traj.empty() || traj.back().state.step != cur.step) {
    const double value = evaluate_flow_objective(cur, target, cost, params, &cache, false).value;
    traj.push_back({cur, value});
  }
  return traj;
}

}  // namespace uot
