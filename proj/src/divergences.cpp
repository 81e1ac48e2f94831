#include "uot/divergences.h"

#include <cmath>

#include "uot/errors.h"
#include "uot/softmin.h"

namespace uot {

namespace {

const Entropy& plain() {
  static const Entropy e = Entropy::balanced();
  return e;
}

double finite_conj(const Entropy& e, double q) {
  const ExtendedReal v = phi_conj(e, q);
  if (v.is_infinite()) throw DomainError("potential outside the domain of the conjugate entropy");
  return v.value();
}

// sum_i m_i (-phi*_i(-pot_i))
double conj_term(const Entropy& e, Side side, const DiscreteMeasure& m, const Vector& pot) {
  double acc = 0.0;
  for (Index i = 0; i < m.size(); ++i) acc -= m.weights()[i] * finite_conj(e.at(side, i), -pot[i]);
  return acc;
}

ExtendedReal null_value(const Entropy& e, const DiscreteMeasure& alpha, const DiscreteMeasure& beta) {
  if (alpha.is_null() && beta.is_null()) return 0.0;
  const bool a_null = alpha.is_null();
  const DiscreteMeasure& other = a_null ? beta : alpha;
  if (!e.has_rho_field()) return total_mass(other) * e.phi_at_zero();
  ExtendedReal acc = 0.0;
  for (Index j = 0; j < other.size(); ++j)
    acc += other.weights()[j] * e.at(a_null ? Side::B : Side::A, j).phi_at_zero();
  return acc;
}

struct SelfTerm {
  Vector f;
  CostMatrix cost;
  Entropy entropy = Entropy::balanced();
  SolveReport report;
  ExtendedReal value;  // OT_eps(m, m)
};

SelfTerm solve_self(const DiscreteMeasure& m, const CostSpec& cost, const Entropy& e, double eps,
                    const SolveOptions& opts, Side side) {
  SelfTerm t;
  t.entropy = self_entropy(e, side);
  if (m.is_null()) {
    t.value = 0.0;
    t.report.status = SolveStatus::Converged;
    return t;
  }
  t.cost = cost_matrix(m.points(), m.points(), cost);
  SymmetricSolveResult r = solve_symmetric(m, t.cost, t.entropy, eps, opts, Side::A);
  t.report = r.report;
  if (r.report.status == SolveStatus::Infeasible) {
    t.value = ExtendedReal::infinity();
    return t;
  }
  t.f = std::move(r.f);
  t.value = symmetric_value(t.f, m, t.cost, t.entropy, eps);
  return t;
}

DualPotentials self_pots(const SelfTerm& t, double eps) { return {t.f, t.f, eps, t.entropy}; }

void require_smooth(const Entropy& e, const char* what) {
  if (!e.is_smooth())
    throw Unsupported(std::string(what) + " needs a smooth entropy (kl, power, berg), got " + e.to_string());
}

void require_non_null(const DiscreteMeasure& a, const DiscreteMeasure& b, const char* what) {
  if (a.is_null() || b.is_null()) throw DomainError(std::string(what) + " needs non-null measures");
}

// grad F(m) evaluated at the points indexed by `cost` columns (source atoms x targets).
Vector entropy_gradient(const DiscreteMeasure& m, const Vector& f, const CostMatrix& cost, const Entropy& e,
                        Side target_side, double eps) {
  const Vector s = half_update(eps, plain(), m, f, cost, target_side);
  Vector out(s.size());
  for (Index t = 0; t < s.size(); ++t) {
    const Entropy et = e.at(target_side, t);
    const double h = damp(et, eps, s[t]);
    out[t] = finite_conj(et, -h) + eps * std::exp((h - s[t]) / eps);
  }
  return out;
}

}  // namespace

Entropy self_entropy(const Entropy& e, Side side) {
  const auto* field = e.rho_field();
  if (!field) return e;
  const Vector& rho = side == Side::A ? field->on_a : field->on_b;
  return Entropy::kl_varying(rho, rho);
}

Vector marginal_density(const DualPotentials& pots, const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                        const CostMatrix& cost, Side wrt) {
  if (pots.f.size() != alpha.size() || pots.g.size() != beta.size() || cost.rows() != alpha.size() ||
      cost.cols() != beta.size())
    throw DomainError("inconsistent potential, measure and cost shapes");
  if (wrt == Side::A) {
    const CostMatrix ct = cost.transpose();
    const Vector s = half_update(pots.eps, plain(), beta, pots.g, ct, Side::A);
    return ((pots.f - s) / pots.eps).array().exp().matrix();
  }
  const Vector s = half_update(pots.eps, plain(), alpha, pots.f, cost, Side::B);
  return ((pots.g - s) / pots.eps).array().exp().matrix();
}

ExtendedReal dual_value(const DualPotentials& pots, const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                        const CostMatrix& cost) {
  const Vector density = marginal_density(pots, alpha, beta, cost, Side::A);
  const double q = alpha.weights().dot(density);
  return conj_term(pots.entropy, Side::A, alpha, pots.f) + conj_term(pots.entropy, Side::B, beta, pots.g) -
         pots.eps * (q - total_mass(alpha) * total_mass(beta));
}

Vector weight_gradient(const DualPotentials& pots, const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                       const CostMatrix& cost, Side wrt) {
  const Vector density = marginal_density(pots, alpha, beta, cost, wrt);
  const DiscreteMeasure& self = wrt == Side::A ? alpha : beta;
  const Vector& pot = wrt == Side::A ? pots.f : pots.g;
  const double other_mass = total_mass(wrt == Side::A ? beta : alpha);
  Vector out(self.size());
  for (Index i = 0; i < self.size(); ++i)
    out[i] = -finite_conj(pots.entropy.at(wrt, i), -pot[i]) - pots.eps * density[i] + pots.eps * other_mass;
  return out;
}

Points transport_force(const Matrix& plan, const Points& xs, const Points& ys, const CostSpec& cost) {
  if (plan.rows() != xs.rows() || plan.cols() != ys.rows() || xs.cols() != ys.cols())
    throw DomainError("transport_force: inconsistent shapes");
  if (cost.kind() == CostSpec::Kind::SqEuclidean || cost.power() == 2.0) {
    const Vector row_mass = plan.rowwise().sum();
    Points out = row_mass.asDiagonal() * xs;
    out.noalias() -= plan * ys;
    return 2.0 * cost.scale() * out;
  }
  const double p = cost.power();
  Points out = Points::Zero(xs.rows(), xs.cols());
  for (Index i = 0; i < xs.rows(); ++i)
    for (Index j = 0; j < ys.rows(); ++j) {
      const auto diff = (xs.row(i) - ys.row(j)).eval();
      const double r = diff.norm();
      if (r == 0.0) {
        if (p == 1.0) throw DomainError("|x - y| is not differentiable at coincident points");
        continue;
      }
      out.row(i) += plan(i, j) * cost.scale() * p * std::pow(r, p - 2.0) * diff;
    }
  return out;
}

ExtendedReal symmetric_value(const Vector& f, const DiscreteMeasure& alpha, const CostMatrix& cost_aa,
                             const Entropy& entropy, double eps) {
  return dual_value(DualPotentials{f, f, eps, entropy}, alpha, alpha, cost_aa);
}

DivergenceValue ot_eps(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostSpec& cost,
                       const Entropy& entropy, double eps, const SolveOptions& opts) {
  DivergenceValue out;
  if (alpha.is_null() || beta.is_null()) {
    out.value = null_value(entropy, alpha, beta);
    out.report.status = out.value.is_infinite() ? SolveStatus::Infeasible : SolveStatus::Converged;
    return out;
  }
  const CostMatrix c = cost_matrix(alpha.points(), beta.points(), cost);
  SolveResult r = solve(alpha, beta, c, entropy, eps, opts);
  out.report = r.report;
  if (!r.potentials) {
    out.value = ExtendedReal::infinity();
    return out;
  }
  const DualPotentials& p = *r.potentials;
  out.value = dual_value(p, alpha, beta, c);
  if (entropy.is_smooth() || entropy.kind() == Entropy::Kind::Balanced) {
    double qa = 0.0;
    double qb = 0.0;
    for (Index i = 0; i < alpha.size(); ++i)
      qa += alpha.weights()[i] * phi_conj_derivative(entropy.at(Side::A, i), -p.f[i]);
    for (Index j = 0; j < beta.size(); ++j)
      qb += beta.weights()[j] * phi_conj_derivative(entropy.at(Side::B, j), -p.g[j]);
    out.linear_form = conj_term(entropy, Side::A, alpha, p.f) + conj_term(entropy, Side::B, beta, p.g) -
                      eps * (0.5 * (qa + qb) - total_mass(alpha) * total_mass(beta));
  }
  out.potentials = std::move(r.potentials);
  return out;
}

DivergenceValue sinkhorn_entropy_F(const DiscreteMeasure& alpha, const CostSpec& cost, const Entropy& entropy,
                                   double eps, const SolveOptions& opts) {
  DivergenceValue out;
  if (alpha.is_null()) {
    out.value = 0.0;
    out.report.status = SolveStatus::Converged;
    return out;
  }
  SelfTerm t = solve_self(alpha, cost, entropy, eps, opts, Side::A);
  out.report = t.report;
  if (t.value.is_infinite()) {
    out.value = ExtendedReal::infinity();
    return out;
  }
  const double m = total_mass(alpha);
  out.value = -0.5 * t.value.value() + 0.5 * eps * m * m;
  out.potentials = self_pots(t, eps);
  return out;
}

DivergenceValue sinkhorn_divergence_S(const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                                      const CostSpec& cost, const Entropy& entropy, double eps,
                                      const SolveOptions& opts) {
  DivergenceValue out = ot_eps(alpha, beta, cost, entropy, eps, opts);
  out.linear_form.reset();
  if (out.value.is_infinite()) return out;
  const SelfTerm sa = solve_self(alpha, cost, entropy, eps, opts, Side::A);
  const SelfTerm sb = solve_self(beta, cost, entropy, eps, opts, Side::B);
  if (sa.value.is_infinite() || sb.value.is_infinite()) {
    out.value = ExtendedReal::infinity();
    return out;
  }
  const double dm = total_mass(alpha) - total_mass(beta);
  out.value = out.value.value() - 0.5 * sa.value.value() - 0.5 * sb.value.value() + 0.5 * eps * dm * dm;
  return out;
}

DivergenceValue hausdorff_H(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostSpec& cost,
                            const Entropy& entropy, double eps, const SolveOptions& opts) {
  require_smooth(entropy, "hausdorff_H");
  require_non_null(alpha, beta, "hausdorff_H");
  const SelfTerm sa = solve_self(alpha, cost, entropy, eps, opts, Side::A);
  const SelfTerm sb = solve_self(beta, cost, entropy, eps, opts, Side::B);
  const CostMatrix c_ab = cost_matrix(alpha.points(), beta.points(), cost);
  const CostMatrix c_ba = c_ab.transpose();

  const Vector fa_x = entropy_gradient(alpha, sa.f, sa.cost, entropy, Side::A, eps);
  const Vector fa_y = entropy_gradient(alpha, sa.f, c_ab, entropy, Side::B, eps);
  const Vector fb_x = entropy_gradient(beta, sb.f, c_ba, entropy, Side::A, eps);
  const Vector fb_y = entropy_gradient(beta, sb.f, sb.cost, entropy, Side::B, eps);

  DivergenceValue out;
  out.value = alpha.weights().dot(fa_x - fb_x) - beta.weights().dot(fa_y - fb_y);
  out.report = sa.report.iterations >= sb.report.iterations ? sa.report : sb.report;
  return out;
}

namespace {

struct FullSolve {
  DualPotentials pots;
  CostMatrix cost;
  SolveReport report;
  ExtendedReal value;
  SelfTerm sa;
  SelfTerm sb;
};

FullSolve solve_for_gradients(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostSpec& cost,
                              const Entropy& entropy, double eps, Objective which, const SolveOptions& opts) {
  require_non_null(alpha, beta, "gradients");
  FullSolve s;
  s.cost = cost_matrix(alpha.points(), beta.points(), cost);
  SolveResult r = solve(alpha, beta, s.cost, entropy, eps, opts);
  if (!r.potentials) throw DomainError("gradients of an infeasible problem");
  s.pots = std::move(*r.potentials);
  s.report = r.report;
  s.value = dual_value(s.pots, alpha, beta, s.cost);
  if (which == Objective::S) {
    s.sa = solve_self(alpha, cost, entropy, eps, opts, Side::A);
    s.sb = solve_self(beta, cost, entropy, eps, opts, Side::B);
    const double dm = total_mass(alpha) - total_mass(beta);
    s.value = s.value.value() - 0.5 * s.sa.value.value() - 0.5 * s.sb.value.value() + 0.5 * eps * dm * dm;
  }
  return s;
}

}  // namespace

Gradients grad_weights(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostSpec& cost,
                       const Entropy& entropy, double eps, Objective which, const SolveOptions& opts) {
  require_smooth(entropy, "grad_weights");
  const FullSolve s = solve_for_gradients(alpha, beta, cost, entropy, eps, which, opts);
  Gradients g;
  g.value = s.value;
  g.d_weights_a = weight_gradient(s.pots, alpha, beta, s.cost, Side::A);
  g.d_weights_b = weight_gradient(s.pots, alpha, beta, s.cost, Side::B);
  if (which == Objective::S) {
    const double dm = total_mass(alpha) - total_mass(beta);
    g.d_weights_a -= weight_gradient(self_pots(s.sa, eps), alpha, alpha, s.sa.cost, Side::A);
    g.d_weights_b -= weight_gradient(self_pots(s.sb, eps), beta, beta, s.sb.cost, Side::A);
    g.d_weights_a.array() += eps * dm;
    g.d_weights_b.array() -= eps * dm;
  }
  return g;
}

Gradients grad_positions(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostSpec& cost,
                         const Entropy& entropy, double eps, Objective which, const SolveOptions& opts) {
  const FullSolve s = solve_for_gradients(alpha, beta, cost, entropy, eps, which, opts);
  Gradients g;
  g.value = s.value;
  const Matrix plan = implicit_plan(s.pots, alpha, beta, s.cost);
  g.d_points_a = transport_force(plan, alpha.points(), beta.points(), cost);
  g.d_points_b = transport_force(plan.transpose(), beta.points(), alpha.points(), cost);
  if (which == Objective::S) {
    g.d_points_a -= transport_force(implicit_plan(self_pots(s.sa, eps), alpha, alpha, s.sa.cost), alpha.points(),
                                    alpha.points(), cost);
    g.d_points_b -= transport_force(implicit_plan(self_pots(s.sb, eps), beta, beta, s.sb.cost), beta.points(),
                                    beta.points(), cost);
  }
  return g;
}

double kernel_norm_bound(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const Vector& f_a,
                         const Vector& g_b, const CostSpec& cost, double eps) {
  const Eigen::ArrayXd la = alpha.log_weights().array() + f_a.array() / eps;
  const Eigen::ArrayXd lb = beta.log_weights().array() + g_b.array() / eps;
  auto pair_sum = [eps](const Eigen::ArrayXd& l1, const Points& p1, const Eigen::ArrayXd& l2, const Points& p2,
                        const CostSpec& c) {
    const CostMatrix k = cost_matrix(p1, p2, c);
    Eigen::ArrayXXd u = (-k.array() / eps).colwise() + l1;
    u.rowwise() += l2.transpose();
    return std::exp(log_sum_exp(u.reshaped()));
  };
  const double aa = pair_sum(la, alpha.points(), la, alpha.points(), cost);
  const double bb = pair_sum(lb, beta.points(), lb, beta.points(), cost);
  const double ab = pair_sum(la, alpha.points(), lb, beta.points(), cost);
  return 0.5 * eps * (aa + bb - 2.0 * ab);
}

}  // namespace uot
