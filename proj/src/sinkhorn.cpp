#include "uot/sinkhorn.h"

#include <cmath>
#include <string>

#include "uot/errors.h"
#include "uot/softmin.h"

namespace uot {

double softmin(double eps, const DiscreteMeasure& m, const Vector& h) {
  if (m.is_null()) throw DomainError("softmin over the null measure");
  if (h.size() != m.size()) throw DomainError("softmin: potential length does not match the measure");
  return softmin(eps, m.log_weights(), h);
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

namespace {

// out_t = Smin(C(., t) - pot) for every column t of `cost`.
void softmin_columns(double eps, const Vector& log_w, const Vector& pot, const CostMatrix& cost, Vector& out) {
  const Index n = cost.rows();
  const Index cols = cost.cols();
  const double inv_eps = 1.0 / eps;
  const Eigen::ArrayXd base = log_w.array() + pot.array() * inv_eps;
  out.resize(cols);
#pragma omp parallel if (n * cols > 32768)
  {
    Eigen::ArrayXd u(n);
#pragma omp for schedule(static)
    for (Index t = 0; t < cols; ++t) {
      u = base - cost.col(t).array() * inv_eps;
      const double mx = u.maxCoeff();
      out[t] = -eps * (mx + std::log((u - mx).exp().sum()));
    }
  }
}

void apply_damp(const Entropy& e, double eps, Side side, Vector& v) {
  if (const auto* field = e.rho_field()) {
    const Vector& rho = side == Side::A ? field->on_a : field->on_b;
    if (rho.size() != v.size()) throw DomainError("rho field length does not match the measure");
    v.array() *= rho.array() / (rho.array() + eps);
    return;
  }
  switch (e.kind()) {
    case Entropy::Kind::Balanced: return;
    case Entropy::Kind::KL: v *= e.rho() / (e.rho() + eps); return;
    default:
      for (Index i = 0; i < v.size(); ++i) v[i] = damp(e, eps, v[i]);
  }
}

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("eps must be positive and finite");
}

void check_tol(const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("tol must be positive");
  if (opts.max_iter < 1) throw DomainError("max_iter must be positive");
}

double sup_diff(const Vector& a, const Vector& b) { return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Vector half_update(double eps, const Entropy& entropy, const DiscreteMeasure& m_other, const Vector& pot_other,
                   const CostMatrix& cost_other_by_target, Side target_side) {
  check_eps(eps);
  if (m_other.is_null()) throw DomainError("half_update over the null measure");
  if (pot_other.size() != m_other.size() || cost_other_by_target.rows() != m_other.size())
    throw DomainError("half_update: inconsistent lengths");
  Vector out;
  softmin_columns(eps, m_other.log_weights(), pot_other, cost_other_by_target, out);
  apply_damp(entropy, eps, target_side, out);
  return out;
}

SolveResult solve(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostMatrix& cost,
                  const Entropy& entropy, double eps, const SolveOptions& opts) {
  check_eps(eps);
  check_tol(opts);
  SolveResult result;
  if (feasible(entropy, total_mass(alpha), total_mass(beta)) == Feasibility::Infeasible) {
    result.report.status = SolveStatus::Infeasible;
    return result;
  }
  if (alpha.is_null() || beta.is_null()) throw DomainError("solve needs non-null measures");
  if (cost.rows() != alpha.size() || cost.cols() != beta.size()) throw DomainError("cost matrix shape mismatch");

  const CostMatrix cost_t = cost.transpose();
  const Vector log_a = alpha.log_weights();
  const Vector log_b = beta.log_weights();

  Vector f;
  Vector g;
  switch (opts.init) {
    case InitKind::Asymptotic:
      f = init_potential(entropy, eps, alpha, beta, cost, Side::A);
      g = init_potential(entropy, eps, beta, alpha, cost_t, Side::B);
      break;
    case InitKind::Zero:
      f = Vector::Zero(alpha.size());
      g = Vector::Zero(beta.size());
      break;
    case InitKind::Provided:
      if (opts.init_f.size() != alpha.size()) throw DomainError("provided f has the wrong length");
      f = opts.init_f;
      g = opts.init_g.size() == beta.size() ? opts.init_g : Vector::Zero(beta.size());
      break;
  }

  Vector f_new;
  Vector g_new;
  SolveReport& report = result.report;
  report.status = SolveStatus::MaxIter;
  for (int it = 1; it <= opts.max_iter; ++it) {
    softmin_columns(eps, log_a, f, cost, g_new);
    apply_damp(entropy, eps, Side::B, g_new);
    softmin_columns(eps, log_b, g_new, cost_t, f_new);
    apply_damp(entropy, eps, Side::A, f_new);

    const double df = sup_diff(f_new, f);
    const double dg = sup_diff(g_new, g);
    f.swap(f_new);
    g.swap(g_new);
    if (!f.allFinite() || !g.allFinite()) throw DomainError("Sinkhorn iterates became non-finite");

    report.iterations = it;
    report.final_update = std::max(df, dg);
    if (opts.record_history) {
      report.update_history.push_back(report.final_update);
      report.f_update_history.push_back(df);
    }
    if (report.final_update <= opts.tol) {
      report.status = SolveStatus::Converged;
      break;
    }
  }
  result.potentials = DualPotentials{std::move(f), std::move(g), eps, entropy};
  return result;
}

SymmetricSolveResult solve_symmetric(const DiscreteMeasure& alpha, const CostMatrix& cost_aa, const Entropy& entropy,
                                     double eps, const SolveOptions& opts, Side side) {
  check_eps(eps);
  check_tol(opts);
  if (alpha.is_null()) throw DomainError("solve_symmetric needs a non-null measure");
  if (cost_aa.rows() != alpha.size() || cost_aa.cols() != alpha.size())
    throw DomainError("cost matrix shape mismatch");
  const double mass = total_mass(alpha);
  SymmetricSolveResult result;
  if (feasible(entropy, mass, mass) == Feasibility::Infeasible) {
    result.report.status = SolveStatus::Infeasible;
    return result;
  }

  Vector f;
  switch (opts.init) {
    case InitKind::Asymptotic: f = init_potential(entropy, eps, alpha, alpha, cost_aa, side); break;
    case InitKind::Zero: f = Vector::Zero(alpha.size()); break;
    case InitKind::Provided:
      if (opts.init_f.size() != alpha.size()) throw DomainError("provided f has the wrong length");
      f = opts.init_f;
      break;
  }

  const Vector log_a = alpha.log_weights();
  Vector tf;
  SolveReport& report = result.report;
  report.status = SolveStatus::MaxIter;
  for (int it = 1; it <= opts.max_iter; ++it) {
    softmin_columns(eps, log_a, f, cost_aa, tf);
    apply_damp(entropy, eps, side, tf);
    const double residual = sup_diff(tf, f);
    if (!std::isfinite(residual)) throw DomainError("symmetric Sinkhorn iterates became non-finite");
    report.iterations = it;
    report.final_update = residual;
    if (opts.record_history) {
      report.update_history.push_back(residual);
      report.f_update_history.push_back(residual);
    }
    if (residual <= opts.tol) {
      report.status = SolveStatus::Converged;
      break;
    }
    f = 0.5 * (f + tf);
  }
  result.f = std::move(f);
  return result;
}

Vector extrapolate(const DualPotentials& pots, Side source_side, const DiscreteMeasure& m_source,
                   const Points& new_points, const CostSpec& cost) {
  if (pots.entropy.has_rho_field())
    throw Unsupported("extrapolation needs rho at the new points; spatially varying KL is not supported here");
  const Vector& pot = source_side == Side::A ? pots.f : pots.g;
  if (pot.size() != m_source.size()) throw DomainError("extrapolate: potential length does not match the measure");
  return half_update(pots.eps, pots.entropy, m_source, pot, cost_matrix(m_source.points(), new_points, cost),
                     source_side == Side::A ? Side::B : Side::A);
}

Matrix implicit_plan(const DualPotentials& pots, const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                     const CostMatrix& cost) {
  if (pots.f.size() != alpha.size() || pots.g.size() != beta.size() || cost.rows() != alpha.size() ||
      cost.cols() != beta.size())
    throw DomainError("implicit_plan: inconsistent shapes");
  const double inv_eps = 1.0 / pots.eps;
  Matrix plan(alpha.size(), beta.size());
  for (Index j = 0; j < beta.size(); ++j) {
    const double lb = std::log(beta.weights()[j]) + pots.g[j] * inv_eps;
    plan.col(j) =
        (alpha.log_weights().array() + pots.f.array() * inv_eps + lb - cost.col(j).array() * inv_eps).exp().matrix();
  }
  return plan;
}

DiscreteMeasure plan_as_measure(const Matrix& plan, const DiscreteMeasure& alpha, const DiscreteMeasure& beta) {
  const Index n = alpha.size();
  const Index m = beta.size();
  const Index d = alpha.dim();
  Vector w(n * m);
  Points pts(n * m, d + beta.dim());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) {
      w[i * m + j] = plan(i, j);
      pts.row(i * m + j) << alpha.points().row(i), beta.points().row(j);
    }
  return {w, pts};
}

}  // namespace uot
