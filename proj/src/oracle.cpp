#include "uot/oracle.h"

#include <cmath>
#include <numbers>

#include "uot/divergences.h"
#include "uot/errors.h"

namespace uot {

namespace {

ExtendedReal phi_slack(const Entropy& e, double p, double tol) {
  if (tol > 0.0 && p >= 0.0) {
    if (e.kind() == Entropy::Kind::Balanced && std::abs(p - 1.0) <= tol) return 0.0;
    if (e.kind() == Entropy::Kind::Range && p >= e.a() * (1.0 - tol) && p <= e.b() * (1.0 + tol)) return 0.0;
  }
  return phi(e, p);
}

}  // namespace

ExtendedReal primal_cost(const Matrix& plan, const DiscreteMeasure& alpha, const DiscreteMeasure& beta,
                         const CostMatrix& cost, const Entropy& entropy, double eps, double indicator_tol) {
  if (plan.rows() != alpha.size() || plan.cols() != beta.size() || cost.rows() != plan.rows() ||
      cost.cols() != plan.cols())
    throw DomainError("primal_cost: inconsistent shapes");
  if ((plan.array() < 0.0).any()) return ExtendedReal::infinity();
  const Vector la = alpha.log_weights();
  const Vector lb = beta.log_weights();
  double transport = 0.0;
  double kl = 0.0;
  for (Index j = 0; j < plan.cols(); ++j)
    for (Index i = 0; i < plan.rows(); ++i) {
      const double p = plan(i, j);
      const double mu = std::exp(la[i] + lb[j]);
      transport += cost(i, j) * p;
      kl += mu;
      if (p > 0.0) kl += p * (std::log(p) - la[i] - lb[j]) - p;
    }
  ExtendedReal total = transport + eps * kl;
  const Vector row = plan.rowwise().sum();
  const Vector col = plan.colwise().sum().transpose();
  for (Index i = 0; i < alpha.size(); ++i)
    total += alpha.weights()[i] * phi_slack(entropy.at(Side::A, i), row[i] / alpha.weights()[i], indicator_tol);
  for (Index j = 0; j < beta.size(); ++j)
    total += beta.weights()[j] * phi_slack(entropy.at(Side::B, j), col[j] / beta.weights()[j], indicator_tol);
  return total;
}

ExtendedReal dirac_pair_objective(const Entropy& entropy, double m1, double m2, double c, double eps, double t) {
  if (t < 0.0) return ExtendedReal::infinity();
  const double kl = t > 0.0 ? t * std::log(t / (m1 * m2)) - t + m1 * m2 : m1 * m2;
  return c * t + eps * kl + m1 * phi(entropy, t / m1) + m2 * phi(entropy, t / m2);
}

double dirac_pair_value(const Entropy& entropy, double m1, double m2, double c, double eps) {
  if (!(m1 > 0.0 && m2 > 0.0)) throw DomainError("dirac_pair_value needs positive masses");
  auto obj = [&](double t) { return dirac_pair_objective(entropy, m1, m2, c, eps, t).value(); };
  if (entropy.kind() == Entropy::Kind::Balanced) return obj(m1);

  double lo = 0.0;
  double hi = 10.0 * std::max(m1, m2) * std::numbers::e;
  if (entropy.kind() == Entropy::Kind::Range) {
    lo = entropy.a() * std::max(m1, m2);
    hi = std::min(hi, entropy.b() * std::min(m1, m2));
    if (lo > hi) return std::numeric_limits<double>::infinity();
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = obj(x1);
  double f2 = obj(x2);
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = obj(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = obj(x2);
    }
  }
  // The bracket ends can beat the interior when the minimum sits on the boundary.
  return std::min({f1, f2, obj(lo), obj(hi)});
}

FdGradient fd_gradient(const std::function<double(const DiscreteMeasure&)>& value, const DiscreteMeasure& m,
                       double h) {
  if (!(h > 0.0)) throw DomainError("fd step must be positive");
  auto probe = [&](const DiscreteMeasure& x) {
    const double v = value(x);
    if (!std::isfinite(v)) throw FDDomainError("value is not finite at a finite-difference probe");
    return v;
  };
  FdGradient g;
  g.weights.resize(m.size());
  g.points.resize(m.size(), m.dim());
  for (Index i = 0; i < m.size(); ++i) {
    Vector w = m.weights();
    w[i] += h;
    const double up = probe(m.with_weights(w));
    w[i] -= 2.0 * h;
    if (w[i] <= 0.0) throw FDDomainError("finite-difference probe makes a weight nonpositive");
    g.weights[i] = (up - probe(m.with_weights(w))) / (2.0 * h);
    for (Index k = 0; k < m.dim(); ++k) {
      Points p = m.points();
      p(i, k) += h;
      const double pu = probe(m.with_points(p));
      p(i, k) -= 2.0 * h;
      g.points(i, k) = (pu - probe(m.with_points(p))) / (2.0 * h);
    }
  }
  return g;
}

GapReport duality_gap(const DiscreteMeasure& alpha, const DiscreteMeasure& beta, const CostMatrix& cost,
                      const DualPotentials& pots, double indicator_tol) {
  const Matrix plan = implicit_plan(pots, alpha, beta, cost);
  GapReport r;
  const ExtendedReal primal = primal_cost(plan, alpha, beta, cost, pots.entropy, pots.eps, indicator_tol);
  r.primal = primal.value();
  r.dual = dual_value(pots, alpha, beta, cost).value();
  r.gap = r.primal - r.dual;
  r.residual_a = (plan.rowwise().sum().array() / alpha.weights().array() - 1.0).abs().maxCoeff();
  r.residual_b = (plan.colwise().sum().transpose().array() / beta.weights().array() - 1.0).abs().maxCoeff();
  return r;
}

}  // namespace uot
