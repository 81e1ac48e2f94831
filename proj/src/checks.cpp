#include "uot/checks.h"

#include <cmath>
#include <random>
#include <sstream>

#include "uot/divergences.h"
#include "uot/lambert_w.h"
#include "uot/oracle.h"

namespace uot {

namespace {

DiscreteMeasure random_measure(std::mt19937_64& rng, Index n, Index d, double mass) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector w(n);
  Points p(n, d);
  for (Index i = 0; i < n; ++i) {
    w[i] = 0.2 + u(rng);
    for (Index k = 0; k < d; ++k) p(i, k) = u(rng);
  }
  w *= mass / w.sum();
  return {w, p};
}

double rel_err(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b) {
  return (a - b).lpNorm<Eigen::Infinity>() / std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
}

CheckResult make(std::string name, bool pass, double metric) {
  std::ostringstream os;
  os.precision(3);
  os << metric;
  return {std::move(name), pass, os.str()};
}

}  // namespace

std::vector<CheckResult> run_oracle_checks(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;
  const CostSpec sq = CostSpec::sq_euclidean();
  SolveOptions tight;
  tight.tol = 1e-12;
  tight.max_iter = 100000;

  {
    double worst = 0.0;
    for (double c : {0.5, 3.0})
      for (double rho : {0.1, 1.0})
        for (double eps : {0.1, 1.0}) {
          const auto a = new_measure({1.0}, {{0.0}});
          const auto b = new_measure({1.0}, {{std::sqrt(c)}});
          const Entropy e = Entropy::kl(rho);
          const double ref = dirac_pair_value(e, 1.0, 1.0, c, eps);
          const double v = ot_eps(a, b, sq, e, eps, tight).value.value();
          worst = std::max(worst, std::abs(v - ref) / std::abs(ref));
        }
    out.push_back(make("dirac_pair_kl_vs_golden_section", worst <= 1e-9, worst));
  }
  {
    const auto a = random_measure(rng, 20, 2, 1.0);
    const auto b = random_measure(rng, 20, 2, 1.5);
    const CostMatrix c = cost_matrix(a.points(), b.points(), sq);
    const SolveResult r = solve(a, b, c, Entropy::kl(0.5), 0.1, tight);
    const GapReport g = duality_gap(a, b, c, *r.potentials);
    const double metric = std::abs(g.gap) / (1.0 + std::abs(g.dual));
    out.push_back(make("duality_gap_kl", metric <= 1e-6, metric));
  }
  {
    const auto a = random_measure(rng, 30, 2, 1.0);
    const auto b = random_measure(rng, 30, 2, 1.0);
    const CostMatrix c = cost_matrix(a.points(), b.points(), sq);
    SolveOptions o = tight;
    o.tol = 1e-10;
    const SolveResult r = solve(a, b, c, Entropy::balanced(), 0.1, o);
    const GapReport g = duality_gap(a, b, c, *r.potentials);
    const double metric = std::max(g.residual_a, g.residual_b);
    out.push_back(make("balanced_marginals", metric <= 1e-6, metric));
  }
  {
    const auto a = random_measure(rng, 8, 2, 1.0);
    const auto b = random_measure(rng, 9, 2, 1.3);
    const Entropy e = Entropy::kl(0.5);
    const Gradients gw = grad_weights(a, b, sq, e, 0.1, Objective::S, tight);
    const Gradients gp = grad_positions(a, b, sq, e, 0.1, Objective::S, tight);
    const FdGradient fd = fd_gradient(
        [&](const DiscreteMeasure& m) { return sinkhorn_divergence_S(m, b, sq, e, 0.1, tight).value.value(); }, a,
        1e-5);
    const double metric = std::max(rel_err(gw.d_weights_a, fd.weights), rel_err(gp.d_points_a, fd.points));
    out.push_back(make("sinkhorn_divergence_gradients_vs_fd", metric <= 1e-5, metric));
  }
  {
    const auto a = random_measure(rng, 5, 2, 1.0);
    const auto b = random_measure(rng, 5, 2, 4.0);
    const SolveResult r =
        solve(a, b, cost_matrix(a.points(), b.points(), sq), Entropy::range(0.5, 1.5), 0.1, tight);
    out.push_back(make("range_infeasible", r.report.status == SolveStatus::Infeasible && !r.potentials, 0.0));
  }
  {
    const auto b = random_measure(rng, 6, 2, 3.0);
    const ExtendedReal v = ot_eps(DiscreteMeasure::null(2), b, sq, Entropy::kl(1.0), 0.1).value;
    const double metric = std::abs(v.value() - total_mass(b));
    out.push_back(make("null_measure_kl", metric == 0.0, metric));
  }
  {
    double worst = 0.0;
    for (double lz = -27.0; lz <= 27.0; lz += 0.5) {
      const double z = std::exp(lz);
      const double w = lambert_w(z);
      worst = std::max(worst, std::abs(w * std::exp(w) - z) / (1.0 + z));
    }
    out.push_back(make("lambert_w_residual", worst <= 1e-12, worst));
  }
  {
    const double rho = 0.5;
    const double eps = 0.2;
    const double c = 2.0;
    const double m1 = 1.0;
    const double m2 = 2.0;
    const double t = m1 * m2 * std::exp(-(c - 2.0 * rho) / eps);
    const double ref = rho * (m1 + m2) + eps * m1 * m2 - eps * t;
    const double metric = std::abs(dirac_pair_value(Entropy::tv(rho), m1, m2, c, eps) - ref);
    out.push_back(make("tv_dirac_pair_closed_form", metric <= 1e-10, metric));
  }
  return out;
}

}  // namespace uot
