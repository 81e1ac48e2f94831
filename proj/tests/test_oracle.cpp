#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.h"
#include "uot/divergences.h"
#include "uot/errors.h"
#include "uot/oracle.h"

using namespace uot;

namespace {

SolveOptions tight(double tol = 1e-12) {
  SolveOptions o;
  o.tol = tol;
  o.max_iter = 200000;
  return o;
}

double kl_phi(double rho, double p) { return rho * (p * std::log(p) - p + 1.0); }

}  // namespace

TEST_CASE("primal cost of the product plan, term by term") {
  const auto a = new_measure({0.4, 0.8}, {{0.0}, {1.0}});
  const auto b = new_measure({0.5, 1.5}, {{0.5}, {2.0}});
  const CostMatrix c = cost_matrix(a.points(), b.points(), CostSpec::sq_euclidean());
  Matrix plan(2, 2);
  plan << 0.2, 0.6, 0.4, 1.2;  // alpha x beta
  const double rho = 0.7, eps = 0.3;
  // <C, pi> = 0.25*0.2 + 4*0.6 + 0.25*0.4 + 1*1.2
  const double transport = 0.05 + 2.4 + 0.1 + 1.2;
  // pi 1 = 2 alpha and pi^T 1 = 1.2 beta; KL(pi | alpha x beta) = 0.
  const double marg_a = 1.2 * kl_phi(rho, 2.0);
  const double marg_b = 2.0 * kl_phi(rho, 1.2);
  const ExtendedReal v = primal_cost(plan, a, b, c, Entropy::kl(rho), eps);
  CHECK(v.value() == doctest::Approx(transport + marg_a + marg_b).epsilon(1e-14));
}

TEST_CASE("primal cost of the zero plan and of infeasible plans") {
  const auto a = new_measure({0.4, 0.8}, {{0.0}, {1.0}});
  const auto b = new_measure({0.5, 1.5}, {{0.5}, {2.0}});
  const CostMatrix c = cost_matrix(a.points(), b.points(), CostSpec::sq_euclidean());
  const Matrix zero = Matrix::Zero(2, 2);
  const double eps = 0.2;
  for (const Entropy& e : {Entropy::kl(0.7), Entropy::tv(0.3), Entropy::hellinger(1.0)}) {
    const double ref = (1.2 + 2.0) * e.phi_at_zero().value() + eps * 1.2 * 2.0;
    CHECK(primal_cost(zero, a, b, c, e, eps).value() == doctest::Approx(ref).epsilon(1e-14));
  }
  CHECK(primal_cost(zero, a, b, c, Entropy::balanced(), eps).is_infinite());
  CHECK(primal_cost(zero, a, b, c, Entropy::berg(1.0), eps).is_infinite());
  Matrix neg = zero;
  neg(0, 0) = -1e-3;
  CHECK(primal_cost(neg, a, b, c, Entropy::kl(1.0), eps).is_infinite());
}

TEST_CASE("dirac_pair_value") {
  CHECK(std::abs(dirac_pair_value(Entropy::kl(1.0), 1, 1, 0.0, 1.0)) <= 1e-15);
  CHECK(dirac_pair_value(Entropy::kl(1.0), 1, 1, 3.0, 1.0) == doctest::Approx(3.0 * (1.0 - std::exp(-1.0))).epsilon(1e-12));
  CHECK(dirac_pair_value(Entropy::kl(1.0), 1, 1, 3.0, 1.0) == doctest::Approx(1.8964).epsilon(1e-4));

  // TV with c > 2 rho: t* = m1 m2 exp(-(c - 2 rho) / eps).
  const double rho = 0.4, eps = 0.3, m1 = 1.5, m2 = 0.8;
  for (double c : {1.0, 2.0, 4.0}) {
    const double t = m1 * m2 * std::exp(-(c - 2 * rho) / eps);
    const double ref = rho * (m1 + m2) + eps * m1 * m2 - eps * t;
    CHECK(std::abs(dirac_pair_value(Entropy::tv(rho), m1, m2, c, eps) - ref) <= 1e-10);
  }

  for (const Entropy& e : {Entropy::kl(0.5), Entropy::tv(0.5), Entropy::hellinger(0.5)}) {
    double prev = -1.0;
    const double bound = (m1 + m2) * e.phi_at_zero().value() + eps * m1 * m2;
    for (double c = 0.0; c <= 6.0; c += 0.25) {
      const double v = dirac_pair_value(e, m1, m2, c, eps);
      CHECK(v >= prev - 1e-12);
      CHECK(v <= bound + 1e-12);
      prev = v;
    }
  }
  CHECK(std::isinf(dirac_pair_value(Entropy::range(0.5, 1.5), 1.0, 4.0, 1.0, 0.1)));
}

TEST_CASE("dirac_pair_value matches the solver for other entropies") {
  for (const Entropy& e : {Entropy::tv(0.3), Entropy::hellinger(1.0), Entropy::berg(0.7), Entropy::range(0.5, 2.0)})
    for (double c : {0.5, 2.0}) {
      const auto a = test::dirac(1.0, 0.0);
      const auto b = test::dirac(1.7, std::sqrt(c));
      const double v = ot_eps(a, b, CostSpec::sq_euclidean(), e, 0.25, tight()).value.value();
      CHECK(v == doctest::Approx(dirac_pair_value(e, 1.0, 1.7, c, 0.25)).epsilon(1e-9));
    }
}

TEST_CASE("fd_gradient harness") {
  const auto m = new_measure({0.5, 1.5, 2.0}, {{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}});
  const FdGradient g = fd_gradient(
      [](const DiscreteMeasure& x) { return x.weights().squaredNorm() + x.points().squaredNorm(); }, m, 1e-4);
  CHECK(test::rel_err(g.weights, Vector(2.0 * m.weights())) <= 1e-10);
  CHECK(test::rel_err(g.points, Points(2.0 * m.points())) <= 1e-10);
  CHECK_THROWS_AS(fd_gradient([](const DiscreteMeasure&) { return INFINITY; }, m, 1e-4), FDDomainError);
  CHECK_THROWS_AS(fd_gradient([](const DiscreteMeasure&) { return 0.0; }, m, 1.0), FDDomainError);
}

TEST_CASE("duality gap") {
  const auto a = test::dirac(1.0, 0.0);
  const auto b = test::dirac(1.0, 1.5);
  const CostMatrix c = cost_matrix(a.points(), b.points(), CostSpec::sq_euclidean());
  const SolveResult r = solve(a, b, c, Entropy::kl(0.5), 0.2, tight());
  CHECK(std::abs(duality_gap(a, b, c, *r.potentials).gap) <= 1e-10);

  std::mt19937_64 rng(19);
  for (const Entropy& e : {Entropy::kl(0.5), Entropy::hellinger(1.0), Entropy::berg(1.0), Entropy::tv(0.3),
                           Entropy::range(0.6, 1.6)}) {
    const auto p = test::random_measure(rng, 20, 2, 1.0);
    const auto q = test::random_measure(rng, 20, 2, 1.4);
    const CostMatrix cm = cost_matrix(p.points(), q.points(), CostSpec::sq_euclidean());
    const SolveResult s = solve(p, q, cm, e, 0.1, tight(1e-11));
    REQUIRE(s.report.status == SolveStatus::Converged);
    const GapReport g = duality_gap(p, q, cm, *s.potentials);
    CHECK(g.primal >= g.dual - 1e-9);
    CHECK(std::abs(g.gap) <= 1e-6 * (1.0 + std::abs(g.dual)));
  }

  const auto p = test::random_measure(rng, 25, 2, 1.0);
  const auto q = test::random_measure(rng, 20, 2, 1.0);
  const CostMatrix cm = cost_matrix(p.points(), q.points(), CostSpec::sq_euclidean());
  const SolveResult s = solve(p, q, cm, Entropy::balanced(), 0.1, tight(1e-11));
  const GapReport g = duality_gap(p, q, cm, *s.potentials);
  CHECK(g.residual_a <= 1e-6);
  CHECK(g.residual_b <= 1e-6);
  CHECK(std::abs(g.gap) <= 1e-6 * (1.0 + std::abs(g.dual)));
}
