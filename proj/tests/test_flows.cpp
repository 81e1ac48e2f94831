#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "test_util.h"
#include "uot/errors.h"
#include "uot/flows.h"

using namespace uot;

namespace {

const CostSpec sq = CostSpec::sq_euclidean();

FlowParams small_params(const Entropy& e) {
  FlowParams p;
  p.entropy = e;
  p.eps = 0.05;
  p.eta_x = 5.0;
  p.mass_rate = MassRate::EtaR;
  p.solve.tol = 1e-11;
  p.solve.max_iter = 100000;
  return p;
}

}  // namespace

TEST_CASE("a state equal to the target does not move") {
  std::mt19937_64 rng(1);
  const auto b = test::random_measure(rng, 8, 2, 1.0);
  // TV is left out: its weight gradient is a subgradient and need not vanish here.
  for (const Entropy& e : {Entropy::kl(0.1), Entropy::hellinger(0.1), Entropy::balanced()}) {
    const FlowParams p = small_params(e);
    const FlowState s = FlowState::from_measure(b);
    const FlowState n = flow_step(s, b, sq, p);
    CHECK(n.step == 1);
    CHECK((n.positions - s.positions).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((n.r - s.r).cwiseAbs().maxCoeff() <= 1e-8);
  }
  const FlowState n = flow_step(FlowState::from_measure(b), b, sq, small_params(Entropy::tv(0.1)));
  CHECK((n.positions - b.points()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("a single particle moves toward a single target") {
  const auto b = new_measure({1.0}, {{1.0, 1.0}});
  FlowState s{Points(1, 2), Vector::Ones(1), 0};
  s.positions << 0.2, 0.5;
  FlowParams p = small_params(Entropy::kl(0.5));
  p.eta_x = 0.1;
  const FlowState n = flow_step(s, b, sq, p);
  CHECK(n.positions(0, 0) > 0.2);
  CHECK(n.positions(0, 1) > 0.5);
  CHECK(n.positions(0, 0) < 1.0);
}

TEST_CASE("mass_updates off keeps r bit-for-bit; Balanced forces it off") {
  std::mt19937_64 rng(2);
  const auto a = test::random_measure(rng, 6, 2, 1.0);
  const auto b = test::random_measure(rng, 7, 2, 1.0);
  FlowParams p = small_params(Entropy::kl(0.2));
  p.mass_updates = false;
  const FlowState s = FlowState::from_measure(a);
  CHECK(flow_step(s, b, sq, p).r == s.r);
  FlowParams pb = small_params(Entropy::balanced());
  CHECK(flow_step(s, b, sq, pb).r == s.r);
  const auto heavy = test::random_measure(rng, 7, 2, 2.0);
  CHECK_THROWS_AS(flow_step(s, heavy, sq, pb), DomainError);
}

TEST_CASE("run_flow snapshots") {
  std::mt19937_64 rng(3);
  const auto a = test::random_measure(rng, 5, 2, 1.0);
  const auto b = test::random_measure(rng, 5, 2, 0.5);
  FlowParams p = small_params(Entropy::kl(0.2));
  p.steps = 0;
  const auto t0 = run_flow(FlowState::from_measure(a), b, sq, p);
  REQUIRE(t0.size() == 1);
  CHECK(t0[0].state.positions == a.points());
  CHECK(t0[0].state.step == 0);

  p.steps = 7;
  const auto t = run_flow(FlowState::from_measure(a), b, sq, p, 3);
  REQUIRE(t.size() == 4);
  CHECK(t[0].state.step == 0);
  CHECK(t[1].state.step == 3);
  CHECK(t[2].state.step == 6);
  CHECK(t[3].state.step == 7);
  CHECK(t[3].s_eps < t[0].s_eps);
  for (const auto& s : t) CHECK(s.state.r.minCoeff() > 0.0);
}

TEST_CASE("zero rates give a constant trajectory") {
  std::mt19937_64 rng(4);
  const auto a = test::random_measure(rng, 5, 2, 1.0);
  const auto b = test::random_measure(rng, 6, 2, 1.5);
  FlowParams p = small_params(Entropy::kl(0.2));
  p.eta_x = 0.0;
  p.eta_r = 0.0;
  p.steps = 4;
  for (const auto& s : run_flow(FlowState::from_measure(a), b, sq, p)) {
    CHECK(s.state.positions == a.points());
    CHECK((s.state.r.array().square().matrix() - a.weights()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("permutation equivariance") {
  std::mt19937_64 rng(5);
  const auto a = test::random_measure(rng, 9, 2, 1.2);
  const auto b = test::random_measure(rng, 7, 2, 1.0);
  std::vector<Index> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Vector w(9);
  Points x(9, 2);
  for (Index i = 0; i < 9; ++i) {
    w[i] = a.weights()[perm[i]];
    x.row(i) = a.points().row(perm[i]);
  }
  FlowParams p = small_params(Entropy::kl(0.2));
  p.steps = 5;
  const auto t1 = run_flow(FlowState::from_measure(a), b, sq, p, 5);
  const auto t2 = run_flow(FlowState::from_measure(DiscreteMeasure(w, x)), b, sq, p, 5);
  const FlowState& s1 = t1.back().state;
  const FlowState& s2 = t2.back().state;
  for (Index i = 0; i < 9; ++i) {
    CHECK((s2.positions.row(i) - s1.positions.row(perm[i])).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(std::abs(s2.r[i] - s1.r[perm[i]]) <= 1e-9);
  }
}

TEST_CASE("the printed mass rate uses eta_x") {
  std::mt19937_64 rng(6);
  const auto a = test::random_measure(rng, 4, 2, 1.0);
  const auto b = test::random_measure(rng, 4, 2, 2.0);
  FlowParams px = small_params(Entropy::kl(0.5));
  px.eta_x = 0.2;
  px.eta_r = 0.2;
  px.mass_rate = MassRate::EtaX;
  FlowParams pr = px;
  pr.mass_rate = MassRate::EtaR;
  const FlowState s = FlowState::from_measure(a);
  CHECK((flow_step(s, b, sq, px).r - flow_step(s, b, sq, pr).r).cwiseAbs().maxCoeff() <= 1e-14);
  pr.eta_r = 0.05;
  CHECK((flow_step(s, b, sq, px).r - flow_step(s, b, sq, pr).r).cwiseAbs().maxCoeff() > 1e-6);
}
