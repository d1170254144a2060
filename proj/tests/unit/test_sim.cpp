#include <cmath>

#include "doctest.h"
#include "impdde/cases.hpp"
#include "impdde/cauchy.hpp"
#include "impdde/error.hpp"
#include "impdde/sim.hpp"
#include "support.hpp"

using namespace impdde;
using sim::Side;

namespace {

// Closed form of x' = -x with x(k^+) = x(k) - 1 at every integer k >= 0,
// started at 0 (the jump at 0 acts on x0).
double counterexample(double x0, int n) {
  const double e1 = std::exp(-1.0);
  return std::exp(-n) * x0 - e1 * (1.0 - std::exp(-n)) / (1.0 - e1);
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("counterexample trajectory matches its closed form at integers") {
  const ModelSpec m = cases::load("example1");
  const auto traj = sim::integrate(m, InitialHistory::constant(1.0), 10.0, 0.01);
  for (int n = 1; n <= 10; ++n) CHECK(std::fabs(traj.evaluate_at(n) - counterexample(1.0, n)) < 1e-8);
}

TEST_CASE("one-sided values across a unit jump") {
  // History 2 puts x(0^+) = 1, so x(1^-) = e^-1 and x(1^+) = e^-1 - 1.
  const ModelSpec m = cases::load("example1");
  const auto traj = sim::integrate(m, InitialHistory::constant(2.0), 3.0, 0.01);
  CHECK(traj.evaluate_at(1.0, Side::left) == doctest::Approx(0.3678794412).epsilon(1e-9));
  CHECK(traj.evaluate_at(1.0, Side::right) == doctest::Approx(-0.6321205588).epsilon(1e-9));
  CHECK(traj.evaluate_at(1.5, Side::left) == traj.evaluate_at(1.5, Side::right));
  CHECK(traj.evaluate_at(-0.5) == 2.0);
  CHECK_THROWS_AS(traj.evaluate_at(3.5), ConfigError);
  CHECK_THROWS_AS(traj.evaluate_at(-1.5), ConfigError);
}

TEST_CASE("pure linear decay") {
  const auto traj = sim::integrate(testing::linear_decay(), InitialHistory::constant(1.0), 2.0, 0.01);
  CHECK(std::fabs(traj.evaluate_at(1.0) - std::exp(-1.0)) < 1e-10);
}

TEST_CASE("equilibrium of x' = -x + 1/(1+x) is preserved") {
  const auto traj = sim::integrate(testing::golden_model(), InitialHistory::constant(testing::golden), 10.0, 0.01);
  for (double v : traj.left_values()) CHECK(std::fabs(v - testing::golden) < 1e-6);
}

TEST_CASE("jumps follow the jump law exactly") {
  const ModelSpec m = cases::load("example56", testing::quick_bounds());
  const auto traj = sim::integrate(m, InitialHistory::constant(0.7), 12.0, 0.01);
  CHECK(traj.jumps().size() == 13);
  for (const auto& j : traj.jumps()) CHECK(j.right == doctest::Approx((1.0 + j.gamma) * j.left + j.delta).epsilon(1e-15));
  for (std::size_t i = 0; i < traj.times().size(); ++i) {
    if (!traj.is_impulse_node(i)) CHECK(traj.left_values()[i] == traj.right_values()[i]);
  }
}

TEST_CASE("fourth-order convergence against the closed form") {
  const ModelSpec m = cases::load("example1");
  double prev = 0.0;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const auto traj = sim::integrate(m, InitialHistory::constant(3.0), 10.0, h);
    const double err = std::fabs(traj.evaluate_at(10.0) - counterexample(3.0, 10));
    if (prev > 0.0) CHECK(prev / err >= 8.0);
    prev = err;
  }
}

TEST_CASE("linear consistency with the Cauchy function") {
  const ModelSpec m = testing::model_from(R"J({"a": "1.5 + 0.5*cos(t)", "T": 1, "impulses": {"t0": 0.25,
      "period_count": 2, "period_length": 2, "offsets": [0, 1], "gamma": [-0.5, 1], "delta": [0, 0]}})J");
  const cauchy::CauchyMatrix H(m);
  const auto traj = sim::integrate(m, InitialHistory::constant(1.3, 0.1), 8.0, 0.005);
  for (double t : {0.5, 1.25, 2.0, 4.4, 7.9}) {
    CHECK(traj.evaluate_at(t) == doctest::Approx(H(t, 0.1) * 1.3).epsilon(1e-8));
  }
}

TEST_CASE("counterexample trajectories tend to the negative limit") {
  const ModelSpec m = cases::load("example1");
  const double limit = -std::exp(-1.0) / (1.0 - std::exp(-1.0));
  for (double x0 : {0.5, 1.0, 5.0, 50.0}) {
    const auto traj = sim::integrate(m, InitialHistory::constant(x0), 40.0, 0.01);
    CHECK(std::fabs(traj.evaluate_at(40.0) - limit) < 1e-9);
    for (int n = 6; n <= 40; ++n) CHECK(traj.evaluate_at(n) < 0.0);
  }
}

TEST_CASE("pairwise gaps") {
  const ModelSpec m = cases::load("example1");
  const auto a = sim::integrate(m, InitialHistory::constant(1.0), 5.0, 0.01);
  const auto b = sim::integrate(m, InitialHistory::constant(2.0), 5.0, 0.01);
  const auto c = sim::integrate(m, InitialHistory::constant(1.0), 5.0, 0.01);
  for (const auto& [t, gap] : sim::pairwise_gap(a, b, 0.0, 5.0)) {
    // Jumps add the same delta to both, so the gap is e^{-t}.
    CHECK(gap == doctest::Approx(std::exp(-t)).epsilon(1e-8));
  }
  for (const auto& [t, gap] : sim::pairwise_gap(a, c, 0.0, 5.0)) CHECK(gap == 0.0);
  const auto d = sim::integrate(m, InitialHistory::constant(1.0), 5.0, 0.02);
  CHECK_THROWS_AS(sim::pairwise_gap(a, d, 0.0, 5.0), ConfigError);
}

TEST_CASE("worked example trajectories merge") {
  const ModelSpec m = cases::load("example56", testing::quick_bounds());
  const auto a = sim::integrate(m, InitialHistory::constant(0.5), 20.0, 0.01);
  const auto b = sim::integrate(m, InitialHistory::constant(2.0), 20.0, 0.01);
  CHECK(std::fabs(a.evaluate_at(20.0) - b.evaluate_at(20.0)) < 1e-3);
}

TEST_CASE("argument checks") {
  const ModelSpec m = cases::load("example1");
  CHECK_THROWS_AS(sim::integrate(m, InitialHistory::constant(1.0), 0.0, 0.01), ConfigError);
  CHECK_THROWS_AS(sim::integrate(m, InitialHistory::constant(1.0), 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(sim::integrate(m, InitialHistory::constant(1.0), 1.0, 0.3), ConfigError);
  CHECK_THROWS_AS(sim::integrate(m, InitialHistory{}, 1.0, 0.01), ConfigError);
}

TEST_CASE("blow-up is reported as a numerical failure") {
  const ModelSpec m = testing::model_from(R"({"a": "1", "T": 1, "impulses": {"period_count": 1,
      "period_length": 1, "offsets": [0.5], "gamma": [0], "delta": [1e308]}})");
  CHECK_THROWS_AS(sim::integrate(m, InitialHistory::constant(1.0), 3.0, 0.01), NumericalError);
}

}
