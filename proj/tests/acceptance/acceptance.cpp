// One PASS/FAIL line per acceptance criterion; exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "impdde/analyze.hpp"
#include "impdde/cases.hpp"
#include "impdde/cauchy.hpp"
#include "impdde/error.hpp"
#include "impdde/fixpoint.hpp"
#include "impdde/halanay.hpp"
#include "impdde/sim.hpp"
#include "support.hpp"

using namespace impdde;
namespace t = impdde::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << (ok ? "" : "VIOLATED ") << what;
  }
};

std::string fmt(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string near(const char* name, double value, double expected, double tol, Outcome& o) {
  const std::string s = std::string(name) + "=" + fmt(value, 10) + " (" + fmt(expected, 10) + "+/-" + fmt(tol) + ")";
  o.require(std::fabs(value - expected) <= tol, s);
  return s;
}

int failures = 0;

void criterion(int n, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < budget_s, "runtime " + fmt(secs, 3) + " s < " + fmt(budget_s) + " s");
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << o.detail.str() << std::endl;
}

// Left and right gaps on the shared nodes of two trajectories.
struct GapSample {
  double t, left, right;
  bool impulse;
};

std::vector<GapSample> gaps(const sim::Trajectory& a, const sim::Trajectory& b) {
  std::vector<GapSample> out;
  const auto& ta = a.times();
  for (std::size_t i = 0; i < ta.size(); ++i) {
    out.push_back({ta[i], std::fabs(a.left_values()[i] - b.left_values()[i]),
                   std::fabs(a.right_values()[i] - b.right_values()[i]), a.is_impulse_node(i)});
  }
  return out;
}

// Largest violation of gap <= envelope (+ slack) over t >= T0. At an impulse
// instant the left gap is compared with the envelope's left limit.
double envelope_excess(const halanay::HalanayProblem& p, double ybar0, const ImpulseSchedule& schedule, double T0,
                       const std::vector<GapSample>& g) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const GapSample& s : g) {
    if (s.t < T0) continue;
    const auto env = halanay::certified_envelope(p, ybar0, schedule, T0, s.t);
    double left_env = env.exact;
    if (s.impulse && s.t > T0) {
      const auto at = schedule.impulses_in(s.t - 1e-12 * std::max(1.0, std::fabs(s.t)), s.t);
      for (const Impulse& imp : at) left_env /= 1.0 + imp.gamma;
    }
    worst = std::max(worst, s.left - left_env);
    worst = std::max(worst, s.right - env.exact);
  }
  return worst;
}

// Random model with the structure of the worked example whose parameters are
// drawn until both verdicts hold.
std::string random_feasible_config(std::mt19937_64& g) {
  const double a0 = t::uniform(g, 3.0, 6.0), a1 = t::uniform(g, 0.0, 1.0), w1 = t::uniform(g, 0.5, 2.0);
  const double b0 = t::uniform(g, 0.02, 0.1), c0 = t::uniform(g, 0.02, 0.1), w2 = t::uniform(g, 0.5, 2.0);
  const double tm = t::uniform(g, 0.1, 1.0), sm = t::uniform(g, 0.1, 1.0), w3 = t::uniform(g, 0.3, 1.0);
  const double h0 = t::uniform(g, 0.0, 0.05);
  const int alpha = std::uniform_int_distribution<int>(1, 2)(g);
  const int beta = std::uniform_int_distribution<int>(1, 2)(g);
  const double theta = t::uniform(g, 2.5, 4.0);
  const double g1 = t::uniform(g, -0.5, 1.0);
  const double g2 = 1.0 / (1.0 + g1) - 1.0;
  const double o1 = t::uniform(g, 0.05, 0.3) * theta, o2 = o1 + 0.5 * theta;
  const double d1 = t::uniform(g, 0.1, 1.0), d2 = t::uniform(g, 0.1, 1.0);
  const std::string n = "\"";
  return "{\"a\": \"" + t::num(a0) + " + " + t::num(a1) + "*abs(sin(" + t::num(w1) + "*t))\", \"T\": 1, " +
         "\"terms\": [{\"b\": \"" + t::num(b0) + "*(1 + abs(sin(" + t::num(w2) + "*t)))\", \"alpha\": " +
         std::to_string(alpha) + ", \"tau\": \"" + t::num(tm) + "*sin(" + t::num(w3) + "*t)^2\", \"c\": \"" +
         t::num(c0) + "*(1 + abs(cos(" + t::num(w2) + "*t)))\", \"beta\": " + std::to_string(beta) +
         ", \"v\": \"1\", \"harvest\": \"" + t::num(h0) + "*sin(" + t::num(w2) + "*t)^2*abs(x)/(10 + abs(x))\", " +
         "\"harvest_lipschitz\": " + t::num(h0 / 10.0) + ", \"sigma\": \"" + t::num(sm) + "*cos(" + t::num(w3) +
         "*t)^2\"}], " + "\"impulses\": {\"t0\": 0, \"period_count\": 2, \"period_length\": " + t::num(theta) +
         ", \"offsets\": [" + t::num(o1) + ", " + t::num(o2) + "], \"gamma\": [" + t::num(g1) + ", " + t::num(g2) +
         "], \"delta\": [" + t::num(d1) + ", " + t::num(d2) + "]}, " + "\"declared_bounds\": {\"a\": [" +
         t::num(a0) + ", " + t::num(a0 + a1) + "], \"b1\": [" + t::num(b0) + ", " + t::num(2 * b0) +
         "], \"c1\": [" + t::num(c0) + ", " + t::num(2 * c0) + "], \"tau1\": [0, " + t::num(tm) +
         "], \"sigma1\": [0, " + t::num(sm) + "]}}";
}

void constants(Outcome& o) {
  const auto r = analyze::analyze(cases::load("example56"));
  near("M1", r.M1, 2.1736, 1e-3, o);
  near("K*", r.terms.at(0).K_star, 2.0 * r.M1, 2e-3, o);
  near("G*", r.terms.at(0).G_star, 2.0 * r.M1, 2e-3, o);
  near("existence_lhs", r.existence_lhs, 0.8956, 1e-3, o);
  near("attractivity_lhs", r.attractivity_lhs, 0.8956, 1e-3, o);
  o.require(r.gamma.gamma_max_product == 2.0 && r.gamma.gamma_min_product == 0.5 && r.A == 2.0 && r.B == 0.5,
            "Gamma_M=" + fmt(r.gamma.gamma_max_product) + " Gamma_L=" + fmt(r.gamma.gamma_min_product) +
                " A=" + fmt(r.A) + " B=" + fmt(r.B) + " (2, 0.5, 2, 0.5 exactly)");
}

void lower_bound(Outcome& o) {
  const auto r = analyze::analyze(cases::load("example56"));
  near("M2", r.M2, 0.0027, 5e-4, o);
  o.require(r.M2_global < 0.0 && r.M2_sign_disagrees,
            "global-range M2=" + fmt(r.M2_global) + " < 0 and flagged");
}

void counterexample(Outcome& o) {
  const ModelSpec m = cases::load("example1");
  const auto r = analyze::analyze(m);
  o.require(!r.existence_ok, "existence verdict false");
  const double e1 = std::exp(-1.0);
  for (double x0 : {0.5, 1.0, 5.0, 50.0}) {
    const auto traj = sim::integrate(m, InitialHistory::constant(x0), 10.0, 1e-3);
    double err = 0.0;
    for (int n = 0; n <= 10; ++n) {
      const double exact = std::exp(-n) * x0 - e1 * (1.0 - std::exp(-n)) / (1.0 - e1);
      err = std::max(err, std::fabs(traj.evaluate_at(n) - exact));
    }
    o.require(err < 1e-8, "x0=" + fmt(x0) + " closed-form error " + fmt(err, 3) + " < 1e-8");
    double worst = -std::numeric_limits<double>::infinity();
    const auto& ts = traj.times();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i] < 2.0) continue;
      worst = std::max(worst, traj.right_values()[i]);
      worst = std::max(worst, traj.left_values()[i]);
    }
    o.require(worst < 0.0, "x0=" + fmt(x0) + " sup_{t>=2} x = " + fmt(worst) + " < 0");
  }
}

struct FixpointRun {
  ModelSpec model;
  analyze::AnalysisReport report;
  fixpoint::FixpointResult result;
};

const FixpointRun& worked_fixpoint() {
  static const FixpointRun run = [] {
    ModelSpec model = cases::load("example56");
    auto report = analyze::analyze(model);
    fixpoint::FixpointOptions opt;
    opt.h_grid = 0.01;
    opt.tol = 1e-6;
    auto result = fixpoint::iterate_to_fixed_point(model, report, opt);
    return FixpointRun{std::move(model), std::move(report), std::move(result)};
  }();
  return run;
}

void fixed_point(Outcome& o) {
  const auto& f = worked_fixpoint();
  const auto& res = f.result.residuals;
  o.require(f.result.converged && res.back() < 1e-6,
            "converged in " + std::to_string(f.result.iterations) + " iterations, final residual " + fmt(res.back(), 3));
  double worst = 0.0;
  for (std::size_t n = 2; n < res.size(); ++n) worst = std::max(worst, res[n] / res[n - 1]);
  o.require(worst <= 0.95, "max residual ratio (n>=2) " + fmt(worst) + " <= 0.95");
  o.require(f.result.iterate_min >= f.report.M2 - 1e-6 && f.result.iterate_max <= f.report.M1 + 1e-6,
            "iterates in [" + fmt(f.result.iterate_min) + ", " + fmt(f.result.iterate_max) + "] within [M2, M1] +/- 1e-6");
}

void fixed_point_solves(Outcome& o) {
  const auto& f = worked_fixpoint();
  const auto& phi = f.result.phi;
  InitialHistory history;
  history.alpha = 0.0;
  history.xi = [&phi](double s) { return phi(s, sim::Side::left); };
  history.description = "fixed point";
  const auto traj = sim::integrate(f.model, history, 10.0, 0.01);
  double err = 0.0;
  const auto& ts = traj.times();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] > 10.0) break;
    err = std::max(err, std::fabs(traj.left_values()[i] - phi(ts[i], sim::Side::left)));
    err = std::max(err, std::fabs(traj.right_values()[i] - phi(ts[i], sim::Side::right)));
  }
  o.require(err < 5e-3, "sup |x - phi*| on [0,10] = " + fmt(err, 3) + " < 5e-3");
}

void attractivity(Outcome& o) {
  const ModelSpec m = cases::load("example56");
  const auto r = analyze::analyze(m);
  const auto p = halanay::from_report(r);
  o.require(p.R == 5.0 && p.tau == 1.0 && p.c == 2.0, "R=5, tau=1, c=2");
  const double lambda = halanay::solve_rate(p);
  const std::vector<double> starts{0.3, 0.8, 1.5, 2.5};
  std::vector<sim::Trajectory> trajs;
  for (double x0 : starts) trajs.push_back(sim::integrate(m, InitialHistory::constant(x0), 30.0, 0.01));
  double spread = 0.0, min_fit = std::numeric_limits<double>::infinity(), excess = -1.0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    for (std::size_t j = i + 1; j < trajs.size(); ++j) {
      spread = std::max(spread, std::fabs(trajs[i].evaluate_at(30.0) - trajs[j].evaluate_at(30.0)));
      const auto fit = halanay::fit_empirical_rate(sim::pairwise_gap(trajs[i], trajs[j], 0.0, 30.0), {r.max_delay, 1e-10});
      min_fit = std::min(min_fit, fit.lambda);
      excess = std::max(excess, envelope_excess(p, std::fabs(starts[i] - starts[j]), m.schedule, 0.0,
                                                gaps(trajs[i], trajs[j])));
    }
  }
  o.require(spread < 1e-3, "pairwise spread at t=30 " + fmt(spread, 3) + " < 1e-3");
  o.require(min_fit >= 0.9 * lambda, "lambda_emp=" + fmt(min_fit) + " >= 0.9*lambda*=" + fmt(0.9 * lambda));
  o.require(excess <= 1e-9, "max(gap - envelope)=" + fmt(excess, 3) + " <= 1e-9");
}

void cauchy_suite(Outcome& o) {
  auto g = t::rng(2024);
  std::size_t bound_bad = 0, semigroup_bad = 0, oracle_bad = 0, pairs = 0;
  for (int n = 0; n < 5; ++n) {
    const ModelSpec m = t::model_from(t::random_linear_config(g, false));
    const auto ext = cauchy::gamma_extrema(m.schedule);
    const cauchy::CauchyMatrix H(m);
    const double h = std::min(0.01, m.schedule.min_gap() / 4.0);
    for (int block = 0; block < 50; ++block) {
      const double s = t::uniform(g, -10.0, 10.0);
      const auto traj = sim::integrate(m, InitialHistory::constant(1.0, s), s + 20.0, h);
      for (int r = 0; r < 20; ++r, ++pairs) {
        const double tt = s + t::uniform(g, 0.0, 20.0);
        const double v = H(tt, s);
        const auto env = cauchy::two_sided_bound(m, ext, tt, s);
        if (v < env.lower * (1 - 1e-12) || v > env.upper * (1 + 1e-12)) ++bound_bad;
        const double mid = t::uniform(g, s, tt);
        if (std::fabs(v - H(tt, mid) * H(mid, s)) > 1e-8 * v) ++semigroup_bad;
        // RK4 on y' = -a y loses (h a)^5 / 120 per step, relative.
        const double steps = (tt - s) / h;
        const double tol = std::max(1e-7, 2.0 * steps * std::pow(h * m.bounds.a.hi, 5) / 120.0);
        if (std::fabs(traj.evaluate_at(tt) - v) > tol * v) ++oracle_bad;
      }
    }
  }
  o.require(bound_bad == 0, "two-sided bound " + std::to_string(pairs - bound_bad) + "/" + std::to_string(pairs));
  o.require(semigroup_bad == 0, "semigroup " + std::to_string(pairs - semigroup_bad) + "/" + std::to_string(pairs));
  o.require(oracle_bad == 0, "linear simulation " + std::to_string(pairs - oracle_bad) + "/" + std::to_string(pairs));

  int sum_bad = 0, shift_bad = 0;
  for (int n = 0; n < 100; ++n) {
    const ModelSpec m = t::model_from(t::random_linear_config(g));
    const auto& s = m.schedule;
    const double rate = t::uniform(g, 0.05, 5.0);
    const double at = t::uniform(g, -5.0, 5.0);
    double sum = 0.0;
    for (std::int64_t k = s.first_after(at) - 1;; --k) {
      if (s.time(k) >= at) continue;
      const double term = std::exp(-rate * (at - s.time(k)));
      sum += term;
      if (term < 1e-16) break;
    }
    if (sum > cauchy::geometric_impulse_bound(rate, s.min_gap()) * (1 + 1e-12)) ++sum_bad;
    const std::int64_t P = s.period_count();
    for (int r = 0; r < 10; ++r) {
      const std::int64_t q = std::uniform_int_distribution<std::int64_t>(-50, 50)(g);
      const std::int64_t p = q + std::uniform_int_distribution<std::int64_t>(0, 20)(g);
      if (cauchy::gamma_product(s, q + P, p + P) != cauchy::gamma_product(s, q, p)) ++shift_bad;
    }
  }
  o.require(sum_bad == 0, "geometric sums " + std::to_string(100 - sum_bad) + "/100 schedules");
  o.require(shift_bad == 0, "exact shift identity, 1000 index pairs on 100 schedules");
}

void halanay_suite(Outcome& o) {
  auto g = t::rng(99);
  double undelayed = 0.0;
  for (int n = 0; n < 200; ++n) {
    const double S = t::uniform(g, 0.1, 3.0), c = t::uniform(g, 1.0, 3.0);
    const halanay::HalanayProblem p{S * c + t::uniform(g, 0.01, 5.0), S, 0.0, c};
    undelayed = std::max(undelayed, std::fabs(halanay::solve_rate(p) - (p.R - p.S * p.c)));
  }
  o.require(undelayed <= 1e-12, "tau=0 max |lambda - (R - Sc)| " + fmt(undelayed, 3) + " <= 1e-12");

  double residual = 0.0;
  int not_maximal = 0;
  for (int n = 0; n < 1000; ++n) {
    const double S = t::uniform(g, 0.01, 3.0), c = t::uniform(g, 1.0, 3.0);
    const halanay::HalanayProblem p{S * c * t::uniform(g, 1.001, 5.0), S, t::uniform(g, 0.0, 3.0), c};
    const double lambda = halanay::solve_rate(p);
    residual = std::max(residual, std::fabs(halanay::rate_residual(p, lambda)));
    if (!(halanay::rate_residual(p, lambda + 1e-6) > 0.0)) ++not_maximal;
  }
  o.require(residual <= 1e-10 && not_maximal == 0,
            "1000 random roots, max |g| " + fmt(residual, 3) + " <= 1e-10, g(lambda+1e-6) > 0");

  int accepted = 0;
  for (int n = 0; n < 200; ++n) {
    const double S = t::uniform(g, 0.1, 3.0), c = t::uniform(g, 1.0, 3.0);
    const double R = n == 0 ? S * c : S * c * t::uniform(g, 0.1, 1.0);
    try {
      halanay::solve_rate({R, S, t::uniform(g, 0.0, 2.0), c});
      ++accepted;
    } catch (const AssumptionError&) {
    }
  }
  o.require(accepted == 0, "infeasible instances rejected (" + std::to_string(200 - accepted) + "/200)");

  int models = 0, draws = 0;
  double excess = -1.0;
  while (models < 20 && draws < 400) {
    ++draws;
    const ModelSpec m = t::model_from(random_feasible_config(g));
    const auto r = analyze::analyze(m);
    if (!r.existence_ok || !r.attractivity_ok || !r.delay_vs_eta_ok) continue;
    const auto p = halanay::from_report(r);
    if (!p.feasible()) continue;
    ++models;
    const double x1 = t::uniform(g, r.M2, r.M1), x2 = t::uniform(g, r.M2, r.M1);
    const double h = std::min(0.01, m.schedule.min_gap() / 4.0);
    const auto a = sim::integrate(m, InitialHistory::constant(x1), 15.0, h);
    const auto b = sim::integrate(m, InitialHistory::constant(x2), 15.0, h);
    excess = std::max(excess, envelope_excess(p, std::fabs(x1 - x2), m.schedule, 0.0, gaps(a, b)));
  }
  o.require(models == 20, std::to_string(models) + " random feasible models simulated");
  o.require(excess <= 1e-9, "max(gap - envelope)=" + fmt(excess, 3) + " <= 1e-9");
}

}  // namespace

int main() {
  criterion(1, 5.0, constants);
  criterion(2, 5.0, lower_bound);
  criterion(3, 10.0, counterexample);
  criterion(4, 300.0, fixed_point);
  criterion(5, 60.0, fixed_point_solves);
  criterion(6, 60.0, attractivity);
  criterion(7, 60.0, cauchy_suite);
  criterion(8, 120.0, halanay_suite);
  std::cout << (failures == 0 ? "PASS" : "FAIL") << " acceptance: " << failures << " of 8 criteria failed" << std::endl;
  return failures == 0 ? 0 : 1;
}
