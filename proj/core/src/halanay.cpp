#include "impdde/halanay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "impdde/error.hpp"

namespace impdde::halanay {

namespace {

void check(const HalanayProblem& p) {
  if (!(p.R > 0.0) || !(p.S >= 0.0) || !(p.tau >= 0.0) || !(p.c >= 1.0)) {
    throw ConfigError("Halanay problem needs R > 0, S >= 0, tau >= 0 and c >= 1");
  }
  if (!p.feasible()) {
    throw AssumptionError("condition d1 fails: c = " + std::to_string(p.c) + " is not below R/S = " +
                          std::to_string(p.R / p.S));
  }
}

}  // namespace

double rate_residual(const HalanayProblem& p, double lambda) {
  return lambda + p.S * p.c * std::exp(lambda * p.tau) - p.R;
}

double solve_rate(const HalanayProblem& p) {
  check(p);
  if (p.tau == 0.0) return p.R - p.S * p.c;
  double lo = 0.0;
  double hi = p.R;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (rate_residual(p, mid) < 0.0 ? lo : hi) = mid;
  }
  // Take the endpoint with the smaller residual; both are within 1e-12 of the root.
  return std::fabs(rate_residual(p, lo)) <= std::fabs(rate_residual(p, hi)) ? lo : hi;
}

Envelope certified_envelope(const HalanayProblem& p, double ybar0, const ImpulseSchedule& schedule, double T0,
                            double t) {
  if (t < T0) throw ConfigError("envelope needs t >= T0");
  Envelope e;
  e.lambda = solve_rate(p);
  double gamma_max = 1.0;
  if (!schedule.empty()) {
    for (const Impulse& imp : schedule.impulses_in(T0, t)) e.product *= 1.0 + imp.gamma;
    const auto& g = schedule.gamma_pattern();
    const std::size_t P = g.size();
    for (std::size_t q = 0; q < P; ++q) {
      double prod = 1.0;
      for (std::size_t len = 0; len < P; ++len) {
        prod *= 1.0 + g[(q + len) % P];
        gamma_max = std::max(gamma_max, prod);
      }
    }
  }
  const double decay = std::exp(-e.lambda * (t - T0));
  e.exact = ybar0 * e.product * decay;
  e.simplified = ybar0 * gamma_max * decay;
  return e;
}

HalanayProblem from_report(const analyze::AnalysisReport& report) {
  return {report.a_L, report.contraction_sum, report.max_delay, std::max(1.0 / (report.gamma.gamma_min + 1.0), 1.0)};
}

RateFit fit_empirical_rate(const std::vector<std::pair<double, double>>& gaps, const FitOptions& options) {
  RateFit fit;
  if (gaps.empty()) throw NumericalError("rate fit needs at least 10 points, got 0");
  if (std::all_of(gaps.begin(), gaps.end(), [](const auto& g) { return g.second == 0.0; })) {
    fit.lambda = std::numeric_limits<double>::infinity();
    fit.identical = true;
    return fit;
  }

  // Window sup over [t_i, t_i + window] with a monotone deque, kept only
  // where the whole window lies inside the record.
  const std::size_t n = gaps.size();
  const double t_last = gaps.back().first;
  std::vector<std::pair<double, double>> envelope;
  std::deque<std::size_t> dq;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = gaps[i].first;
    if (t + options.window > t_last) break;
    while (j < n && gaps[j].first <= t + options.window) {
      while (!dq.empty() && gaps[dq.back()].second <= gaps[j].second) dq.pop_back();
      dq.push_back(j++);
    }
    while (dq.front() < i) dq.pop_front();
    const double sup = gaps[dq.front()].second;
    if (sup <= options.noise_floor) break;
    envelope.emplace_back(t, sup);
  }
  if (envelope.empty()) throw NumericalError("rate fit needs at least 10 points, got 0");

  const double mid_t = 0.5 * (envelope.front().first + envelope.back().first);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (const auto& [t, g] : envelope) {
    if (t < mid_t) continue;
    const double y = std::log(g);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++m;
  }
  if (m < 10) throw NumericalError("rate fit needs at least 10 points, got " + std::to_string(m));
  const double md = static_cast<double>(m);
  const double slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
  fit.lambda = -slope;
  fit.intercept = (sy - slope * sx) / md;
  fit.points = m;
  return fit;
}

}  // namespace impdde::halanay
