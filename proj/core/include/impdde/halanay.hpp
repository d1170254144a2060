#pragma once

#include <utility>
#include <vector>

#include "impdde/analyze.hpp"
#include "impdde/model.hpp"

namespace impdde::halanay {

// D+ y(t) <= -R y(t) + S sup_{t-tau <= s <= t} y(s) between impulses, with
// c = max_k {(gamma_k + 1)^{-1}, 1}.
struct HalanayProblem {
  double R = 0.0;
  double S = 0.0;
  double tau = 0.0;
  double c = 1.0;

  bool feasible() const noexcept { return S > 0.0 ? c < R / S : R > 0.0; }
};

// Largest lambda with lambda + S c e^{lambda tau} = R, by bisection on
// [0, R] to 1e-12. tau = 0 gives R - S c exactly. Throws AssumptionError when
// c >= R / S.
double solve_rate(const HalanayProblem& p);

// g(lambda) = lambda + S c e^{lambda tau} - R.
double rate_residual(const HalanayProblem& p, double lambda);

struct Envelope {
  double lambda = 0.0;
  double exact = 0.0;       // ybar0 * prod_{T0 < t_k <= t} (gamma_k + 1) * e^{-lambda (t - T0)}
  double simplified = 0.0;  // ybar0 * Gamma_M * e^{-lambda (t - T0)}
  double product = 1.0;
};

Envelope certified_envelope(const HalanayProblem& p, double ybar0, const ImpulseSchedule& schedule, double T0,
                            double t);

// R = a_L, S = sum_i (b_iM K*_i + c_iM G*_i + L_i), tau = max delay,
// c = max{(gamma_L + 1)^{-1}, 1}.
HalanayProblem from_report(const analyze::AnalysisReport& report);

struct FitOptions {
  double window = 0.0;       // window-sup width (usually the max delay)
  double noise_floor = 1e-10;  // the record is cut where the window-sup gap first drops to this
};

struct RateFit {
  double lambda = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
  bool identical = false;  // every gap zero: lambda = +inf
};

// Least-squares slope of ln(window-sup gap) against t over the second half
// of the usable record. Throws NumericalError with fewer than 10 points.
RateFit fit_empirical_rate(const std::vector<std::pair<double, double>>& gaps, const FitOptions& options = {});

}  // namespace impdde::halanay
