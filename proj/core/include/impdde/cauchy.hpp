#pragma once

#include <cstdint>

#include "impdde/model.hpp"

namespace impdde::cauchy {

// prod_{i=q}^{p} (1 + gamma_i), p >= q. Uses whole periods of the pattern,
// so the cost is O(P) regardless of p - q.
double gamma_product(const ImpulseSchedule& schedule, std::int64_t q, std::int64_t p);

struct GammaExtrema {
  double gamma_max_product = 1.0;  // Gamma_M
  double gamma_min_product = 1.0;  // Gamma_L
  double gamma_min = 0.0;          // gamma_L
  double period_product = 1.0;     // pi_0

  double A() const noexcept { return gamma_max_product > 1.0 ? gamma_max_product : 1.0; }
  double B() const noexcept { return gamma_min_product < 1.0 ? gamma_min_product : 1.0; }
};

// Throws AssumptionError unless the product over one pattern period is 1
// (otherwise Gamma_M is infinite or Gamma_L is zero).
GammaExtrema gamma_extrema(const ImpulseSchedule& schedule);

// Cauchy function H(t, s) of y' = -a(t) y, Delta y(t_k) = gamma_k y(t_k^-):
//   H(t, s) = prod_{s <= t_k < t} (1 + gamma_k) * exp(-int_s^t a).
// An impulse at s itself is counted (when s < t); one at t is not.
class CauchyMatrix {
 public:
  explicit CauchyMatrix(const ModelSpec& model, double rel_tol = 1e-10);

  double operator()(double t, double s) const;

  // int_s^t a(r) dr, adaptive Simpson split at impulse instants.
  double integral_a(double s, double t) const;

  // Product of (1 + gamma_k) over s <= t_k < t.
  double jump_factor(double t, double s) const;

 private:
  const ModelSpec* model_;
  double rel_tol_;
};

struct Envelope {
  double lower = 0.0;
  double upper = 0.0;
};

// B e^{-a_M (t-s)} <= H(t, s) <= A e^{-a_L (t-s)}.
Envelope two_sided_bound(const ModelSpec& model, const GammaExtrema& g, double t, double s);

// Diagnostic constant M used for the almost-periodicity estimate of H:
// max{2/a_L, Gamma_M [2/a_L + (1 + gamma_L)^{-1} (1 + 2/(a_L eta))]}.
double shift_constant(double a_lower, const GammaExtrema& g, double eta);

// Upper bound on sum_{t_k < t} e^{-rate (t - t_k)}: 1 / (1 - e^{-rate * eta}).
double geometric_impulse_bound(double rate, double eta);

}  // namespace impdde::cauchy
