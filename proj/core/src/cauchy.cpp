#include "impdde/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "impdde/error.hpp"
#include "impdde/quadrature.hpp"

namespace impdde::cauchy {

namespace {

std::int64_t first_at_or_after(const ImpulseSchedule& schedule, double x) {
  const std::int64_t k = schedule.first_after(x);
  return schedule.time(k - 1) == x ? k - 1 : k;
}

}  // namespace

double gamma_product(const ImpulseSchedule& schedule, std::int64_t q, std::int64_t p) {
  if (p < q) throw ConfigError("gamma_product needs p >= q");
  if (schedule.empty()) return 1.0;
  const std::int64_t period = schedule.period_count();
  const std::int64_t count = p - q + 1;
  const std::int64_t whole = count / period;
  double value = whole == 0 ? 1.0 : std::pow(schedule.period_product(), static_cast<double>(whole));
  for (std::int64_t k = q + whole * period; k <= p; ++k) value *= 1.0 + schedule.gamma(k);
  return value;
}

GammaExtrema gamma_extrema(const ImpulseSchedule& schedule) {
  GammaExtrema g;
  if (schedule.empty()) return g;
  g.period_product = schedule.period_product();
  g.gamma_min = schedule.gamma_min();
  if (std::fabs(g.period_product - 1.0) > 1e-12) {
    throw AssumptionError("jump products are unbounded: prod over one period of (1 + gamma) = " +
                          std::to_string(g.period_product) + " != 1 (Gamma_M or Gamma_L violates its bound)");
  }
  // With a unit period product every window reduces to one of length
  // 1..P starting inside the first period.
  const auto& gamma = schedule.gamma_pattern();
  const std::size_t period = gamma.size();
  g.gamma_max_product = 0.0;
  g.gamma_min_product = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < period; ++q) {
    double prod = 1.0;
    for (std::size_t len = 0; len < period; ++len) {
      prod *= 1.0 + gamma[(q + len) % period];
      g.gamma_max_product = std::max(g.gamma_max_product, prod);
      g.gamma_min_product = std::min(g.gamma_min_product, prod);
    }
  }
  return g;
}

CauchyMatrix::CauchyMatrix(const ModelSpec& model, double rel_tol) : model_(&model), rel_tol_(rel_tol) {}

double CauchyMatrix::integral_a(double s, double t) const {
  if (s == t) return 0.0;
  if (s > t) return -integral_a(t, s);
  const auto& a = model_->a;
  if (a.is_constant()) return a(0.0) * (t - s);
  double total = 0.0;
  double lo = s;
  for (const Impulse& imp : model_->schedule.impulses_in(s, t)) {
    if (imp.t >= t) break;
    total += quad::adaptive_simpson([&a](double r) { return a(r); }, lo, imp.t, rel_tol_);
    lo = imp.t;
  }
  total += quad::adaptive_simpson([&a](double r) { return a(r); }, lo, t, rel_tol_);
  return total;
}

double CauchyMatrix::jump_factor(double t, double s) const {
  const ImpulseSchedule& schedule = model_->schedule;
  if (schedule.empty() || !(s < t)) return 1.0;
  const std::int64_t first = first_at_or_after(schedule, s);
  const std::int64_t last = first_at_or_after(schedule, t) - 1;
  return last < first ? 1.0 : gamma_product(schedule, first, last);
}

double CauchyMatrix::operator()(double t, double s) const {
  if (s > t) throw ConfigError("Cauchy function needs s <= t");
  if (s == t) return 1.0;
  return jump_factor(t, s) * std::exp(-integral_a(s, t));
}

Envelope two_sided_bound(const ModelSpec& model, const GammaExtrema& g, double t, double s) {
  const double span = t - s;
  return {g.B() * std::exp(-model.bounds.a.hi * span), g.A() * std::exp(-model.bounds.a.lo * span)};
}

double shift_constant(double a_lower, const GammaExtrema& g, double eta) {
  const double inner = 2.0 / a_lower + (1.0 / (1.0 + g.gamma_min)) * (1.0 + 2.0 / (a_lower * eta));
  return std::max(2.0 / a_lower, g.gamma_max_product * inner);
}

double geometric_impulse_bound(double rate, double eta) { return 1.0 / (1.0 - std::exp(-rate * eta)); }

}  // namespace impdde::cauchy
