#include "impdde/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "impdde/error.hpp"
#include "impdde/quadrature.hpp"

namespace impdde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

template <typename F>
double fold(const std::vector<double>& v, double init, F f) {
  double acc = init;
  for (double x : v) acc = f(acc, x);
  return acc;
}

}  // namespace

ImpulseSchedule::ImpulseSchedule(double t0, double period_length, std::vector<double> offsets,
                                 std::vector<double> gamma, std::vector<double> delta)
    : t0_(t0),
      period_length_(period_length),
      offsets_(std::move(offsets)),
      gamma_(std::move(gamma)),
      delta_(std::move(delta)) {
  if (!std::isfinite(t0_)) throw ConfigError("impulses.t0 must be finite");
  if (gamma_.size() != offsets_.size() || delta_.size() != offsets_.size()) {
    throw ConfigError("impulses: offsets, gamma and delta must have period_count entries");
  }
  if (offsets_.empty()) {
    min_gap_ = max_gap_ = kInf;
    return;
  }
  if (!(period_length_ > 0.0) || !std::isfinite(period_length_)) {
    throw ConfigError("impulses.period_length must be positive");
  }
  for (std::size_t r = 0; r < offsets_.size(); ++r) {
    if (!(offsets_[r] >= 0.0 && offsets_[r] < period_length_)) {
      throw ConfigError("impulses.offsets must lie in [0, period_length)");
    }
    if (r > 0 && !(offsets_[r] > offsets_[r - 1])) throw ConfigError("impulses.offsets must be strictly increasing");
    if (!std::isfinite(gamma_[r]) || !std::isfinite(delta_[r])) throw ConfigError("impulses: non-finite gamma/delta");
    if (!(gamma_[r] > -1.0)) throw AssumptionError("gamma must exceed -1 (got " + std::to_string(gamma_[r]) + ")");
  }
  min_gap_ = kInf;
  max_gap_ = 0.0;
  for (std::size_t r = 0; r < offsets_.size(); ++r) {
    const double next = r + 1 < offsets_.size() ? offsets_[r + 1] : offsets_.front() + period_length_;
    const double gap = next - offsets_[r];
    min_gap_ = std::min(min_gap_, gap);
    max_gap_ = std::max(max_gap_, gap);
  }
}

double ImpulseSchedule::time(std::int64_t k) const {
  const std::int64_t p = period_count();
  const std::int64_t q = floor_div(k, p);
  const auto r = static_cast<std::size_t>(k - q * p);
  return t0_ + static_cast<double>(q) * period_length_ + offsets_[r];
}

double ImpulseSchedule::gamma(std::int64_t k) const {
  const std::int64_t p = period_count();
  return gamma_[static_cast<std::size_t>(k - floor_div(k, p) * p)];
}

double ImpulseSchedule::delta(std::int64_t k) const {
  const std::int64_t p = period_count();
  return delta_[static_cast<std::size_t>(k - floor_div(k, p) * p)];
}

Impulse ImpulseSchedule::impulse(std::int64_t k) const {
  if (empty()) throw ConfigError("schedule has no impulses");
  return {k, time(k), gamma(k), delta(k)};
}

std::int64_t ImpulseSchedule::first_after(double s) const {
  if (empty()) throw ConfigError("schedule has no impulses");
  const std::int64_t p = period_count();
  const auto q = static_cast<std::int64_t>(std::floor((s - t0_) / period_length_));
  // Start one period early to absorb rounding in the floor above.
  std::int64_t k = (q - 1) * p;
  while (time(k) <= s) ++k;
  while (time(k - 1) > s) --k;
  return k;
}

std::vector<Impulse> ImpulseSchedule::impulses_in(double s, double t) const {
  std::vector<Impulse> out;
  if (empty() || !(s < t)) return out;
  for (std::int64_t k = first_after(s);; ++k) {
    const double tk = time(k);
    if (tk > t) break;
    out.push_back({k, tk, gamma(k), delta(k)});
  }
  return out;
}

double ImpulseSchedule::gamma_min() const noexcept {
  return empty() ? 0.0 : fold(gamma_, kInf, [](double a, double b) { return std::min(a, b); });
}
double ImpulseSchedule::delta_min() const noexcept {
  return empty() ? 0.0 : fold(delta_, kInf, [](double a, double b) { return std::min(a, b); });
}
double ImpulseSchedule::delta_max() const noexcept {
  return empty() ? 0.0 : fold(delta_, -kInf, [](double a, double b) { return std::max(a, b); });
}
double ImpulseSchedule::delta_abs_min() const noexcept {
  return empty() ? 0.0 : fold(delta_, kInf, [](double a, double b) { return std::min(a, std::fabs(b)); });
}
double ImpulseSchedule::delta_abs_max() const noexcept {
  return empty() ? 0.0 : fold(delta_, 0.0, [](double a, double b) { return std::max(a, std::fabs(b)); });
}
double ImpulseSchedule::period_product() const noexcept {
  return fold(gamma_, 1.0, [](double a, double g) { return a * (1.0 + g); });
}

InitialHistory InitialHistory::constant(double value, double alpha) {
  if (!(value >= 0.0)) throw ConfigError("initial history must be nonnegative");
  if (!(value > 0.0)) throw ConfigError("initial history must be positive at the start time");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return {alpha, [value](double) { return value; }, buf};
}

InitialHistory InitialHistory::from_expression(const expr::Expression& xi, double alpha) {
  if (xi.uses_state()) throw ConfigError("initial history cannot depend on x");
  if (!(xi(alpha) > 0.0)) throw ConfigError("initial history must be positive at the start time");
  return {alpha, [xi](double s) { return xi(s); }, xi.to_string()};
}

InitialHistory parse_history(std::string_view text, double alpha) {
  return InitialHistory::from_expression(expr::parse(text, expr::Context::kernel), alpha);
}

namespace {

Interval sampled_or_declared(const std::map<std::string, Interval>& declared, const std::string& name,
                             const expr::Expression& e, const expr::SampleGrid& grid) {
  const Interval sampled = expr::estimate_bounds(e, grid);
  auto it = declared.find(name);
  if (it == declared.end()) return sampled;
  const Interval d = it->second;
  if (!(d.lo <= d.hi)) throw ConfigError("declared_bounds." + name + ": inf exceeds sup");
  const double slack = 1e-12 * std::max({1.0, std::fabs(sampled.lo), std::fabs(sampled.hi)});
  if (!(d.lo <= sampled.lo + slack && sampled.hi <= d.hi + slack)) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "declared_bounds.%s = [%.17g, %.17g] does not contain sampled range [%.17g, %.17g]",
                  name.c_str(), d.lo, d.hi, sampled.lo, sampled.hi);
    throw ConfigError(buf);
  }
  return d;
}

void check_lipschitz(const DelayTerm& term, std::size_t index, const BoundOptions& opt) {
  // Geometric x-grid so both the neighbourhood of 0 and the far field are seen.
  std::vector<double> xs{0.0};
  for (double x = 1e-3; x < opt.x_cap; x *= 1.25) xs.push_back(x);
  xs.push_back(opt.x_cap);
  const std::size_t nt = std::min<std::size_t>(opt.samples, 2000);
  const double bound = term.harvest_lipschitz * (1.0 + 1e-9) + 1e-12;
  for (std::size_t j = 0; j < nt; ++j) {
    const double t = opt.t_window * static_cast<double>(j) / static_cast<double>(nt);
    double prev = term.harvest(t, xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double cur = term.harvest(t, xs[i]);
      if (std::fabs(cur - prev) > bound * (xs[i] - xs[i - 1])) {
        throw ConfigError("terms[" + std::to_string(index) + "].harvest_lipschitz is smaller than the sampled " +
                          "Lipschitz ratio of the harvest term");
      }
      prev = cur;
    }
  }
}

}  // namespace

ModelSpec finalize_model(ModelSpec model, const BoundOptions& options) {
  if (!(model.T > 0.0) || !std::isfinite(model.T)) throw ConfigError("T must be positive");
  for (const auto& [name, iv] : model.declared_bounds) {
    bool known = name == "a";
    for (std::size_t i = 1; i <= model.terms.size() && !known; ++i) {
      const std::string n = std::to_string(i);
      known = name == "b" + n || name == "c" + n || name == "tau" + n || name == "sigma" + n || name == "harvest" + n;
    }
    if (!known) throw ConfigError("declared_bounds: unknown coefficient '" + name + "'");
  }

  CoefficientBounds bounds;
  bounds.a = sampled_or_declared(model.declared_bounds, "a", model.a, options.grid());
  if (!(bounds.a.lo > 0.0)) throw AssumptionError("inf a(t) must be positive (a_L > 0)");

  bounds.max_delay = model.T;
  for (std::size_t i = 0; i < model.terms.size(); ++i) {
    const DelayTerm& term = model.terms[i];
    const std::string n = std::to_string(i + 1);
    const std::string path = "terms[" + std::to_string(i) + "]";
    if (!(term.alpha > 0.0) || !(term.beta > 0.0)) throw ConfigError(path + ": alpha and beta must be positive");
    if (!(term.harvest_lipschitz >= 0.0)) throw ConfigError(path + ".harvest_lipschitz must be nonnegative");

    TermBounds tb;
    tb.b = sampled_or_declared(model.declared_bounds, "b" + n, term.b, options.grid());
    tb.c = sampled_or_declared(model.declared_bounds, "c" + n, term.c, options.grid());
    tb.tau = sampled_or_declared(model.declared_bounds, "tau" + n, term.tau, options.grid());
    tb.sigma = sampled_or_declared(model.declared_bounds, "sigma" + n, term.sigma, options.grid());
    tb.harvest = sampled_or_declared(model.declared_bounds, "harvest" + n, term.harvest,
                                     options.grid(Interval{0.0, options.x_cap}));
    if (tb.b.lo < 0.0 || tb.c.lo < 0.0) throw ConfigError(path + ": b and c must be nonnegative");
    if (tb.tau.lo < 0.0 || tb.sigma.lo < 0.0) throw ConfigError(path + ": delays must be nonnegative");
    if (tb.harvest.lo < 0.0) throw ConfigError(path + ".harvest must be nonnegative");

    double kernel_min = std::numeric_limits<double>::infinity();
    const double mass = quad::composite_simpson(
        [&](double s) {
          const double v = term.v(s);
          kernel_min = std::min(kernel_min, v);
          return v;
        },
        0.0, model.T, options.kernel_panels);
    if (kernel_min < 0.0) throw ConfigError(path + ".v must be nonnegative on [0, T]");
    if (std::fabs(mass - 1.0) > options.kernel_tolerance) {
      throw ConfigError(path + ".v must integrate to 1 on [0, T] (got " + std::to_string(mass) + ")");
    }
    if (options.check_lipschitz && !term.harvest.is_zero()) check_lipschitz(term, i, options);

    bounds.max_delay = std::max({bounds.max_delay, tb.tau.hi, tb.sigma.hi});
    bounds.terms.push_back(tb);
  }
  if (!std::isfinite(bounds.max_delay) || !(bounds.max_delay > 0.0)) {
    throw ConfigError("maximal delay must be finite and positive");
  }
  model.bounds = std::move(bounds);
  model.bound_options = options;
  return model;
}

}  // namespace impdde
