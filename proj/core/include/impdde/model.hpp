#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "impdde/expr.hpp"

namespace impdde {

using expr::Interval;

struct Impulse {
  std::int64_t k = 0;
  double t = 0.0;
  double gamma = 0.0;
  double delta = 0.0;

  friend bool operator==(const Impulse&, const Impulse&) = default;
};

// Bi-infinite impulse sequence with an exactly periodic pattern: for
// k = qP + r (0 <= r < P),
//   t_k = t0 + q*period_length + offsets[r],  gamma_k = gamma[r],  delta_k = delta[r].
// An empty pattern means "no impulses".
class ImpulseSchedule {
 public:
  ImpulseSchedule() = default;
  ImpulseSchedule(double t0, double period_length, std::vector<double> offsets, std::vector<double> gamma,
                  std::vector<double> delta);

  bool empty() const noexcept { return offsets_.empty(); }
  std::int64_t period_count() const noexcept { return static_cast<std::int64_t>(offsets_.size()); }
  double period_length() const noexcept { return period_length_; }
  double t0() const noexcept { return t0_; }
  const std::vector<double>& offsets() const noexcept { return offsets_; }
  const std::vector<double>& gamma_pattern() const noexcept { return gamma_; }
  const std::vector<double>& delta_pattern() const noexcept { return delta_; }

  Impulse impulse(std::int64_t k) const;
  double time(std::int64_t k) const;
  double gamma(std::int64_t k) const;
  double delta(std::int64_t k) const;

  // Smallest k with t_k > s.
  std::int64_t first_after(double s) const;

  // Impulses with s < t_k <= t, ascending.
  std::vector<Impulse> impulses_in(double s, double t) const;

  // eta = inf (t_{k+1} - t_k), eta_bar = sup (t_{k+1} - t_k); +inf when empty.
  double min_gap() const noexcept { return min_gap_; }
  double max_gap() const noexcept { return max_gap_; }

  double gamma_min() const noexcept;
  double delta_min() const noexcept;
  double delta_max() const noexcept;
  double delta_abs_min() const noexcept;
  double delta_abs_max() const noexcept;

  // prod_{r<P} (1 + gamma_r); 1 when empty.
  double period_product() const noexcept;

 private:
  double t0_ = 0.0;
  double period_length_ = 1.0;
  std::vector<double> offsets_;
  std::vector<double> gamma_;
  std::vector<double> delta_;
  double min_gap_ = std::numeric_limits<double>::infinity();
  double max_gap_ = std::numeric_limits<double>::infinity();
};

struct DelayTerm {
  expr::Expression b;        // numerator coefficient b_i(t)
  double alpha = 1.0;        // exponent on the discrete delay
  expr::Expression tau;      // discrete delay tau_i(t) >= 0
  expr::Expression c;        // distributed coefficient c_i(t)
  double beta = 1.0;         // exponent inside the distributed term
  expr::Expression v;        // kernel v_i(s) on [0, T], unit mass
  expr::Expression harvest;  // H_i(t, x) >= 0
  double harvest_lipschitz = 0.0;
  expr::Expression sigma;    // harvest delay sigma_i(t) >= 0
};

struct TermBounds {
  Interval b, c, tau, sigma;
  Interval harvest;  // over t x [0, x_cap]
};

struct CoefficientBounds {
  Interval a;
  std::vector<TermBounds> terms;
  double max_delay = 0.0;  // max over terms of {T, tau_M, sigma_M}
};

// x(s) = xi(s) on [alpha - max_delay, alpha].
struct InitialHistory {
  double alpha = 0.0;
  std::function<double(double)> xi;
  std::string description;

  static InitialHistory constant(double value, double alpha = 0.0);
  static InitialHistory from_expression(const expr::Expression& xi, double alpha = 0.0);
};

struct BoundOptions {
  double t_window = 1000.0;
  std::size_t samples = 1'000'000;
  double x_cap = 1000.0;
  std::size_t x_samples = 17;
  std::size_t kernel_panels = 10'000;
  double kernel_tolerance = 1e-6;
  bool check_lipschitz = true;

  expr::SampleGrid grid(std::optional<Interval> x_range = std::nullopt) const {
    return {t_window, samples, x_range, x_samples};
  }
};

struct ModelSpec {
  expr::Expression a;
  std::vector<DelayTerm> terms;
  double T = 1.0;
  ImpulseSchedule schedule;
  // Keys: "a", and per term i (1-based) "b<i>", "c<i>", "tau<i>", "sigma<i>", "harvest<i>".
  std::map<std::string, Interval> declared_bounds;
  std::optional<InitialHistory> history;

  // Filled by finalize_model().
  CoefficientBounds bounds;
  BoundOptions bound_options;

  double max_delay() const noexcept { return bounds.max_delay; }
};

// Checks every model invariant and fills in coefficient bounds. Sampled
// bounds are replaced by declared ones, which must contain them.
ModelSpec finalize_model(ModelSpec model, const BoundOptions& options = {});

// JSON configuration (see README for the schema).
ModelSpec load_model(std::string_view json_text, const BoundOptions& options = {});
ModelSpec load_model_file(const std::filesystem::path& path, const BoundOptions& options = {});

// Parses "0.5" or an expression in s (e.g. "1 + 0.1*sin(s)").
InitialHistory parse_history(std::string_view text, double alpha = 0.0);

}  // namespace impdde
