#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "impdde/model.hpp"

namespace impdde::sim {

enum class Side { left, right };

struct Jump {
  std::int64_t k = 0;
  double t = 0.0;
  double left = 0.0;
  double right = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

// Piecewise left-continuous solution on [alpha - max_delay, t_end]. Nodes are
// alpha + j*h merged with the impulse instants; every node stores the left
// value x(t^-) = x(t) and the right value (equal unless the node is an
// impulse instant), together with one-sided slopes for cubic Hermite
// interpolation inside cells.
class Trajectory {
 public:
  double alpha() const noexcept { return history_.alpha; }
  double t_end() const noexcept { return times_.back(); }
  double step() const noexcept { return step_; }
  double history_start() const noexcept { return history_.alpha - max_delay_; }

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& left_values() const noexcept { return left_; }
  const std::vector<double>& right_values() const noexcept { return right_; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }
  bool is_impulse_node(std::size_t i) const noexcept { return impulse_[i] != 0; }

  // One-sided value at any t in [alpha - max_delay, t_end]. Before alpha the
  // initial history is returned.
  double evaluate_at(double t, Side side = Side::left) const;

 private:
  friend class Integrator;

  // Value inside the stored range; `t` must satisfy alpha <= t <= t_end.
  double stored(double t, Side side) const;

  InitialHistory history_;
  double max_delay_ = 0.0;
  double step_ = 0.0;
  std::vector<double> times_;
  std::vector<double> left_;
  std::vector<double> right_;
  std::vector<double> slope_left_;
  std::vector<double> slope_right_;
  std::vector<char> impulse_;
  std::vector<Jump> jumps_;
};

// Fixed-step classical RK4 with steps shortened onto impulse instants.
// An impulse placed exactly at alpha acts on xi(alpha) before the first step.
// Requires t_end > alpha and h <= eta / 4.
Trajectory integrate(const ModelSpec& model, const InitialHistory& history, double t_end, double h);

// |x1(t) - x2(t)| (left values) at every shared node with lo <= t <= hi.
std::vector<std::pair<double, double>> pairwise_gap(const Trajectory& a, const Trajectory& b, double lo, double hi);

}  // namespace impdde::sim
