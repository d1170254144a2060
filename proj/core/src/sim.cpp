#include "impdde/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "impdde/error.hpp"
#include "impdde/quadrature.hpp"

namespace impdde::sim {

namespace {

double hermite(double t0, double x0, double m0, double t1, double x1, double m1, double t) {
  const double h = t1 - t0;
  const double u = (t - t0) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * x0 + (u3 - 2 * u2 + u) * h * m0 + (-2 * u3 + 3 * u2) * x1 + (u3 - u2) * h * m1;
}

double power(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

}  // namespace

double Trajectory::stored(double t, Side side) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto i = static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
  if (times_[i] == t) return side == Side::left ? left_[i] : right_[i];
  return hermite(times_[i], right_[i], slope_right_[i], times_[i + 1], left_[i + 1], slope_left_[i + 1], t);
}

double Trajectory::evaluate_at(double t, Side side) const {
  const double slack = 1e-9 * std::max(1.0, max_delay_);
  if (!(t >= history_start() - slack) || !(t <= t_end())) {
    throw ConfigError("evaluate_at: t = " + std::to_string(t) + " lies outside [" + std::to_string(history_start()) +
                      ", " + std::to_string(t_end()) + "]");
  }
  if (t < alpha()) return history_.xi(t);
  return stored(t, side);
}

// State needed to resolve x(arg) while a step is in flight: the cell start
// (t_c, x_c^+, slope) and the stage point (t_s, y_s) currently evaluated.
struct Stage {
  double t_c, x_c, f_c;
  double t_s, y_s;
};

class Integrator {
 public:
  Integrator(const ModelSpec& model, const InitialHistory& history, double h) : model_(model) {
    for (const DelayTerm& term : model.terms) {
      active_.push_back({!term.b.is_zero(), !term.c.is_zero(), !term.harvest.is_zero()});
    }
    traj_.history_ = history;
    traj_.max_delay_ = model.max_delay();
    traj_.step_ = h;
  }

  Trajectory run(double t_end) {
    const ImpulseSchedule& schedule = model_.schedule;
    const double alpha = traj_.history_.alpha;
    const double h = traj_.step_;
    const double snap = 1e-9 * h;

    // Node at alpha; an impulse placed exactly there fires immediately.
    double x_left = traj_.history_.xi(alpha);
    std::int64_t next_k = 0;
    bool at_impulse = false;
    if (!schedule.empty()) {
      next_k = schedule.first_after(alpha);
      if (std::fabs(schedule.time(next_k - 1) - alpha) <= snap) {
        --next_k;
        at_impulse = true;
      }
    }
    push_node(alpha, x_left, 0.0);
    if (at_impulse) {
      apply_jump(next_k, alpha);
      ++next_k;
    } else {
      const Stage st{alpha, x_left, 0.0, alpha, x_left};
      traj_.slope_right_.back() = traj_.slope_left_.back() = rhs(alpha, x_left, st);
    }

    std::int64_t j = 1;
    double t_c = alpha;
    while (t_c < t_end) {
      double t_next = alpha + static_cast<double>(j) * h;
      bool impulse = false;
      if (!schedule.empty()) {
        const double t_imp = schedule.time(next_k);
        if (t_imp <= t_next + snap) {
          if (t_imp >= t_next - snap) ++j;
          t_next = t_imp;
          impulse = true;
        } else {
          ++j;
        }
      } else {
        ++j;
      }
      if (t_next > t_end - snap) {
        if (impulse && std::fabs(t_next - t_end) > snap) impulse = false;
        if (!impulse) t_next = t_end;
      }

      step_to(t_c, t_next);
      if (impulse) {
        apply_jump(next_k, t_next);
        ++next_k;
      }
      t_c = t_next;
      if (t_c >= t_end - snap) break;
    }
    return std::move(traj_);
  }

 private:
  void push_node(double t, double x_left, double slope_left) {
    traj_.times_.push_back(t);
    traj_.left_.push_back(x_left);
    traj_.right_.push_back(x_left);
    traj_.slope_left_.push_back(slope_left);
    traj_.slope_right_.push_back(slope_left);
    traj_.impulse_.push_back(0);
  }

  void apply_jump(std::int64_t k, double t) {
    const double g = model_.schedule.gamma(k);
    const double d = model_.schedule.delta(k);
    const double left = traj_.left_.back();
    const double right = (1.0 + g) * left + d;
    traj_.right_.back() = right;
    traj_.impulse_.back() = 1;
    traj_.jumps_.push_back({k, t, left, right, g, d});
    const Stage st{t, right, 0.0, t, right};
    traj_.slope_right_.back() = rhs(t, right, st);
  }

  void step_to(double t_c, double t_next) {
    const double x_c = traj_.right_.back();
    const double k1 = traj_.slope_right_.back();
    const double dt = t_next - t_c;
    const double tm = t_c + 0.5 * dt;

    const double y2 = x_c + 0.5 * dt * k1;
    const double k2 = rhs(tm, y2, {t_c, x_c, k1, tm, y2});
    const double y3 = x_c + 0.5 * dt * k2;
    const double k3 = rhs(tm, y3, {t_c, x_c, k1, tm, y3});
    const double y4 = x_c + dt * k3;
    const double k4 = rhs(t_next, y4, {t_c, x_c, k1, t_next, y4});
    const double x_next = x_c + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(x_next)) {
      throw NumericalError("state became non-finite at t = " + std::to_string(t_next));
    }
    const double slope = rhs(t_next, x_next, {t_c, x_c, k1, t_next, x_next});
    push_node(t_next, x_next, slope);
  }

  double lookup(double arg, Side side, const Stage& st) const {
    if (arg == st.t_s) return st.y_s;
    if (arg > st.t_c) {
      const double d = st.t_s - st.t_c;
      const double u = arg - st.t_c;
      const double curvature = (st.y_s - st.x_c - st.f_c * d) / (d * d);
      return st.x_c + st.f_c * u + curvature * u * u;
    }
    if (arg == st.t_c && side == Side::right) return st.x_c;
    const double alpha = traj_.history_.alpha;
    if (arg < alpha) {
      if (arg < traj_.history_start() - 1e-9 * std::max(1.0, traj_.max_delay_)) {
        throw ConfigError("delay argument " + std::to_string(arg) + " precedes the initial history interval");
      }
      return traj_.history_.xi(arg);
    }
    return traj_.stored(arg, side);
  }

  // int_0^T v(s) / (1 + x^beta(t - s)) ds, in the variable u = t - s, split
  // at impulse instants so that no panel straddles a jump.
  double distributed(const DelayTerm& term, double t, const Stage& st) const {
    const double lo = t - model_.T;
    std::vector<double> cuts{lo};
    for (const Impulse& imp : model_.schedule.impulses_in(lo, t)) {
      if (imp.t < t) cuts.push_back(imp.t);
    }
    cuts.push_back(t);

    double total = 0.0;
    const double h = traj_.step_;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const double a = cuts[p];
      const double b = cuts[p + 1];
      if (b <= a) continue;
      const std::size_t panels = quad::panels_for(a, b, h);
      const double w = (b - a) / static_cast<double>(panels);
      auto g = [&](double u, Side side) {
        const double x = lookup(u, side, st);
        return term.v(t - u) / (1.0 + power(x, term.beta));
      };
      double sum = g(a, Side::right) + g(b, Side::left);
      for (std::size_t i = 0; i < panels; ++i) {
        const double u = a + w * static_cast<double>(i);
        sum += 4.0 * g(u + 0.5 * w, Side::left);
        if (i > 0) sum += 2.0 * g(u, Side::left);
      }
      total += w / 6.0 * sum;
    }
    return total;
  }

  double rhs(double t, double x, const Stage& st) const {
    double f = -model_.a(t) * x;
    for (std::size_t i = 0; i < model_.terms.size(); ++i) {
      const DelayTerm& term = model_.terms[i];
      if (active_[i].b) {
        const double xd = lookup(t - term.tau(t), Side::right, st);
        f += term.b(t) / (1.0 + power(xd, term.alpha));
      }
      if (active_[i].c) f += term.c(t) * distributed(term, t, st);
      if (active_[i].harvest) {
        const double xs = lookup(t - term.sigma(t), Side::right, st);
        f -= term.harvest(t, xs);
      }
    }
    if (!std::isfinite(f)) throw NumericalError("right-hand side became non-finite at t = " + std::to_string(t));
    return f;
  }

  struct Active {
    bool b, c, harvest;
  };

  const ModelSpec& model_;
  std::vector<Active> active_;
  Trajectory traj_;
};

Trajectory integrate(const ModelSpec& model, const InitialHistory& history, double t_end, double h) {
  if (!history.xi) throw ConfigError("initial history is not set");
  if (!(t_end > history.alpha)) throw ConfigError("t_end must exceed the start time");
  if (!(h > 0.0)) throw ConfigError("step h must be positive");
  if (!model.schedule.empty() && h > model.schedule.min_gap() / 4.0) {
    throw ConfigError("step h must not exceed eta / 4 = " + std::to_string(model.schedule.min_gap() / 4.0));
  }
  return Integrator(model, history, h).run(t_end);
}

std::vector<std::pair<double, double>> pairwise_gap(const Trajectory& a, const Trajectory& b, double lo, double hi) {
  if (a.times() != b.times()) throw ConfigError("pairwise_gap: trajectories do not share a time grid");
  std::vector<std::pair<double, double>> out;
  const auto& t = a.times();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < lo || t[i] > hi) continue;
    out.emplace_back(t[i], std::fabs(a.left_values()[i] - b.left_values()[i]));
  }
  return out;
}

}  // namespace impdde::sim
