#include "impdde/fixpoint.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <thread>

#include "impdde/cauchy.hpp"
#include "impdde/error.hpp"
#include "impdde/quadrature.hpp"

namespace impdde::fixpoint {

namespace {

double power(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

long grid_count(double lo, double hi, double h) {
  return static_cast<long>(std::ceil((hi - lo) / h - 1e-9));
}

// Splits [0, n) into contiguous chunks and runs body(begin, end) on each.
template <class Body>
void parallel_for(std::size_t n, Body body) {
  const std::size_t workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  if (n < 64 || workers == 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::future<void>> jobs;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    jobs.push_back(std::async(std::launch::async, body, begin, std::min(n, begin + chunk)));
  }
  for (auto& j : jobs) j.get();
}

}  // namespace

std::vector<double> build_nodes(const ImpulseSchedule& schedule, double anchor, double h, long j_first, long j_last) {
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(j_last - j_first + 1));
  for (long j = j_first; j <= j_last; ++j) nodes.push_back(anchor + static_cast<double>(j) * h);
  if (schedule.empty()) return nodes;

  const double lo = nodes.front();
  const double hi = nodes.back();
  const double snap = 1e-9 * h;
  std::vector<double> merged;
  merged.reserve(nodes.size() + 16);
  std::size_t i = 0;
  for (const Impulse& imp : schedule.impulses_in(lo - snap - h, hi + snap)) {
    if (imp.t < lo - snap || imp.t > hi + snap) continue;
    while (i < nodes.size() && nodes[i] < imp.t - snap) merged.push_back(nodes[i++]);
    if (i < nodes.size() && std::fabs(nodes[i] - imp.t) <= snap) ++i;
    merged.push_back(imp.t);
  }
  while (i < nodes.size()) merged.push_back(nodes[i++]);
  return merged;
}

GridFunction::GridFunction(const GridSpec& spec, const ImpulseSchedule& schedule) : spec_(spec) {
  if (!(spec.h > 0.0)) throw ConfigError("grid step must be positive");
  if (!(spec.hi > spec.lo)) throw ConfigError("grid window must have hi > lo");
  nodes_ = build_nodes(schedule, spec.lo, spec.h, 0, grid_count(spec.lo, spec.hi, spec.h));
  const std::size_t n = nodes_.size();
  left_.assign(n, 0.0);
  right_.assign(n, 0.0);
  impulse_.assign(n, 0);
  if (!schedule.empty()) {
    const double snap = 1e-9 * spec.h;
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t k = schedule.first_after(nodes_[i] - snap);
      impulse_[i] = std::fabs(schedule.time(k) - nodes_[i]) <= snap ? 1 : 0;
    }
  }
  segment_start_.assign(n, 0);
  segment_end_.assign(n, n - 1);
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (impulse_[i]) start = i;
    segment_start_[i] = start;
  }
  std::size_t end = n - 1;
  for (std::size_t i = n; i-- > 0;) {
    segment_end_[i] = end;
    if (impulse_[i]) end = i;
  }
}

GridFunction GridFunction::from_function(const GridSpec& spec, const ImpulseSchedule& schedule,
                                         const std::function<double(double)>& f) {
  GridFunction g(spec, schedule);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = f(g.nodes_[i]);
    g.set(i, v, v);
  }
  return g;
}

double GridFunction::operator()(double t, Side side) const {
  const std::size_t n = nodes_.size();
  if (t <= nodes_.front()) return t < nodes_.front() || side == Side::left ? left_.front() : right_.front();
  if (t >= nodes_.back()) return t > nodes_.back() || side == Side::right ? right_.back() : left_.back();

  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (nodes_[i] == t) return side == Side::left ? left_[i] : right_[i];

  // Cell [i, i+1] lies in the continuity segment [s0, s1].
  const std::size_t s0 = segment_start_[i];
  const std::size_t s1 = std::min(segment_end_[i], n - 1);
  std::size_t first = i > s0 ? i - 1 : s0;
  std::size_t last = first + 3;
  if (last > s1) {
    last = s1;
    first = s1 >= s0 + 3 ? s1 - 3 : s0;
  }

  double value = 0.0;
  for (std::size_t j = first; j <= last; ++j) {
    double w = 1.0;
    for (std::size_t m = first; m <= last; ++m) {
      if (m != j) w *= (t - nodes_[m]) / (nodes_[j] - nodes_[m]);
    }
    value += w * node_value(j, s0);
  }
  return value;
}

double GridFunction::distance(const GridFunction& other) const {
  if (other.nodes_ != nodes_) throw ConfigError("grid functions live on different grids");
  double d = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    d = std::max(d, std::fabs(left_[i] - other.left_[i]));
    if (impulse_[i]) d = std::max(d, std::fabs(right_[i] - other.right_[i]));
  }
  return d;
}

double GridFunction::min_value() const {
  double m = *std::min_element(left_.begin(), left_.end());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (impulse_[i]) m = std::min(m, right_[i]);
  }
  return m;
}

double GridFunction::max_value() const {
  double m = *std::max_element(left_.begin(), left_.end());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (impulse_[i]) m = std::max(m, right_[i]);
  }
  return m;
}

double truncation_window(const ModelSpec& model, const analyze::AnalysisReport& report, double tol) {
  if (!(tol > 0.0)) throw ConfigError("truncation tolerance must be positive");
  double sum = 0.0;
  for (const analyze::TermReport& t : report.terms) sum += t.b_M + t.c_M + t.H_M_global;
  double tail = sum / report.a_L;
  if (!model.schedule.empty()) tail += report.delta_abs_max / (1.0 - std::exp(-report.a_L * report.eta));
  const double scale = report.A * tail;
  if (!(scale > tol)) return 0.0;
  return std::log(scale / tol) / report.a_L;
}

IntegralOperator::IntegralOperator(const ModelSpec& model, const GridSpec& out, double W)
    : model_(&model), out_(out), W_(W) {
  if (!(W >= 0.0)) throw ConfigError("truncation window must be nonnegative");
  const ImpulseSchedule& schedule = model.schedule;
  const double h = out.h;
  const long below = static_cast<long>(std::ceil(W / h - 1e-9)) + 1;
  mesh_ = build_nodes(schedule, out.lo, h, -below, grid_count(out.lo, out.hi, h));

  const std::size_t n = mesh_.size();
  mesh_impulse_.assign(n, 0);
  mesh_gamma_.assign(n, 0.0);
  mesh_delta_.assign(n, 0.0);
  if (!schedule.empty()) {
    const double snap = 1e-9 * h;
    for (std::size_t q = 0; q < n; ++q) {
      const std::int64_t k = schedule.first_after(mesh_[q] - snap);
      if (std::fabs(schedule.time(k) - mesh_[q]) <= snap) {
        mesh_impulse_[q] = 1;
        mesh_gamma_[q] = schedule.gamma(k);
        mesh_delta_[q] = schedule.delta(k);
      }
    }
  }

  // Cumulative int a over the mesh; cells never straddle impulses, so each is smooth.
  const cauchy::CauchyMatrix cm(model);
  acum_.assign(n, 0.0);
  acum_mid_.assign(n, 0.0);
  for (std::size_t q = 0; q + 1 < n; ++q) {
    const double mid = 0.5 * (mesh_[q] + mesh_[q + 1]);
    acum_mid_[q] = acum_[q] + cm.integral_a(mesh_[q], mid);
    acum_[q + 1] = acum_mid_[q] + cm.integral_a(mid, mesh_[q + 1]);
  }

  const std::size_t m = model.terms.size();
  for (const DelayTerm& term : model.terms) harvest_active_.push_back(term.harvest.is_zero() ? 0 : 1);
  coeff_node_.assign(n, std::vector<Coeffs>(m));
  coeff_mid_.assign(n, std::vector<Coeffs>(m));
  for (std::size_t q = 0; q < n; ++q) {
    const double mid = q + 1 < n ? 0.5 * (mesh_[q] + mesh_[q + 1]) : mesh_[q];
    for (std::size_t i = 0; i < m; ++i) {
      const DelayTerm& term = model.terms[i];
      coeff_node_[q][i] = {term.b(mesh_[q]), term.c(mesh_[q]), term.tau(mesh_[q]), term.sigma(mesh_[q])};
      coeff_mid_[q][i] = {term.b(mid), term.c(mid), term.tau(mid), term.sigma(mid)};
    }
  }

  // Locate output nodes in the mesh and the start of each window.
  const std::vector<double> out_nodes = build_nodes(schedule, out.lo, h, 0, grid_count(out.lo, out.hi, h));
  for (double t : out_nodes) {
    const auto it = std::lower_bound(mesh_.begin(), mesh_.end(), t);
    const std::size_t qi = static_cast<std::size_t>(it - mesh_.begin());
    out_index_.push_back(qi);
    const double lower = t - W;
    auto lo_it = std::upper_bound(mesh_.begin(), mesh_.end(), lower + 1e-9 * h);
    std::size_t ql = lo_it == mesh_.begin() ? 0 : static_cast<std::size_t>(lo_it - mesh_.begin()) - 1;
    lower_index_.push_back(std::min(ql, qi));
  }
}

double IntegralOperator::integrand(const GridFunction& phi, double s, std::size_t q, bool midpoint) const {
  const ModelSpec& model = *model_;
  const auto& coeffs = midpoint ? coeff_mid_[q] : coeff_node_[q];
  const double h = out_.h;
  double g = 0.0;
  for (std::size_t i = 0; i < model.terms.size(); ++i) {
    const DelayTerm& term = model.terms[i];
    const Coeffs& k = coeffs[i];
    if (k.b != 0.0) g += k.b / (1.0 + power(phi(s - k.tau, Side::right), term.alpha));
    if (k.c != 0.0) {
      // int_0^T v(r) / (1 + phi^beta(s - r)) dr in u = s - r, split at impulses.
      const double lo = s - model.T;
      std::vector<double> cuts{lo};
      for (const Impulse& imp : model.schedule.impulses_in(lo, s)) {
        if (imp.t < s) cuts.push_back(imp.t);
      }
      cuts.push_back(s);
      double inner = 0.0;
      for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double a = cuts[p];
        const double b = cuts[p + 1];
        if (b <= a) continue;
        const std::size_t panels = quad::panels_for(a, b, h);
        const double w = (b - a) / static_cast<double>(panels);
        auto f = [&](double u, Side side) { return term.v(s - u) / (1.0 + power(phi(u, side), term.beta)); };
        double sum = f(a, Side::right) + f(b, Side::left);
        for (std::size_t j = 0; j < panels; ++j) {
          const double u = a + w * static_cast<double>(j);
          sum += 4.0 * f(u + 0.5 * w, Side::left);
          if (j > 0) sum += 2.0 * f(u, Side::left);
        }
        inner += w / 6.0 * sum;
      }
      g += k.c * inner;
    }
    if (harvest_active_[i]) {
      g -= term.harvest(s, phi(s - k.sigma, Side::right));
    }
  }
  return g;
}

GridFunction IntegralOperator::apply(const GridFunction& phi) const {
  const std::size_t n = mesh_.size();
  const std::size_t first_needed = lower_index_.empty() ? 0 : *std::min_element(lower_index_.begin(), lower_index_.end());
  std::vector<double> g_node(n, 0.0), g_mid(n, 0.0);
  parallel_for(n - first_needed, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const std::size_t q = first_needed + r;
      g_node[q] = integrand(phi, mesh_[q], q, false);
      if (q + 1 < n) g_mid[q] = integrand(phi, 0.5 * (mesh_[q] + mesh_[q + 1]), q, true);
    }
  });

  GridFunction out(out_, model_->schedule);
  if (out.size() != out_index_.size()) throw NumericalError("output grid does not match the quadrature mesh");
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t o = begin; o < end; ++o) {
      const std::size_t qi = out_index_[o];
      const std::size_t ql = lower_index_[o];
      const double at = acum_[qi];
      double jump = 1.0;
      double integral = 0.0;
      double impulses = 0.0;
      for (std::size_t c = qi; c-- > ql;) {
        const double w = mesh_[c + 1] - mesh_[c];
        const double e0 = std::exp(acum_[c] - at);
        const double em = std::exp(acum_mid_[c] - at);
        const double e1 = std::exp(acum_[c + 1] - at);
        integral += w / 6.0 * jump * (e0 * g_node[c] + 4.0 * em * g_mid[c] + e1 * g_node[c + 1]);
        if (mesh_impulse_[c]) {
          // H(t, t_k^+) excludes the jump at t_k itself.
          impulses += jump * e0 * mesh_delta_[c];
          jump *= 1.0 + mesh_gamma_[c];
        }
      }
      const double left = integral + impulses;
      if (!std::isfinite(left)) {
        throw NumericalError("operator value became non-finite at t = " + std::to_string(mesh_[qi]));
      }
      const double right = mesh_impulse_[qi] ? (1.0 + mesh_gamma_[qi]) * left + mesh_delta_[qi] : left;
      out.set(o, left, right);
    }
  });
  return out;
}

GridFunction apply_F(const ModelSpec& model, const analyze::AnalysisReport& report, const GridFunction& phi,
                     double W, double out_lo, double out_hi) {
  const double needed = out_lo - W - report.max_delay;
  if (phi.lo() > needed + 1e-9 * phi.step()) {
    throw ConfigError("window underflow: phi starts at " + std::to_string(phi.lo()) + " but the operator needs " +
                      std::to_string(needed));
  }
  const IntegralOperator op(model, GridSpec{out_lo, out_hi, phi.step()}, W);
  return op.apply(phi);
}

FixpointResult iterate_to_fixed_point(const ModelSpec& model, const analyze::AnalysisReport& report,
                                      const FixpointOptions& options) {
  if (!report.existence_ok) {
    throw AssumptionError("fixed-point iteration needs the existence condition (M2 > 0 and contraction lhs = " +
                          std::to_string(report.existence_lhs) + " < 1)");
  }
  if (!(options.tol > 0.0) || !(options.h_grid > 0.0) || options.max_iterations < 1) {
    throw ConfigError("fixpoint options: tol, h_grid and max_iterations must be positive");
  }
  if (!(options.report_hi > options.report_lo)) throw ConfigError("fixpoint report window is empty");
  if (options.margin_factor < 1.0) throw ConfigError("margin_factor must be at least 1");

  const double W = truncation_window(model, report, options.truncation_tol);
  const double margin = options.margin_factor * (W + report.max_delay);
  const GridSpec spec{options.report_lo - margin, options.report_hi, options.h_grid};
  const IntegralOperator op(model, spec, W);

  const double start = 0.5 * (report.M1 + report.M2);
  GridFunction phi = GridFunction::from_function(spec, model.schedule, [start](double) { return start; });
  FixpointResult result{phi, {}, 0, W, false, start, start};
  for (int n = 0; n < options.max_iterations; ++n) {
    GridFunction next = op.apply(phi);
    const double r = next.distance(phi);
    result.residuals.push_back(r);
    result.iterate_min = std::min(result.iterate_min, next.min_value());
    result.iterate_max = std::max(result.iterate_max, next.max_value());
    phi = std::move(next);
    result.iterations = n + 1;
    if (r < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.phi = std::move(phi);
  if (!result.converged) {
    std::string tail;
    const std::size_t k = result.residuals.size();
    for (std::size_t i = k >= 5 ? k - 5 : 0; i < k; ++i) tail += " " + std::to_string(result.residuals[i]);
    throw NumericalError("fixed-point iteration did not converge in " + std::to_string(options.max_iterations) +
                         " iterations; last residuals:" + tail);
  }
  return result;
}

}  // namespace impdde::fixpoint
