#include "impdde/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "impdde/error.hpp"
#include "json.hpp"

namespace impdde::analyze {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string(what) + " is not finite");
}

double restricted_harvest_sup(const ModelSpec& model, std::size_t i, double M1) {
  const DelayTerm& term = model.terms[i];
  if (term.harvest.is_zero()) return 0.0;
  const BoundOptions& opt = model.bound_options;
  const Interval sampled = expr::estimate_bounds(term.harvest, opt.grid(Interval{0.0, std::max(M1, 0.0)}));
  // A declared global sup also caps the restricted one.
  return std::min(sampled.hi, model.bounds.terms[i].harvest.hi);
}

}  // namespace

double compute_M1(const ModelSpec& model) {
  const auto g = cauchy::gamma_extrema(model.schedule);
  const double a_L = model.bounds.a.lo;
  const double eta = model.schedule.min_gap();
  double sum = 0.0;
  for (const TermBounds& tb : model.bounds.terms) sum += tb.b.hi + tb.c.hi - tb.harvest.lo;
  const double M1 = g.A() / a_L * sum + g.A() * model.schedule.delta_max() / (1.0 - std::exp(-a_L * eta));
  require_finite(M1, "M1");
  return M1;
}

LowerBound compute_M2(const ModelSpec& model, double M1) {
  require_finite(M1, "M1");
  const auto g = cauchy::gamma_extrema(model.schedule);
  const double a_L = model.bounds.a.lo;
  const double a_M = model.bounds.a.hi;
  const double eta = model.schedule.min_gap();
  const double eta_bar = model.schedule.max_gap();
  const double delta_L = model.schedule.delta_min();
  const double base = std::max(M1, 0.0);

  LowerBound out;
  double sum_restricted = 0.0;
  double sum_global = 0.0;
  for (std::size_t i = 0; i < model.terms.size(); ++i) {
    const DelayTerm& term = model.terms[i];
    const TermBounds& tb = model.bounds.terms[i];
    const double saturating =
        tb.b.lo / (1.0 + std::pow(base, term.alpha)) + tb.c.lo / (1.0 + std::pow(base, term.beta));
    const double h_restricted = restricted_harvest_sup(model, i, M1);
    out.harvest_sup_restricted.push_back(h_restricted);
    sum_restricted += saturating - h_restricted;
    sum_global += saturating - tb.harvest.hi;
  }

  double impulse_part = 0.0;
  if (delta_L >= 0.0) {
    const double decay = std::exp(-a_M * eta_bar);
    impulse_part = g.B() * delta_L * decay / (1.0 - decay);
  } else {
    impulse_part = g.A() * delta_L / (1.0 - std::exp(-a_L * eta));
  }
  out.restricted = g.B() / a_M * sum_restricted + impulse_part;
  out.global = g.B() / a_M * sum_global + impulse_part;
  require_finite(out.restricted, "M2");
  return out;
}

double power_slope_sup(double exponent, double lo, double hi) {
  if (exponent == 1.0) return 1.0;
  if (exponent > 1.0) return exponent * std::pow(hi, exponent - 1.0);
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return exponent * std::pow(lo, exponent - 1.0);
}

ContractionConstants compute_contraction_constants(const ModelSpec& model, double M1, double M2) {
  const auto g = cauchy::gamma_extrema(model.schedule);
  const double a_L = model.bounds.a.lo;
  ContractionConstants out;
  out.valid = M2 > 0.0 && M2 <= M1;
  for (std::size_t i = 0; i < model.terms.size(); ++i) {
    const DelayTerm& term = model.terms[i];
    const TermBounds& tb = model.bounds.terms[i];
    const double k = power_slope_sup(term.alpha, M2, M1);
    const double gs = power_slope_sup(term.beta, M2, M1);
    out.K_star.push_back(k);
    out.G_star.push_back(gs);
    // Terms with a vanishing coefficient contribute nothing even if the slope sup is infinite.
    const double bk = tb.b.hi == 0.0 ? 0.0 : tb.b.hi * k;
    const double cg = tb.c.hi == 0.0 ? 0.0 : tb.c.hi * gs;
    out.sum += bk + cg + term.harvest_lipschitz;
  }
  out.existence_lhs = g.A() / a_L * out.sum;
  out.attractivity_lhs = std::max(g.A(), 1.0 / (g.gamma_min + 1.0)) / a_L * out.sum;
  return out;
}

Verdicts verdicts(const AnalysisReport& r) {
  const bool positive = r.M2 > 0.0;
  return {positive && r.existence_lhs < 1.0, positive && r.max_delay <= r.eta && r.attractivity_lhs < 1.0};
}

AnalysisReport analyze(const ModelSpec& model) {
  AnalysisReport r;
  const ImpulseSchedule& schedule = model.schedule;
  r.gamma = cauchy::gamma_extrema(schedule);
  r.A = r.gamma.A();
  r.B = r.gamma.B();
  r.a_L = model.bounds.a.lo;
  r.a_M = model.bounds.a.hi;
  r.delta_L = schedule.delta_min();
  r.delta_M = schedule.delta_max();
  r.delta_abs_min = schedule.delta_abs_min();
  r.delta_abs_max = schedule.delta_abs_max();
  r.eta = schedule.min_gap();
  r.eta_bar = schedule.max_gap();
  r.max_delay = model.max_delay();
  r.M = cauchy::shift_constant(r.a_L, r.gamma, r.eta);

  r.M1 = compute_M1(model);
  const LowerBound lower = compute_M2(model, r.M1);
  r.M2 = lower.restricted;
  r.M2_global = lower.global;
  r.M2_sign_disagrees = (r.M2 > 0.0) != (r.M2_global > 0.0);

  const ContractionConstants cc = compute_contraction_constants(model, r.M1, r.M2);
  r.contraction_sum = cc.sum;
  r.existence_lhs = cc.existence_lhs;
  r.attractivity_lhs = cc.attractivity_lhs;
  r.contraction_valid = cc.valid;

  for (std::size_t i = 0; i < model.terms.size(); ++i) {
    const TermBounds& tb = model.bounds.terms[i];
    TermReport t;
    t.b_L = tb.b.lo;
    t.b_M = tb.b.hi;
    t.c_L = tb.c.lo;
    t.c_M = tb.c.hi;
    t.H_L = tb.harvest.lo;
    t.H_M_global = tb.harvest.hi;
    t.H_M_restricted = lower.harvest_sup_restricted[i];
    t.L = model.terms[i].harvest_lipschitz;
    t.alpha = model.terms[i].alpha;
    t.beta = model.terms[i].beta;
    t.K_star = cc.K_star[i];
    t.G_star = cc.G_star[i];
    r.terms.push_back(t);
  }

  r.M2_positive = r.M2 > 0.0;
  r.delay_vs_eta_ok = r.max_delay <= r.eta;
  const Verdicts v = verdicts(r);
  r.existence_ok = v.existence_ok;
  r.attractivity_ok = v.attractivity_ok;
  return r;
}

std::string to_json(const AnalysisReport& r, int indent) {
  nlohmann::ordered_json j;
  j["m"] = r.terms.size();
  j["a_L"] = r.a_L;
  j["a_M"] = r.a_M;
  for (std::size_t i = 0; i < r.terms.size(); ++i) {
    const TermReport& t = r.terms[i];
    const std::string n = std::to_string(i + 1);
    j["b" + n + "_L"] = t.b_L;
    j["b" + n + "_M"] = t.b_M;
    j["c" + n + "_L"] = t.c_L;
    j["c" + n + "_M"] = t.c_M;
    j["H" + n + "_L"] = t.H_L;
    j["H" + n + "_M_global"] = t.H_M_global;
    j["H" + n + "_M_restricted"] = t.H_M_restricted;
    j["L" + n] = t.L;
    j["K_star_" + n] = t.K_star;
    j["G_star_" + n] = t.G_star;
  }
  j["delta_L"] = r.delta_L;
  j["delta_M"] = r.delta_M;
  j["delta_abs_min"] = r.delta_abs_min;
  j["delta_bar"] = r.delta_abs_max;
  j["eta"] = r.eta;
  j["eta_bar"] = r.eta_bar;
  j["max_delay"] = r.max_delay;
  j["gamma_L"] = r.gamma.gamma_min;
  j["Gamma_M"] = r.gamma.gamma_max_product;
  j["Gamma_L"] = r.gamma.gamma_min_product;
  j["A"] = r.A;
  j["B"] = r.B;
  j["M"] = r.M;
  j["M1"] = r.M1;
  j["M2"] = r.M2;
  j["M2_global"] = r.M2_global;
  j["M2_sign_disagrees"] = r.M2_sign_disagrees;
  j["contraction_sum"] = r.contraction_sum;
  j["contraction_existence"] = r.existence_lhs;
  j["contraction_attractivity"] = r.attractivity_lhs;
  j["contraction_valid"] = r.contraction_valid;
  j["M2_positive"] = r.M2_positive;
  j["delay_vs_eta_ok"] = r.delay_vs_eta_ok;
  j["existence_ok"] = r.existence_ok;
  j["attractivity_ok"] = r.attractivity_ok;
  return j.dump(indent);
}

}  // namespace impdde::analyze
