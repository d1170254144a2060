#pragma once

#include <string>
#include <vector>

#include "impdde/cauchy.hpp"
#include "impdde/model.hpp"

namespace impdde::analyze {

struct TermReport {
  double b_L = 0, b_M = 0;
  double c_L = 0, c_M = 0;
  double H_L = 0;           // inf over t x [0, x_cap]
  double H_M_global = 0;    // sup over t x [0, x_cap]
  double H_M_restricted = 0;  // sup over t x [0, M1]
  double L = 0;
  double alpha = 1, beta = 1;
  double K_star = 0, G_star = 0;
};

struct AnalysisReport {
  double a_L = 0, a_M = 0;
  std::vector<TermReport> terms;

  double delta_L = 0, delta_M = 0;
  double delta_abs_min = 0, delta_abs_max = 0;
  double eta = 0, eta_bar = 0;
  double max_delay = 0;

  cauchy::GammaExtrema gamma;
  double A = 1, B = 1;
  double M = 0;  // shift constant, diagnostic only

  double M1 = 0;
  double M2 = 0;         // restricted-range harvest sup (used for verdicts)
  double M2_global = 0;  // same formula with sup over all x >= 0
  bool M2_sign_disagrees = false;

  double contraction_sum = 0;  // sum_i (b_iM K*_i + c_iM G*_i + L_i)
  double existence_lhs = 0;
  double attractivity_lhs = 0;
  bool contraction_valid = false;  // false when M2 <= 0 leaves [M2, M1] unusable

  bool M2_positive = false;
  bool delay_vs_eta_ok = false;
  bool existence_ok = false;
  bool attractivity_ok = false;
};

// Upper invariant bound
//   M1 = (A/a_L) sum (b_iM + c_iM - H_iL) + A delta_M / (1 - e^{-a_L eta}).
double compute_M1(const ModelSpec& model);

struct LowerBound {
  double restricted = 0;  // harvest sup over x in [0, M1]
  double global = 0;      // harvest sup over x in [0, x_cap]
  std::vector<double> harvest_sup_restricted;
};

// Lower invariant bound, branching on the sign of delta_L.
LowerBound compute_M2(const ModelSpec& model, double M1);

struct ContractionConstants {
  double sum = 0;
  double existence_lhs = 0;
  double attractivity_lhs = 0;
  std::vector<double> K_star, G_star;
  bool valid = false;
};

// sup_{M2 <= x <= M1} p x^{p-1}, attained at an endpoint.
double power_slope_sup(double exponent, double lo, double hi);

ContractionConstants compute_contraction_constants(const ModelSpec& model, double M1, double M2);

struct Verdicts {
  bool existence_ok = false;
  bool attractivity_ok = false;
};

// Strict inequalities: a left-hand side equal to 1 fails.
Verdicts verdicts(const AnalysisReport& report);

// Everything above in one pass. Throws AssumptionError when the jump
// products are unbounded.
AnalysisReport analyze(const ModelSpec& model);

// Flat JSON object with snake_case keys.
std::string to_json(const AnalysisReport& report, int indent = 2);

}  // namespace impdde::analyze
