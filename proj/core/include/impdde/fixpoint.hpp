#pragma once

#include <functional>
#include <vector>

#include "impdde/analyze.hpp"
#include "impdde/model.hpp"
#include "impdde/sim.hpp"

namespace impdde::fixpoint {

using sim::Side;

struct GridSpec {
  double lo = 0.0;
  double hi = 10.0;
  double h = 0.01;
};

// Node set shared by grid functions and the quadrature mesh: anchor + j*h
// for j_first <= j <= j_last, merged with impulse instants in between (a grid
// point within 1e-9*h of an impulse is replaced by it).
std::vector<double> build_nodes(const ImpulseSchedule& schedule, double anchor, double h, long j_first, long j_last);

// PLC function sampled on a finite window. Left values at every node, right
// values at impulse instants. Between nodes: cubic Lagrange interpolation on
// nodes of the same continuity cell. Outside the window the nearest endpoint
// value is used.
class GridFunction {
 public:
  GridFunction(const GridSpec& spec, const ImpulseSchedule& schedule);

  static GridFunction from_function(const GridSpec& spec, const ImpulseSchedule& schedule,
                                    const std::function<double(double)>& f);

  const GridSpec& spec() const noexcept { return spec_; }
  double lo() const noexcept { return spec_.lo; }
  double hi() const noexcept { return nodes_.back(); }
  double step() const noexcept { return spec_.h; }
  std::size_t size() const noexcept { return nodes_.size(); }

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& left() const noexcept { return left_; }
  const std::vector<double>& right() const noexcept { return right_; }
  bool is_impulse(std::size_t i) const noexcept { return impulse_[i] != 0; }

  void set(std::size_t i, double left, double right) {
    left_[i] = left;
    right_[i] = right;
  }

  double operator()(double t, Side side = Side::left) const;

  // Max over nodes of |left differences|, plus right differences at impulses.
  double distance(const GridFunction& other) const;

  double min_value() const;
  double max_value() const;

 private:
  double node_value(std::size_t j, std::size_t segment_start) const {
    return j == segment_start ? right_[j] : left_[j];
  }

  GridSpec spec_;
  std::vector<double> nodes_;
  std::vector<double> left_;
  std::vector<double> right_;
  std::vector<char> impulse_;
  // For node i: index of the last impulse node <= i (or 0) and of the first
  // impulse node > i (or the last node).
  std::vector<std::size_t> segment_start_;
  std::vector<std::size_t> segment_end_;
};

// Smallest W >= 0 such that cutting the integral and the impulse sum of the
// operator to (t - W, t] changes its value by at most tol.
double truncation_window(const ModelSpec& model, const analyze::AnalysisReport& report, double tol);

// Discretised operator
//   (F phi)(t) = int_{t-W}^{t} H(t,s) g_phi(s) ds + sum_{t-W < t_k < t} H(t, t_k^+) delta_k
// evaluated on the nodes of `out`. Precomputes everything that does not
// depend on phi so that repeated application is cheap.
class IntegralOperator {
 public:
  IntegralOperator(const ModelSpec& model, const GridSpec& out, double W);

  GridFunction apply(const GridFunction& phi) const;

  double window() const noexcept { return W_; }

 private:
  double integrand(const GridFunction& phi, double s, std::size_t q, bool midpoint) const;

  const ModelSpec* model_;
  GridSpec out_;
  double W_;
  std::vector<double> mesh_;          // quadrature nodes
  std::vector<char> mesh_impulse_;
  std::vector<double> mesh_gamma_, mesh_delta_;
  std::vector<double> acum_, acum_mid_;  // int a from mesh_[0]
  std::vector<std::size_t> out_index_;   // mesh index of every output node
  std::vector<std::size_t> lower_index_; // first mesh index of each output node's window
  struct Coeffs {
    double b, c, tau, sigma;
  };
  std::vector<char> harvest_active_;
  std::vector<std::vector<Coeffs>> coeff_node_, coeff_mid_;  // [mesh index][term]
};

// F applied on [out_lo, out_hi]. Throws ConfigError("window underflow") when
// phi does not reach W + max_delay below out_lo.
GridFunction apply_F(const ModelSpec& model, const analyze::AnalysisReport& report, const GridFunction& phi,
                     double W, double out_lo, double out_hi);

struct FixpointOptions {
  double h_grid = 0.01;
  double tol = 1e-6;
  double truncation_tol = 1e-8;
  double report_lo = 0.0;
  double report_hi = 10.0;
  // The grid starts margin_factor * (W + max_delay) below report_lo.
  double margin_factor = 2.0;
  int max_iterations = 200;
};

struct FixpointResult {
  GridFunction phi;
  std::vector<double> residuals;
  int iterations = 0;
  double W = 0.0;
  bool converged = false;
  double iterate_min = 0.0;  // over every iterate produced
  double iterate_max = 0.0;
};

// Picard iteration phi_{n+1} = F phi_n from the constant (M1 + M2) / 2.
// Throws AssumptionError unless the existence verdict holds and
// NumericalError when the iteration cap is reached.
FixpointResult iterate_to_fixed_point(const ModelSpec& model, const analyze::AnalysisReport& report,
                                      const FixpointOptions& options = {});

}  // namespace impdde::fixpoint
