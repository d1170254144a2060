#pragma once

#include <cstdio>
#include <random>
#include <string>

#include "impdde/model.hpp"

namespace impdde::testing {

// Coarser bound sampling for models whose bounds are not under test.
inline BoundOptions quick_bounds() {
  BoundOptions o;
  o.t_window = 200.0;
  o.samples = 20'000;
  o.x_cap = 100.0;
  o.x_samples = 9;
  return o;
}

inline ModelSpec model_from(const std::string& json, const BoundOptions& options = quick_bounds()) {
  return load_model(json, options);
}

// x' = -x + 1/(1 + x(t)), equilibrium (sqrt(5) - 1) / 2.
inline ModelSpec golden_model() {
  return model_from(R"({"a": "1", "T": 1, "terms": [{"b": "1"}]})");
}

inline constexpr double golden = 0.61803398874989484820;

// Impulse-free linear equation x' = -x.
inline ModelSpec linear_decay() { return model_from(R"({"a": "1", "T": 1})"); }

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Random linear model a(t) = a0 + a1*sin(w t)^2 (smooth, so RK4 keeps its
// order) with a period-P jump pattern
// whose multipliers 1 + gamma_r multiply to one.
inline std::string random_linear_config(std::mt19937_64& g, bool with_delta = true) {
  const double a0 = uniform(g, 0.5, 3.0);
  const double a1 = uniform(g, 0.0, 1.0);
  const double w = uniform(g, 0.5, 2.5);
  const int P = std::uniform_int_distribution<int>(1, 3)(g);
  const double theta = uniform(g, 1.0, 3.0);
  std::string offsets, gammas, deltas;
  double prod = 1.0;
  for (int r = 0; r < P; ++r) {
    const double off = theta * (r + uniform(g, 0.1, 0.6)) / P;
    const double gamma = r + 1 < P ? uniform(g, -0.6, 1.0) : 1.0 / prod - 1.0;
    prod *= 1.0 + gamma;
    const char* sep = r ? ", " : "";
    offsets += sep + num(off);
    gammas += sep + num(gamma);
    deltas += sep + num(with_delta ? uniform(g, -0.5, 0.5) : 0.0);
  }
  return "{\"a\": \"" + num(a0) + " + " + num(a1) + "*sin(" + num(w) + "*t)^2\", \"T\": 1, " +
         "\"impulses\": {\"t0\": " + num(uniform(g, -1.0, 1.0)) + ", \"period_count\": " + std::to_string(P) +
         ", \"period_length\": " + num(theta) + ", \"offsets\": [" + offsets + "], \"gamma\": [" + gammas +
         "], \"delta\": [" + deltas + "]}}";
}

}  // namespace impdde::testing
