#pragma once

#include <chrono>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "impdde/fixpoint.hpp"
#include "impdde/sim.hpp"

namespace impdde::cli {

std::string format_double(double v);

// t,x_left,x_right at every node with t >= from.
void write_trajectory_csv(std::ostream& out, const sim::Trajectory& traj, double from);
// t,phi_left,phi_right at every node inside [lo, hi].
void write_fixpoint_csv(std::ostream& out, const fixpoint::GridFunction& phi, double lo, double hi);

class Manifest {
 public:
  explicit Manifest(std::string command);

  nlohmann::ordered_json& parameters() { return params_; }
  void set_config(const std::string& path) { config_ = path; }
  nlohmann::ordered_json finish() const;

 private:
  std::string command_;
  std::string config_;
  nlohmann::ordered_json params_ = nlohmann::ordered_json::object();
  std::chrono::steady_clock::time_point start_;
};

// Writes text to path, or to stdout when path is empty or "-".
void write_text(const std::string& path, const std::string& text);

// "<path>.manifest.json" next to an output file.
std::filesystem::path manifest_path(const std::string& path);

}  // namespace impdde::cli
