#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include "impdde/error.hpp"

#ifndef IMPDDE_VERSION
#define IMPDDE_VERSION "unknown"
#endif

namespace impdde::cli {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const sim::Trajectory& traj, double from) {
  out << "t,x_left,x_right\n";
  const auto& t = traj.times();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < from) continue;
    out << format_double(t[i]) << ',' << format_double(traj.left_values()[i]) << ','
        << format_double(traj.right_values()[i]) << '\n';
  }
}

void write_fixpoint_csv(std::ostream& out, const fixpoint::GridFunction& phi, double lo, double hi) {
  out << "t,phi_left,phi_right\n";
  const double slack = 1e-9 * phi.step();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double t = phi.nodes()[i];
    if (t < lo - slack || t > hi + slack) continue;
    out << format_double(t) << ',' << format_double(phi.left()[i]) << ',' << format_double(phi.right()[i]) << '\n';
  }
}

Manifest::Manifest(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

nlohmann::ordered_json Manifest::finish() const {
  nlohmann::ordered_json j;
  j["command"] = command_;
  j["config"] = config_;
  j["parameters"] = params_;
  j["version"] = IMPDDE_VERSION;
  j["duration_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

std::filesystem::path manifest_path(const std::string& path) { return std::filesystem::path(path + ".manifest.json"); }

}  // namespace impdde::cli
