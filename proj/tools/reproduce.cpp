#include "reproduce.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "impdde/analyze.hpp"
#include "impdde/cases.hpp"
#include "impdde/error.hpp"
#include "impdde/fixpoint.hpp"
#include "impdde/sim.hpp"
#include "output.hpp"

namespace impdde::cli {

namespace {

class Summary {
 public:
  explicit Summary(std::ostream& log) : log_(log) {}

  void check(bool ok, const std::string& what) {
    const std::string line = std::string(ok ? "PASS " : "FAIL ") + what;
    log_ << line << '\n';
    text_ += line + '\n';
    if (!ok) ++failures_;
  }

  void near(const std::string& name, double value, double expected, double tol) {
    std::ostringstream s;
    s << name << " = " << format_double(value) << " (expected " << expected << " +/- " << tol << ")";
    check(std::fabs(value - expected) <= tol, s.str());
  }

  int failures() const { return failures_; }
  const std::string& text() const { return text_; }

 private:
  std::ostream& log_;
  std::string text_;
  int failures_ = 0;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

std::string tag(double x0) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, x0).ptr;
  std::string s(buf, end);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

void save_trajectory(const std::filesystem::path& outdir, const sim::Trajectory& traj, double x0) {
  std::ostringstream csv;
  write_trajectory_csv(csv, traj, traj.alpha());
  write_file(outdir / ("trajectory_x0_" + tag(x0) + ".csv"), csv.str());
}

int reproduce_example56(const std::filesystem::path& outdir, std::ostream& log, Manifest& manifest) {
  Summary s(log);
  const ModelSpec model = cases::load("example56");
  const analyze::AnalysisReport r = analyze::analyze(model);
  write_file(outdir / "report.json", analyze::to_json(r) + "\n");

  s.near("M1", r.M1, 2.1736, 1e-3);
  s.near("M2 (restricted harvest sup)", r.M2, 0.0027, 5e-4);
  s.check(r.M2_global < 0.0, "M2 with the global harvest sup is negative (" + format_double(r.M2_global) + ")");
  s.near("existence lhs", r.existence_lhs, 0.8956, 1e-3);
  s.near("attractivity lhs", r.attractivity_lhs, 0.8956, 1e-3);
  s.near("K*", r.terms[0].K_star, 2.0 * r.M1, 2e-3);
  s.near("G*", r.terms[0].G_star, 2.0 * r.M1, 2e-3);
  s.check(r.gamma.gamma_max_product == 2.0 && r.gamma.gamma_min_product == 0.5 && r.A == 2.0 && r.B == 0.5,
          "Gamma_M = 2, Gamma_L = 0.5, A = 2, B = 0.5");
  s.check(r.existence_ok && r.attractivity_ok, "existence and attractivity verdicts hold");

  const double h = 0.01;
  const double t_end = 30.0;
  const std::vector<double> starts{0.3, 0.8, 1.5, 2.5};
  manifest.parameters()["h"] = h;
  manifest.parameters()["t_end"] = t_end;
  manifest.parameters()["histories"] = starts;
  std::vector<double> finals;
  for (double x0 : starts) {
    const auto traj = sim::integrate(model, InitialHistory::constant(x0), t_end, h);
    save_trajectory(outdir, traj, x0);
    finals.push_back(traj.evaluate_at(t_end));
  }
  const auto [lo, hi] = std::minmax_element(finals.begin(), finals.end());
  s.check(*hi - *lo < 1e-3, "trajectories agree at t = 30 within 1e-3 (spread " + format_double(*hi - *lo) + ")");

  fixpoint::FixpointOptions opt;
  manifest.parameters()["fixpoint_h_grid"] = opt.h_grid;
  manifest.parameters()["fixpoint_tol"] = opt.tol;
  manifest.parameters()["truncation_tol"] = opt.truncation_tol;
  const auto fp = fixpoint::iterate_to_fixed_point(model, r, opt);
  std::ostringstream csv;
  write_fixpoint_csv(csv, fp.phi, opt.report_lo, opt.report_hi);
  write_file(outdir / "fixpoint.csv", csv.str());
  nlohmann::ordered_json fj;
  fj["iterations"] = fp.iterations;
  fj["residuals"] = fp.residuals;
  fj["W"] = fp.W;
  fj["iterate_min"] = fp.iterate_min;
  fj["iterate_max"] = fp.iterate_max;
  write_file(outdir / "fixpoint.json", fj.dump(2) + "\n");

  double worst = 0.0;
  for (std::size_t n = 2; n < fp.residuals.size(); ++n) worst = std::max(worst, fp.residuals[n] / fp.residuals[n - 1]);
  s.check(fp.converged, "fixed-point iteration converged in " + std::to_string(fp.iterations) + " iterations");
  s.check(worst <= 0.95, "residual ratios for n >= 2 at most 0.95 (worst " + format_double(worst) + ")");
  s.check(fp.iterate_min >= r.M2 - opt.tol && fp.iterate_max <= r.M1 + opt.tol, "every iterate stays in [M2, M1]");
  write_file(outdir / "summary.txt", s.text());
  return s.failures();
}

int reproduce_example1(const std::filesystem::path& outdir, std::ostream& log, Manifest& manifest) {
  Summary s(log);
  const ModelSpec model = cases::load("example1");
  const analyze::AnalysisReport r = analyze::analyze(model);
  write_file(outdir / "report.json", analyze::to_json(r) + "\n");

  s.check(r.M2 < 0.0, "M2 < 0 (" + format_double(r.M2) + ")");
  s.check(!r.existence_ok, "existence verdict is false");

  const double h = 1e-3;
  const double t_end = 10.0;
  const std::vector<double> starts{0.5, 1.0, 5.0, 50.0};
  manifest.parameters()["h"] = h;
  manifest.parameters()["t_end"] = t_end;
  manifest.parameters()["histories"] = starts;
  const double e1 = std::exp(-1.0);
  for (double x0 : starts) {
    const auto traj = sim::integrate(model, InitialHistory::constant(x0), t_end, h);
    save_trajectory(outdir, traj, x0);
    double err = 0.0;
    for (int n = 1; n <= 10; ++n) {
      const double exact = std::exp(-n) * x0 - e1 * (1.0 - std::exp(-n)) / (1.0 - e1);
      err = std::max(err, std::fabs(traj.evaluate_at(n, sim::Side::left) - exact));
    }
    s.check(err < 1e-8, "x0 = " + format_double(x0) + ": closed form at t = 1..10 within 1e-8 (max error " +
                            format_double(err) + ")");
    if (x0 == 1.0) {
      bool negative = true;
      const auto& t = traj.times();
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < 1.0) continue;
        if (traj.right_values()[i] >= 0.0 || (t[i] > 1.0 && traj.left_values()[i] >= 0.0)) negative = false;
      }
      s.check(negative, "no positive AP solution: trajectory negative from t = 1+ onward for x(0)=1");
    }
  }
  write_file(outdir / "summary.txt", s.text());
  return s.failures();
}

}  // namespace

int reproduce(const std::string& name, const std::filesystem::path& outdir, std::ostream& log) {
  cases::config_text(name);  // rejects unknown names before touching the filesystem
  std::filesystem::create_directories(outdir);
  Manifest manifest("reproduce");
  manifest.set_config("builtin:" + name);
  const int failures =
      name == "example56" ? reproduce_example56(outdir, log, manifest) : reproduce_example1(outdir, log, manifest);
  auto m = manifest.finish();
  m["failures"] = failures;
  write_file(outdir / "manifest.json", m.dump(2) + "\n");
  log << (failures == 0 ? "PASS" : "FAIL") << " summary: " << failures << " failed check(s)\n";
  return failures;
}

}  // namespace impdde::cli
