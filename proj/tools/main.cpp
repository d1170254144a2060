#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "impdde/analyze.hpp"
#include "impdde/cauchy.hpp"
#include "impdde/error.hpp"
#include "impdde/fixpoint.hpp"
#include "impdde/halanay.hpp"
#include "impdde/model.hpp"
#include "impdde/sim.hpp"
#include "output.hpp"
#include "reproduce.hpp"

using namespace impdde;

namespace {

enum Exit { ok = 0, usage = 1, numerical = 2, assumption = 3 };

struct SimulateArgs {
  std::string config;
  double t_end = 20.0;
  double h = 0.01;
  std::string history;
  double alpha = 0.0;
  std::string out;
};

struct VerifyArgs {
  std::string config;
  bool json_only = false;
};

struct FixpointArgs {
  std::string config;
  double tol = 1e-6;
  double h_grid = 0.01;
  double truncation_tol = 1e-8;
  double t_lo = 0.0;
  double t_hi = 10.0;
  std::string out;
};

struct CauchyArgs {
  std::string config;
  double t = 1.0;
  double s = 0.0;
};

struct HalanayArgs {
  std::string config;
  std::optional<double> R, S, tau, c;
  std::optional<double> ybar0, t0, t;
};

struct ReproduceArgs {
  std::string name;
  std::string outdir = "reproduce_out";
};

void write_manifest(const std::string& out, const cli::Manifest& manifest) {
  const std::string text = manifest.finish().dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cerr << text;
  } else {
    cli::write_text(cli::manifest_path(out).string(), text);
  }
}

int run_simulate(const SimulateArgs& a) {
  cli::Manifest manifest("simulate");
  manifest.set_config(a.config);
  const ModelSpec model = load_model_file(a.config);
  InitialHistory history;
  if (!a.history.empty()) {
    history = parse_history(a.history, a.alpha);
  } else if (model.history) {
    history = *model.history;
  } else {
    throw ConfigError("no initial history: pass --history or add 'history' to the configuration");
  }
  auto& p = manifest.parameters();
  p["t_end"] = a.t_end;
  p["h"] = a.h;
  p["history"] = history.description;
  p["alpha"] = history.alpha;
  const auto traj = sim::integrate(model, history, a.t_end, a.h);
  std::ostringstream csv;
  cli::write_trajectory_csv(csv, traj, traj.alpha());
  cli::write_text(a.out, csv.str());
  write_manifest(a.out, manifest);
  return ok;
}

int run_verify(const VerifyArgs& a) {
  const ModelSpec model = load_model_file(a.config);
  const auto r = analyze::analyze(model);
  std::cout << analyze::to_json(r) << '\n';
  if (!a.json_only) {
    std::cout << "existence (M2 > 0 and lhs " << cli::format_double(r.existence_lhs)
              << " < 1): " << (r.existence_ok ? "holds" : "fails") << '\n';
    std::cout << "attractivity (M2 > 0, max delay <= eta, lhs " << cli::format_double(r.attractivity_lhs)
              << " < 1): " << (r.attractivity_ok ? "holds" : "fails") << '\n';
    if (r.M2_sign_disagrees) {
      std::cout << "note: M2 computed with the global harvest sup has the opposite sign ("
                << cli::format_double(r.M2_global) << ")\n";
    }
  }
  return ok;
}

int run_fixpoint(const FixpointArgs& a) {
  cli::Manifest manifest("fixpoint");
  manifest.set_config(a.config);
  const ModelSpec model = load_model_file(a.config);
  const auto r = analyze::analyze(model);
  fixpoint::FixpointOptions opt;
  opt.tol = a.tol;
  opt.h_grid = a.h_grid;
  opt.truncation_tol = a.truncation_tol;
  opt.report_lo = a.t_lo;
  opt.report_hi = a.t_hi;
  const auto fp = fixpoint::iterate_to_fixed_point(model, r, opt);

  std::ostringstream csv;
  cli::write_fixpoint_csv(csv, fp.phi, opt.report_lo, opt.report_hi);
  cli::write_text(a.out, csv.str());

  auto& p = manifest.parameters();
  p["tol"] = opt.tol;
  p["h_grid"] = opt.h_grid;
  p["truncation_tol"] = opt.truncation_tol;
  p["t_lo"] = opt.report_lo;
  p["t_hi"] = opt.report_hi;
  p["max_iterations"] = opt.max_iterations;
  p["iterations"] = fp.iterations;
  p["W"] = fp.W;
  p["residuals"] = fp.residuals;
  p["iterate_min"] = fp.iterate_min;
  p["iterate_max"] = fp.iterate_max;
  write_manifest(a.out, manifest);
  return ok;
}

int run_cauchy(const CauchyArgs& a) {
  const ModelSpec model = load_model_file(a.config);
  const auto g = cauchy::gamma_extrema(model.schedule);
  const cauchy::CauchyMatrix H(model);
  const auto env = cauchy::two_sided_bound(model, g, a.t, a.s);
  nlohmann::ordered_json j;
  j["t"] = a.t;
  j["s"] = a.s;
  j["H"] = H(a.t, a.s);
  j["jump_factor"] = H.jump_factor(a.t, a.s);
  j["integral_a"] = H.integral_a(a.s, a.t);
  j["lower_bound"] = env.lower;
  j["upper_bound"] = env.upper;
  std::cout << j.dump(2) << '\n';
  return ok;
}

int run_halanay(const HalanayArgs& a) {
  halanay::HalanayProblem p;
  if (!a.config.empty()) {
    p = halanay::from_report(analyze::analyze(load_model_file(a.config)));
  } else if (!(a.R && a.S && a.tau && a.c)) {
    throw ConfigError("halanay needs a configuration or all of --R --S --tau --c");
  }
  if (a.R) p.R = *a.R;
  if (a.S) p.S = *a.S;
  if (a.tau) p.tau = *a.tau;
  if (a.c) p.c = *a.c;
  const double lambda = halanay::solve_rate(p);
  nlohmann::ordered_json j;
  j["R"] = p.R;
  j["S"] = p.S;
  j["tau"] = p.tau;
  j["c"] = p.c;
  j["lambda"] = lambda;
  j["residual"] = halanay::rate_residual(p, lambda);
  if (a.ybar0 && a.t) {
    const double T0 = a.t0.value_or(0.0);
    const ModelSpec model = a.config.empty() ? ModelSpec{} : load_model_file(a.config);
    const auto e = halanay::certified_envelope(p, *a.ybar0, model.schedule, T0, *a.t);
    j["T0"] = T0;
    j["t"] = *a.t;
    j["ybar0"] = *a.ybar0;
    j["jump_product"] = e.product;
    j["envelope"] = e.exact;
    j["envelope_simplified"] = e.simplified;
  }
  std::cout << j.dump(2) << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Impulsive delay differential equations: simulation, condition checks, fixed point, decay rates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", IMPDDE_VERSION);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Integrate the model and write t,x_left,x_right as CSV");
  sim_cmd->set_help_flag("--help", "Print this help message and exit");
  sim_cmd->add_option("config", sim_args.config, "Model configuration (JSON)")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--t-end", sim_args.t_end, "Final time");
  sim_cmd->add_option("--h", sim_args.h, "Step size");
  sim_cmd->add_option("--history", sim_args.history, "Initial history: a constant or an expression in s");
  sim_cmd->add_option("--alpha", sim_args.alpha, "Start time");
  sim_cmd->add_option("--out", sim_args.out, "Output CSV (default: stdout)");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Compute the invariant bounds and condition verdicts");
  verify_cmd->add_option("config", verify_args.config, "Model configuration (JSON)")->required()->check(CLI::ExistingFile);
  verify_cmd->add_flag("--json", verify_args.json_only, "Print only the JSON report");

  FixpointArgs fp_args;
  auto* fp_cmd = app.add_subcommand("fixpoint", "Iterate the integral operator to its fixed point");
  fp_cmd->add_option("config", fp_args.config, "Model configuration (JSON)")->required()->check(CLI::ExistingFile);
  fp_cmd->add_option("--tol", fp_args.tol, "Residual tolerance");
  fp_cmd->add_option("--h-grid", fp_args.h_grid, "Grid step");
  fp_cmd->add_option("--truncation-tol", fp_args.truncation_tol, "Tail truncation tolerance");
  fp_cmd->add_option("--t-lo", fp_args.t_lo, "Start of the reported window");
  fp_cmd->add_option("--t-hi", fp_args.t_hi, "End of the reported window");
  fp_cmd->add_option("--out", fp_args.out, "Output CSV (default: stdout)");

  CauchyArgs cauchy_args;
  auto* cauchy_cmd = app.add_subcommand("cauchy", "Evaluate H(t, s) and its two-sided exponential envelope");
  cauchy_cmd->add_option("config", cauchy_args.config, "Model configuration (JSON)")->required()->check(CLI::ExistingFile);
  cauchy_cmd->add_option("--t", cauchy_args.t, "Upper time");
  cauchy_cmd->add_option("--s", cauchy_args.s, "Lower time");

  HalanayArgs hal_args;
  auto* hal_cmd = app.add_subcommand("halanay", "Solve for the certified exponential decay rate");
  hal_cmd->add_option("config", hal_args.config, "Model configuration (JSON)")->check(CLI::ExistingFile);
  hal_cmd->add_option("--R", hal_args.R, "Linear decay coefficient");
  hal_cmd->add_option("--S", hal_args.S, "Delayed gain");
  hal_cmd->add_option("--tau", hal_args.tau, "Delay bound");
  hal_cmd->add_option("--c", hal_args.c, "Jump factor max{(gamma_k+1)^-1, 1}");
  hal_cmd->add_option("--ybar0", hal_args.ybar0, "Initial window sup for the envelope");
  hal_cmd->add_option("--t0", hal_args.t0, "Envelope start time");
  hal_cmd->add_option("--t", hal_args.t, "Envelope evaluation time");

  ReproduceArgs rep_args;
  auto* rep_cmd = app.add_subcommand("reproduce", "Run a built-in case end to end (example1, example56)");
  rep_cmd->add_option("case", rep_args.name, "Case name")->required();
  rep_cmd->add_option("--outdir", rep_args.outdir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*sim_cmd) return run_simulate(sim_args);
    if (*verify_cmd) return run_verify(verify_args);
    if (*fp_cmd) return run_fixpoint(fp_args);
    if (*cauchy_cmd) return run_cauchy(cauchy_args);
    if (*hal_cmd) return run_halanay(hal_args);
    if (*rep_cmd) return cli::reproduce(rep_args.name, rep_args.outdir, std::cout) == 0 ? ok : numerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case Error::Kind::config: return usage;
      case Error::Kind::numerical: return numerical;
      case Error::Kind::assumption: return assumption;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  }
  return usage;
}
