#include "qhm/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "qhm/cli/csv.hpp"
#include "qhm/cli/verify.hpp"
#include "qhm/errors.hpp"
#include "qhm/parallel.hpp"
#include "qhm/steadystate.hpp"

namespace qhm::cli {
namespace {

std::string join(const std::vector<std::string>& v, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

void write_config_header(std::ostream& os, std::string_view command, const RunConfig& c) {
  write_header_line(os, "command", command);
  for (const auto& [key, values] : c.settings) {
    if (key == "out" || key == "threads") continue;  // do not affect the data
    write_header_line(os, key, join(values, " ; "));
  }
  for (const auto& w : validity_warnings(c.base)) write_header_line(os, "warning", w);
}

real analytic_occupancy(const MachineParams& p) {
  return p.model == BathModel::Rwa ? n_ss_rwa_approx(p) : n_ss_approx(p);
}

// The RWA occupancy estimate is smallest at mu = 1.
real analytic_mu_opt(const MachineParams& p) {
  return p.model == BathModel::Rwa ? real(1) : mu_opt_approx(p);
}

std::vector<std::string> csv_columns(bool numeric_mu_opt) {
  std::vector<std::string> cols = {
      "model", "omega_m", "gamma", "q", "n_h", "n_c", "epsilon", "mu", "tau",
      "omega_ap_ratio", "gamma_eff", "n_ss", "n_ss_approx", "n_min_cycle", "w", "q_h",
      "q_c", "phase", "cop", "cop_bound", "within_bound", "mu_opt"};
  if (numeric_mu_opt) cols.push_back("mu_opt_numeric");
  cols.push_back("error");
  return cols;
}

std::vector<std::string> csv_row(const PointResult& r, bool numeric_mu_opt) {
  const MachineParams& p = r.params;
  std::vector<std::string> f = {
      std::string(model_name(p.model)),
      format_real(p.osc.omega_m),
      format_real(p.osc.gamma),
      format_real(p.osc.quality_factor()),
      format_real(p.n_h),
      format_real(p.n_c),
      format_real(p.coupling.epsilon),
      format_real(p.mu),
      format_real(p.tau),
      format_real(p.omega_ap() / p.osc.omega_m),
      format_real(gamma_eff(p))};
  if (r.ok) {
    f.insert(f.end(), {format_real(r.n_ss), format_real(r.n_ss_approx),
                       format_real(r.n_min_cycle), format_real(r.w), format_real(r.q_h),
                       format_real(r.q_c), std::string(to_string(r.phase))});
    if (r.cop) {
      f.insert(f.end(), {format_real(r.cop->value), format_real(r.cop->bound),
                         r.cop->within_bound ? "1" : "0"});
    } else {
      f.insert(f.end(), {"", "", ""});
    }
    f.push_back(format_real(r.mu_opt));
    if (numeric_mu_opt) f.push_back(r.mu_opt_numeric ? format_real(*r.mu_opt_numeric) : "");
    f.push_back("");
  } else {
    f.resize(f.size() + 11 + (numeric_mu_opt ? 1 : 0));
    f.push_back(r.error);
  }
  return f;
}

struct OutputTarget {
  std::ofstream file;
  std::ostream* stream{nullptr};
};

bool open_output(const RunConfig& c, std::ostream& fallback, std::ostream& err,
                 OutputTarget& target) {
  if (c.out.empty()) {
    target.stream = &fallback;
    return true;
  }
  target.file.open(c.out, std::ios::out | std::ios::trunc);
  if (!target.file) {
    err << "error: cannot open output file '" << c.out << "'\n";
    return false;
  }
  target.stream = &target.file;
  return true;
}

}  // namespace

PointResult evaluate_point(const MachineParams& p, bool with_numeric_mu_opt) {
  PointResult r;
  r.params = p;
  try {
    const CycleLedger l = cycle_ledger(p);
    r.n_ss = l.n_ss;
    r.w = l.w;
    r.q_h = l.q_h;
    r.q_c = l.q_c;
    r.phase = l.phase;
    r.cop = l.cop;
    r.n_min_cycle = std::numeric_limits<real>::infinity();
    for (const Covar2& v : l.states.all()) r.n_min_cycle = std::min(r.n_min_cycle, occupancy_of(v));
    r.n_ss_approx = analytic_occupancy(p);
    r.mu_opt = analytic_mu_opt(p);
    if (with_numeric_mu_opt) r.mu_opt_numeric = mu_opt_numeric(p).mu_opt;
    r.ok = true;
  } catch (const NoUniqueSteadyState& e) {
    r.no_steady_state = true;
    r.error = e.what();
  } catch (const Error& e) {
    r.error = e.what();
  } catch (const std::invalid_argument& e) {
    r.error = e.what();
  } catch (const std::domain_error& e) {
    r.error = e.what();
  }
  return r;
}

int cmd_steady(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (!config.sweeps.empty()) {
    err << "error: steady evaluates a single point; use sweep for --sweep\n";
    return kExitUsage;
  }
  OutputTarget target;
  if (!open_output(config, out, err, target)) return kExitUsage;
  std::ostream& os = *target.stream;
  write_config_header(os, "steady", config);

  MachineParams base = config.base;
  for (const auto& h : config.holds) apply_hold(base, h);

  int status = kExitOk;
  for (BathModel model : models_of(config.models)) {
    MachineParams p = base;
    p.model = model;
    os << "model = " << model_name(model) << '\n';
    try {
      const SteadyStateResult ss = steady_state(p);
      os << "v_ss_xx = " << format_real(ss.v_ss.xx) << '\n'
         << "v_ss_xp = " << format_real(ss.v_ss.xp) << '\n'
         << "v_ss_pp = " << format_real(ss.v_ss.pp) << '\n'
         << "n_ss = " << format_real(ss.n_ss) << '\n'
         << "residual = " << format_real(ss.residual) << '\n';
      const PointResult r = evaluate_point(p, true);
      if (!r.ok) throw Error(r.error);
      os << "n_ss_approx = " << format_real(r.n_ss_approx) << '\n'
         << "mu_opt_approx = " << format_real(r.mu_opt) << '\n'
         << "mu_opt_numeric = " << format_real(*r.mu_opt_numeric) << '\n'
         << "n_min_cycle = " << format_real(r.n_min_cycle) << '\n'
         << "w = " << format_real(r.w) << '\n'
         << "q_h = " << format_real(r.q_h) << '\n'
         << "q_c = " << format_real(r.q_c) << '\n'
         << "phase = " << to_string(r.phase) << '\n';
      if (r.cop) {
        os << "cop = " << format_real(r.cop->value) << '\n'
           << "cop_bound = " << format_real(r.cop->bound) << '\n'
           << "within_bound = " << (r.cop->within_bound ? "yes" : "no") << '\n';
      }
    } catch (const NoUniqueSteadyState& e) {
      err << "error: " << e.what() << '\n';
      status = kExitNoSteadyState;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      if (status == kExitOk) status = kExitUsage;
    }
  }
  return status;
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err,
              bool phase_diagram) {
  if (phase_diagram ? config.sweeps.size() != 2 : config.sweeps.empty()) {
    err << "error: " << (phase_diagram ? "phase-diagram needs exactly two --sweep variables"
                                       : "sweep needs one or two --sweep variables")
        << '\n';
    return kExitUsage;
  }
  const std::vector<GridPoint> grid = expand_grid(config);
  const std::vector<BathModel> models = models_of(config.models);

  std::vector<PointResult> results(grid.size() * models.size());
  parallel_for(results.size(), config.threads, [&](std::size_t i) {
    MachineParams p = grid[i / models.size()].params;
    p.model = models[i % models.size()];
    results[i] = evaluate_point(p, phase_diagram);
  });

  OutputTarget target;
  if (!open_output(config, out, err, target)) return kExitUsage;
  std::ostream& os = *target.stream;
  write_config_header(os, phase_diagram ? "phase-diagram" : "sweep", config);
  write_header_line(os, "rows", std::to_string(results.size()));
  write_row(os, csv_columns(phase_diagram));
  std::size_t failed = 0, no_ss = 0;
  for (const auto& r : results) {
    write_row(os, csv_row(r, phase_diagram));
    if (!r.ok) {
      ++failed;
      if (r.no_steady_state) ++no_ss;
    }
  }
  if (failed) err << "warning: " << failed << " of " << results.size() << " rows failed\n";
  if (failed == results.size()) return no_ss == failed ? kExitNoSteadyState : kExitUsage;
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Squeezed-oscillator quantum heat machine simulator", "qhm"};
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, std::vector<std::string>> raw;
  std::string config_path;
  auto opt = [&](const std::string& key, const std::string& help) {
    return app.add_option("--" + key, raw[key], help)->expected(1)->multi_option_policy(
        CLI::MultiOptionPolicy::TakeAll);
  };
  opt("omega-m", "mechanical angular frequency");
  auto* q = opt("q", "quality factor omega_m / gamma");
  auto* gamma = opt("gamma", "hot-bath damping rate");
  q->excludes(gamma);
  opt("n-h", "hot-bath occupancy");
  opt("n-c", "cold-bath occupancy");
  opt("eps", "cold loss per squeezer, 0..1");
  opt("mu", "squeezing strength");
  auto* tau = opt("tau", "cycle period");
  auto* ratio = opt("omega-ap-ratio", "squeezer rate 2 pi / tau over omega_m");
  tau->excludes(ratio);
  opt("model", "io | rwa | both");
  opt("sweep", "var=lin|log:min:max:count (at most twice)");
  opt("hold", "omega_m/gamma_eff | gamma_eff | n_c/n_h | q = value");
  opt("out", "output path (default stdout)");
  opt("seed", "random seed for verify");
  opt("threads", "worker threads (0 = all cores)");
  opt("inject-fault", "")->group("");
  app.add_option("--config", config_path, "key=value file; flags take precedence");

  auto* steady = app.add_subcommand("steady", "steady state and energetics at one point");
  auto* sweep = app.add_subcommand("sweep", "CSV over a one- or two-variable grid");
  auto* phase = app.add_subcommand("phase-diagram", "CSV phase labels over a two-variable grid");
  auto* verify = app.add_subcommand("verify", "run the oracle and invariant checks");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig config;
  try {
    Settings cli;
    for (const auto& [key, values] : raw) {
      if (!values.empty()) cli[key] = values;
    }
    Settings merged = config_path.empty() ? cli : merge_settings(read_config_file(config_path), cli);
    config = config_from_settings(merged);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*steady) return cmd_steady(config, out, err);
    if (*sweep) return cmd_sweep(config, out, err, false);
    if (*phase) return cmd_sweep(config, out, err, true);
    if (*verify) {
      OutputTarget target;
      if (!open_output(config, out, err, target)) return kExitUsage;
      const auto results = run_verify({config.seed, config.inject_fault, config.threads});
      return report_verify(results, *target.stream);
    }
  } catch (const NoUniqueSteadyState& e) {
    err << "error: " << e.what() << '\n';
    return kExitNoSteadyState;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace qhm::cli
