#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qhm/cli/run_config.hpp"
#include "qhm/thermo.hpp"

namespace qhm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // also verification failure
inline constexpr int kExitNoSteadyState = 2;

/// Everything reported for one parameter point under one bath model.
struct PointResult {
  MachineParams params;
  bool ok{false};
  bool no_steady_state{false};
  std::string error;
  real n_ss{0};
  real n_ss_approx{0};  // analytic estimate for the model
  real n_min_cycle{0};  // lowest effective occupancy over the cycle snapshots
  real w{0}, q_h{0}, q_c{0};
  Phase phase{Phase::Trivial};
  std::optional<CopResult> cop;
  real mu_opt{0};
  std::optional<real> mu_opt_numeric;
};

PointResult evaluate_point(const MachineParams& p, bool with_numeric_mu_opt);

int cmd_steady(const RunConfig& config, std::ostream& out, std::ostream& err);

/// CSV over the sweep grid; `phase_diagram` requires two sweep variables and
/// adds the numerically located mu_opt to every row.
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err,
              bool phase_diagram);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace qhm::cli
