#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qhm/protocol.hpp"

namespace qhm::cli {

enum class Scale { Linear, Log };

struct SweepSpec {
  std::string variable;
  Scale scale{Scale::Linear};
  real min{0};
  real max{0};
  std::size_t count{2};

  std::vector<real> values() const;
};

/// Parses "var=scale:min:max:count", e.g. "mu=log:1:100:50".
SweepSpec parse_sweep(std::string_view text);

/// A held-constant quantity, re-imposed after the sweep variables are set.
/// Supported: omega_m/gamma_eff (solves for epsilon), gamma_eff (epsilon),
/// n_c/n_h (n_c) and q (gamma).
struct HoldSpec {
  std::string expr;
  real value{0};
};

HoldSpec parse_hold(std::string_view text);

enum class ModelSelect { Io, Rwa, Both };

std::vector<BathModel> models_of(ModelSelect select);
std::string_view model_name(BathModel model);

/// Raw option values keyed by long flag name ("omega-m", "sweep", ...).
/// Repeatable options keep every value in order.
using Settings = std::map<std::string, std::vector<std::string>>;

/// Reads key=value lines; '#' starts a comment, blank lines are skipped and
/// underscores in keys are read as dashes. Throws std::invalid_argument on
/// malformed lines or unknown keys.
Settings read_config_file(const std::string& path);

/// `overrides` replaces whole keys of `base`; setting one of --q/--gamma or
/// --tau/--omega-ap-ratio also drops the other from `base`.
Settings merge_settings(Settings base, const Settings& overrides);

struct RunConfig {
  MachineParams base;
  std::vector<SweepSpec> sweeps;
  std::vector<HoldSpec> holds;
  ModelSelect models{ModelSelect::Io};
  std::string out;  // empty = stdout
  std::uint64_t seed{42};
  unsigned threads{0};
  std::string inject_fault;
  Settings settings;  // resolved inputs, echoed into output headers
};

/// Builds and checks a RunConfig. Defaults: omega-m 1e6, q 1e6, n-h 4e4,
/// n-c 0, eps 0, mu 1, omega-ap-ratio 1e3, model io.
RunConfig config_from_settings(const Settings& settings);

/// Option names accepted on the command line and in config files.
const std::vector<std::string>& known_keys();

/// Sets one sweep variable on p. Variables: mu, omega_ap, omega_ap_ratio,
/// epsilon, n_c, n_h, tau, gamma.
void apply_variable(MachineParams& p, std::string_view variable, real value);
void apply_hold(MachineParams& p, const HoldSpec& hold);

struct GridPoint {
  std::size_t index{0};
  std::vector<real> coords;  // one per sweep, in sweep order
  MachineParams params;
};

/// Row-major grid (last sweep fastest) with holds applied to each point.
std::vector<GridPoint> expand_grid(const RunConfig& config);

}  // namespace qhm::cli
