#include "qhm/cli/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace qhm::cli {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

real parse_real(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const real v = std::strtold(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + ": not a finite number: '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || s[0] == '-' || end != s.c_str() + s.size() || errno == ERANGE) {
    throw std::invalid_argument(std::string(what) + ": not an unsigned integer: '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

const std::vector<std::string> kSweepVariables = {
    "mu", "omega_ap", "omega_ap_ratio", "epsilon", "n_c", "n_h", "tau", "gamma"};

const std::vector<std::string> kHoldExprs = {"omega_m/gamma_eff", "gamma_eff",
                                             "n_c/n_h", "q"};

const std::string* single(const Settings& s, const std::string& key) {
  const auto it = s.find(key);
  if (it == s.end() || it->second.empty()) return nullptr;
  return &it->second.back();
}

}  // namespace

std::vector<real> SweepSpec::values() const {
  std::vector<real> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const real f = static_cast<real>(i) / static_cast<real>(count - 1);
    if (scale == Scale::Log) {
      out[i] = std::exp(std::log(min) + f * (std::log(max) - std::log(min)));
    } else {
      out[i] = min + f * (max - min);
    }
  }
  // Pin the endpoints so they print exactly as given.
  out.front() = min;
  out.back() = max;
  return out;
}

SweepSpec parse_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw std::invalid_argument("--sweep: expected var=scale:min:max:count");
  }
  SweepSpec s;
  s.variable = trim(text.substr(0, eq));
  if (std::find(kSweepVariables.begin(), kSweepVariables.end(), s.variable) ==
      kSweepVariables.end()) {
    throw std::invalid_argument("--sweep: unknown variable '" + s.variable + "'");
  }
  const auto parts = split(text.substr(eq + 1), ':');
  if (parts.size() != 4) {
    throw std::invalid_argument("--sweep: expected var=scale:min:max:count");
  }
  if (parts[0] == "lin" || parts[0] == "linear") {
    s.scale = Scale::Linear;
  } else if (parts[0] == "log") {
    s.scale = Scale::Log;
  } else {
    throw std::invalid_argument("--sweep: scale must be lin or log, got '" + parts[0] + "'");
  }
  s.min = parse_real(parts[1], "--sweep min");
  s.max = parse_real(parts[2], "--sweep max");
  s.count = parse_u64(parts[3], "--sweep count");
  if (s.count < 2) throw std::invalid_argument("--sweep: count must be >= 2");
  if (!(s.min < s.max)) throw std::invalid_argument("--sweep: need min < max");
  if (s.scale == Scale::Log && !(s.min > 0)) {
    throw std::invalid_argument("--sweep: log scale needs min > 0");
  }
  return s;
}

HoldSpec parse_hold(std::string_view text) {
  // The expression may itself contain '/', so split at the last '='.
  const auto eq = text.rfind('=');
  if (eq == std::string_view::npos) {
    throw std::invalid_argument("--hold: expected expr=value");
  }
  HoldSpec h;
  h.expr = trim(text.substr(0, eq));
  if (std::find(kHoldExprs.begin(), kHoldExprs.end(), h.expr) == kHoldExprs.end()) {
    throw std::invalid_argument("--hold: unsupported expression '" + h.expr + "'");
  }
  h.value = parse_real(text.substr(eq + 1), "--hold value");
  if (!(h.value > 0)) throw std::invalid_argument("--hold: value must be > 0");
  return h;
}

std::vector<BathModel> models_of(ModelSelect select) {
  switch (select) {
    case ModelSelect::Io: return {BathModel::IndependentOscillator};
    case ModelSelect::Rwa: return {BathModel::Rwa};
    case ModelSelect::Both: return {BathModel::IndependentOscillator, BathModel::Rwa};
  }
  return {};
}

std::string_view model_name(BathModel model) {
  return model == BathModel::Rwa ? "rwa" : "io";
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "omega-m", "q",     "gamma", "n-h",  "n-c",  "eps",     "mu",
      "tau",     "omega-ap-ratio", "model", "sweep", "hold", "out",
      "seed",    "threads", "inject-fault"};
  return keys;
}

Settings read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("--config: cannot open '" + path + "'");
  Settings s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(t.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
    s[key].push_back(trim(t.substr(eq + 1)));
  }
  return s;
}

Settings merge_settings(Settings base, const Settings& overrides) {
  auto drop_partner = [&](const char* a, const char* b) {
    if (overrides.contains(a)) base.erase(b);
    if (overrides.contains(b)) base.erase(a);
  };
  drop_partner("q", "gamma");
  drop_partner("tau", "omega-ap-ratio");
  for (const auto& [key, values] : overrides) base[key] = values;
  return base;
}

RunConfig config_from_settings(const Settings& settings) {
  RunConfig c;
  c.settings = settings;
  auto get = [&](const char* key, real fallback) {
    const std::string* v = single(settings, key);
    return v ? parse_real(*v, std::string("--") + key) : fallback;
  };

  if (settings.contains("q") && settings.contains("gamma")) {
    throw std::invalid_argument("--q and --gamma are mutually exclusive");
  }
  if (settings.contains("tau") && settings.contains("omega-ap-ratio")) {
    throw std::invalid_argument("--tau and --omega-ap-ratio are mutually exclusive");
  }

  MachineParams& p = c.base;
  p.osc.omega_m = get("omega-m", 1e6L);
  if (settings.contains("gamma")) {
    p.osc.gamma = get("gamma", 0);
  } else {
    const real q = get("q", 1e6L);
    if (!(q > 0)) throw std::invalid_argument("--q must be > 0");
    p.osc.gamma = p.osc.omega_m / q;
  }
  p.n_h = get("n-h", 4e4L);
  p.n_c = get("n-c", 0);
  p.coupling.epsilon = get("eps", 0);
  p.mu = get("mu", 1);
  if (settings.contains("tau")) {
    p.tau = get("tau", 0);
  } else {
    const real ratio = get("omega-ap-ratio", 1e3L);
    if (!(ratio > 0)) throw std::invalid_argument("--omega-ap-ratio must be > 0");
    p.tau = MachineParams::tau_for_rate(ratio * p.osc.omega_m);
  }

  if (const std::string* m = single(settings, "model")) {
    if (*m == "io") {
      c.models = ModelSelect::Io;
    } else if (*m == "rwa") {
      c.models = ModelSelect::Rwa;
    } else if (*m == "both") {
      c.models = ModelSelect::Both;
    } else {
      throw std::invalid_argument("--model must be io, rwa or both");
    }
  }
  p.model = c.models == ModelSelect::Rwa ? BathModel::Rwa : BathModel::IndependentOscillator;

  if (const auto it = settings.find("sweep"); it != settings.end()) {
    for (const auto& s : it->second) c.sweeps.push_back(parse_sweep(s));
  }
  if (c.sweeps.size() > 2) throw std::invalid_argument("--sweep: at most two variables");
  if (c.sweeps.size() == 2 && c.sweeps[0].variable == c.sweeps[1].variable) {
    throw std::invalid_argument("--sweep: variables must be distinct");
  }
  if (const auto it = settings.find("hold"); it != settings.end()) {
    for (const auto& h : it->second) c.holds.push_back(parse_hold(h));
  }

  if (const std::string* v = single(settings, "out")) c.out = *v;
  if (const std::string* v = single(settings, "seed")) c.seed = parse_u64(*v, "--seed");
  if (const std::string* v = single(settings, "threads")) {
    c.threads = static_cast<unsigned>(parse_u64(*v, "--threads"));
  }
  if (const std::string* v = single(settings, "inject-fault")) {
    if (*v != "vh-xp-sign") throw std::invalid_argument("--inject-fault: unknown fault");
    c.inject_fault = *v;
  }

  validate(p);
  return c;
}

void apply_variable(MachineParams& p, std::string_view variable, real value) {
  if (variable == "mu") {
    p.mu = value;
  } else if (variable == "omega_ap") {
    p.tau = MachineParams::tau_for_rate(value);
  } else if (variable == "omega_ap_ratio") {
    p.tau = MachineParams::tau_for_rate(value * p.osc.omega_m);
  } else if (variable == "epsilon") {
    p.coupling.epsilon = value;
  } else if (variable == "n_c") {
    p.n_c = value;
  } else if (variable == "n_h") {
    p.n_h = value;
  } else if (variable == "tau") {
    p.tau = value;
  } else if (variable == "gamma") {
    p.osc.gamma = value;
  } else {
    throw std::invalid_argument("unknown sweep variable '" + std::string(variable) + "'");
  }
}

void apply_hold(MachineParams& p, const HoldSpec& hold) {
  if (hold.expr == "omega_m/gamma_eff") {
    // gamma_eff = epsilon omega_ap / pi
    p.coupling.epsilon = kPi * p.osc.omega_m / (hold.value * p.omega_ap());
  } else if (hold.expr == "gamma_eff") {
    p.coupling.epsilon = kPi * hold.value / p.omega_ap();
  } else if (hold.expr == "n_c/n_h") {
    p.n_c = hold.value * p.n_h;
  } else if (hold.expr == "q") {
    p.osc.gamma = p.osc.omega_m / hold.value;
  } else {
    throw std::invalid_argument("unsupported hold '" + hold.expr + "'");
  }
}

std::vector<GridPoint> expand_grid(const RunConfig& config) {
  std::vector<std::vector<real>> axes;
  for (const auto& s : config.sweeps) axes.push_back(s.values());

  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();

  std::vector<GridPoint> grid(total);
  for (std::size_t i = 0; i < total; ++i) {
    GridPoint& g = grid[i];
    g.index = i;
    g.params = config.base;
    g.coords.resize(axes.size());
    std::size_t rem = i;
    for (std::size_t k = axes.size(); k-- > 0;) {
      g.coords[k] = axes[k][rem % axes[k].size()];
      rem /= axes[k].size();
    }
    for (std::size_t k = 0; k < axes.size(); ++k) {
      apply_variable(g.params, config.sweeps[k].variable, g.coords[k]);
    }
    for (const auto& h : config.holds) apply_hold(g.params, h);
  }
  return grid;
}

}  // namespace qhm::cli
