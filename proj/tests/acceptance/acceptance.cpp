// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qhm/cli/csv.hpp"
#include "qhm/cli/verify.hpp"
#include "qhm/errors.hpp"
#include "qhm/parallel.hpp"
#include "qhm/steadystate.hpp"
#include "qhm/thermo.hpp"

using namespace qhm;
using cli::format_real;
using cli::Rng;

namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;  // runtime budget; exceeding it fails the criterion
  std::function<Outcome()> run;
};

std::vector<real> log_grid(real lo, real hi, int n) {
  std::vector<real> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  }
  return out;
}

std::string fmt(real v) { return format_real(v); }

// omega_m = 1e6, Q = 1e6, n_h = 4e4, omega_ap / omega_m = 1e3; the cold coupling
// is set through omega_m / gamma_eff (0 means no cold bath).
MachineParams slice(real mu, real n_c, real coupling_ratio,
                    BathModel model = BathModel::IndependentOscillator) {
  MachineParams p;
  p.osc = {1e6L, 1};
  p.n_h = 4e4L;
  p.n_c = n_c;
  p.mu = mu;
  p.tau = MachineParams::tau_for_rate(1e3L * p.osc.omega_m);
  p.coupling.epsilon =
      coupling_ratio > 0 ? std::numbers::pi_v<real> * p.osc.omega_m / (coupling_ratio * p.omega_ap())
                         : 0;
  p.model = model;
  return p;
}

MachineParams lossless(real mu) { return slice(mu, 0, 0); }
MachineParams working(real mu, BathModel model = BathModel::IndependentOscillator) {
  return slice(mu, 3e4L, 1e6L, model);
}

real exact_n_ss(const MachineParams& p) { return steady_state(p).n_ss; }

std::vector<CycleLedger> ledgers(const std::vector<MachineParams>& grid) {
  std::vector<std::optional<CycleLedger>> out(grid.size());
  parallel_for(grid.size(), 0, [&](std::size_t i) {
    try {
      out[i] = cycle_ledger(grid[i]);
    } catch (const Error&) {
    }
  });
  std::vector<CycleLedger> done;
  for (auto& l : out) {
    if (!l) throw std::runtime_error("ledger failed on a slice point");
    done.push_back(*l);
  }
  return done;
}

Outcome first_law() {
  Rng rng(1);
  std::vector<MachineParams> draws;
  for (int i = 0; i < 10000; ++i) {
    draws.push_back(cli::random_regime_point(
        rng, i % 2 ? BathModel::Rwa : BathModel::IndependentOscillator));
  }
  std::vector<real> residual(draws.size(), -1);
  parallel_for(draws.size(), 0, [&](std::size_t i) {
    try {
      const CycleLedger l = cycle_ledger(draws[i]);
      const real scale = std::max({std::fabs(l.w), std::fabs(l.q_h), std::fabs(l.q_c), real(1e-30)});
      // Q_C from its own trace expression, not from -(W + Q_H).
      residual[i] = std::fabs(l.w + l.q_h + l.q_c_direct) / scale;
    } catch (const Error&) {
    }
  });
  const auto failures = std::count(residual.begin(), residual.end(), real(-1));
  const real worst = *std::max_element(residual.begin(), residual.end());
  return {failures == 0 && worst <= 1e-9L,
          "10000 draws, max rel residual " + fmt(worst) + ", failures " + std::to_string(failures)};
}

Outcome oracle() {
  const auto gts = log_grid(1e-6L, 3, 20), wts = log_grid(1e-4L, 3, 20);
  std::vector<real> gap(400);
  parallel_for(gap.size(), 0, [&](std::size_t k) {
    const real gt = gts[k / 20], wt = wts[k % 20];
    const GaussChannel ref = ode_oracle_channel(wt, gt, 10, 1, 1.0L / 4000);
    const GaussChannel got = hot_channel_io({wt, gt}, 10, 1);
    auto rel = [](auto a, auto b) { return (a - b).max_abs() / std::max(b.max_abs(), real(1e-300)); };
    gap[k] = std::max(rel(got.m, ref.m), rel(got.n, ref.n));
  });
  const real worst = *std::max_element(gap.begin(), gap.end());
  return {worst <= 1e-8L, "20x20 grid, max rel gap " + fmt(worst)};
}

real loglog_slope(const std::vector<real>& x, const std::vector<real>& y) {
  real sx = 0, sy = 0, sxx = 0, sxy = 0;
  const real n = static_cast<real>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const real lx = std::log(x[i]), ly = std::log(std::fabs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome short_time() {
  const OscillatorParams osc{1e6L, 1};
  const auto ts = log_grid(1e-12L, 1e-9L, 7);
  std::vector<real> xx, xp, pp;
  for (real t : ts) {
    const Covar2 v = hot_channel_io(osc, 4e4L, t).n;
    xx.push_back(v.xx);
    xp.push_back(v.xp);
    pp.push_back(v.pp);
  }
  const real s3 = loglog_slope(ts, xx), s2 = loglog_slope(ts, xp), s1 = loglog_slope(ts, pp);
  const bool ok = std::fabs(s3 / 3 - 1) <= 0.05L && std::fabs(s2 / 2 - 1) <= 0.05L &&
                  std::fabs(s1 - 1) <= 0.05L;
  return {ok, "slopes xx " + fmt(s3) + ", xp " + fmt(s2) + ", pp " + fmt(s1)};
}

Outcome sylvester() {
  Rng rng(4);
  real worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const cli::ContractionInstance c = cli::random_contraction(rng);
    const Covar2 direct = solve_direct(c.m, c.v_add);
    const Covar2 iter = solve_iterative(c.m, c.v_add).v;
    worst = std::max(worst, (iter - direct).max_abs() / direct.max_abs());
  }
  const Covar2 half = solve_direct(Mat2::diag(0.5L, 0.5L), Covar2::identity());
  const real half_gap = (half - Covar2::scalar(4.0L / 3)).max_abs();
  return {worst <= 1e-9L && half_gap <= 1e-11L,
          "1000 instances, max rel gap " + fmt(worst) + ", half-identity gap " + fmt(half_gap)};
}

Outcome lossless_curve() {
  auto slope = [](real mu) {
    return std::log(exact_n_ss(lossless(2 * mu)) / exact_n_ss(lossless(mu))) / std::log(real(2));
  };
  const real low = slope(1e-2L), high = slope(2e3L);

  // Dense scan for the minimum, then golden-section refinement.
  const auto mus = log_grid(1, 100, 400);
  std::vector<real> n(mus.size());
  parallel_for(mus.size(), 0, [&](std::size_t i) { n[i] = exact_n_ss(lossless(mus[i])); });
  const auto k = static_cast<std::size_t>(std::min_element(n.begin(), n.end()) - n.begin());
  real a = std::log(mus[k == 0 ? 0 : k - 1]), b = std::log(mus[std::min(k + 1, mus.size() - 1)]);
  const real g = (std::sqrt(real(5)) - 1) / 2;
  auto f = [](real lm) { return exact_n_ss(lossless(std::exp(lm))); };
  for (int it = 0; it < 100; ++it) {
    const real c = b - g * (b - a), d = a + g * (b - a);
    (f(c) < f(d) ? b : a) = f(c) < f(d) ? d : c;
  }
  const real mu_min = std::exp((a + b) / 2), n_min = f((a + b) / 2);
  const real mu_opt = mu_opt_approx(lossless(1));
  const real predicted = n_ss_approx(lossless(mu_opt));

  const bool ok = std::fabs(low / -2 - 1) <= 0.05L && std::fabs(high / 2 - 1) <= 0.05L &&
                  std::fabs(mu_min / mu_opt - 1) <= 0.10L && std::fabs(n_min / predicted - 1) <= 0.20L;
  return {ok, "slopes " + fmt(low) + " / " + fmt(high) + ", exact minimum " + fmt(n_min) +
                  " at mu " + fmt(mu_min) + ", analytic " + fmt(predicted) + " at mu " + fmt(mu_opt)};
}

Outcome rwa_floor() {
  const auto mus = log_grid(0.1L, 100, 1000);
  std::vector<real> n(mus.size());
  parallel_for(mus.size(), 0, [&](std::size_t i) { n[i] = exact_n_ss(working(mus[i], BathModel::Rwa)); });
  const real lowest = *std::min_element(n.begin(), n.end());
  return {lowest >= 3e4L * (1 - 1e-9L), "1000 mu values, min n_ss " + fmt(lowest) + " vs n_c 30000"};
}

Outcome engine_efficiency() {
  const auto mus = log_grid(0.5L, 30, 2000);
  std::vector<MachineParams> grid;
  for (real mu : mus) grid.push_back(working(mu));
  const auto ls = ledgers(grid);
  const real eta = carnot_efficiency(grid.front());
  real peak = 0, at = 0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (ls[i].phase != Phase::Engine) continue;
    const real r = std::fabs(ls[i].w / ls[i].q_h) / eta;
    if (r > peak) peak = r, at = mus[i];
  }
  return {peak >= 0.10L && peak <= 0.30L,
          "peak |W/Q_H| / eta = " + fmt(peak) + " at mu " + fmt(at)};
}

struct PumpPeak {
  real cop{0}, mu{0}, mu_opt{0};
};

PumpPeak pump_peak(real coupling_ratio) {
  const auto mus = log_grid(0.5L, 200, 2000);
  std::vector<MachineParams> grid;
  for (real mu : mus) grid.push_back(slice(mu, 3e4L, coupling_ratio));
  const auto ls = ledgers(grid);
  PumpPeak p;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const auto c = heat_pumping_cop(ls[i]);
    if (c && *c > p.cop) p.cop = *c, p.mu = mus[i];
  }
  p.mu_opt = mu_opt_numeric(grid.front()).mu_opt;
  return p;
}

Outcome pump_cop() {
  const PumpPeak p = pump_peak(1e6L);
  const PumpPeak weak = pump_peak(1e7L);
  const bool ok = p.cop >= 1.0L && p.cop <= 1.3L && p.mu < p.mu_opt;
  return {ok, "peak |Q_H/W| = " + fmt(p.cop) + " at mu " + fmt(p.mu) + " (mu_opt " + fmt(p.mu_opt) +
                  "); for reference omega_m/gamma_eff = 1e7 gives " + fmt(weak.cop) + " at mu " +
                  fmt(weak.mu)};
}

Outcome nogo() {
  Rng rng(9);
  std::vector<MachineParams> grid;
  for (int i = 0; i < 10000; ++i) grid.push_back(cli::random_regime_point(rng, BathModel::Rwa));
  // Cover the engine and refrigerator regions of the IO phase map.
  for (real n_c : {3e4L, 3.9e4L}) {
    for (real mu : log_grid(0.5L, 50, 100)) grid.push_back(slice(mu, n_c, 1e6L));
  }
  const NoGoScanReport rwa = rwa_nogo_scan(grid, BathModel::Rwa);
  const NoGoScanReport io = rwa_nogo_scan(grid, BathModel::IndependentOscillator);

  // B over the coefficient domain: epsilon in (0, 1), omega tau in (0, pi), Gamma tau > 0.
  real min_b = std::numeric_limits<real>::infinity();
  std::size_t evaluated = 0;
  for (real e : log_grid(1e-4L, 0.999L, 30)) {
    for (real wt : log_grid(1e-4L, 3.1L, 30)) {
      for (real gt : log_grid(1e-6L, 10, 30)) {
        MachineParams p = slice(1, 1e3L, 1e6L, BathModel::Rwa);
        p.osc.omega_m = 1;
        p.tau = wt;
        p.osc.gamma = gt / wt;
        p.coupling.epsilon = e;
        min_b = std::min(min_b, rwa_engine_coefficients(p).big_b);
        ++evaluated;
      }
    }
  }
  const bool ok = rwa.count(Phase::Engine) == 0 && rwa.count(Phase::Fridge) == 0 &&
                  rwa.failures == 0 && io.count(Phase::Engine) > 0 && io.count(Phase::Fridge) > 0 &&
                  min_b >= 2 - 1e-9L;
  return {ok, std::to_string(grid.size()) + " points; RWA engine " +
                  std::to_string(rwa.count(Phase::Engine)) + " fridge " +
                  std::to_string(rwa.count(Phase::Fridge)) + " failures " +
                  std::to_string(rwa.failures) + "; IO engine " +
                  std::to_string(io.count(Phase::Engine)) + " fridge " +
                  std::to_string(io.count(Phase::Fridge)) + "; min B " + fmt(min_b) + " over " +
                  std::to_string(evaluated) + " coefficient points"};
}

Outcome criteria_agreement() {
  // The working line, plus a colder line where the refrigerator region appears.
  bool ok = true;
  std::string detail;
  for (real n_c : {3e4L, 3.9e4L}) {
    std::vector<MachineParams> grid;
    for (real mu : log_grid(0.1L, 100, 200)) grid.push_back(slice(mu, n_c, 1e6L));
    const auto ls = ledgers(grid);
    int engine_agree = 0, fridge_agree = 0, engines = 0, fridges = 0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      engines += ls[i].phase == Phase::Engine;
      fridges += ls[i].phase == Phase::Fridge;
      engine_agree += engine_criterion(grid[i], ls[i].n_ss) == (ls[i].phase == Phase::Engine);
      fridge_agree += fridge_criterion(grid[i], ls[i].n_ss) == (ls[i].phase == Phase::Fridge);
    }
    const int n = static_cast<int>(ls.size());
    ok = ok && engine_agree >= 0.9 * n && fridge_agree >= 0.9 * n;
    if (!detail.empty()) detail += "; ";
    detail += "n_c " + fmt(n_c) + ": engine " + std::to_string(engine_agree) + "/" +
              std::to_string(n) + " (" + std::to_string(engines) + " points), fridge " +
              std::to_string(fridge_agree) + "/" + std::to_string(n) + " (" +
              std::to_string(fridges) + " points)";
  }
  return {ok, detail};
}

Outcome below_cold_bath() {
  real best = std::numeric_limits<real>::infinity(), at = 0, n_ss_there = 0;
  for (real mu : log_grid(0.5L, 100, 300)) {
    const CycleLedger l = cycle_ledger(working(mu));
    if (l.n_ss >= 4e4L) continue;
    for (const Covar2& v : l.states.all()) {
      const real n = effective_occupancy(v);
      if (n < best) best = n, at = mu, n_ss_there = l.n_ss;
    }
  }
  return {best < 3e4L, "lowest snapshot occupancy " + fmt(best) + " at mu " + fmt(at) +
                           " (n_ss " + fmt(n_ss_there) + ", n_c 30000)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "first-law closure", 10, first_law},
      {2, "hot channel vs ODE oracle", 30, oracle},
      {3, "short-time noise scaling", 5, short_time},
      {4, "steady-state solver agreement", 5, sylvester},
      {5, "lossless occupancy curve", 5, lossless_curve},
      {6, "RWA occupancy floor", 30, rwa_floor},
      {7, "engine efficiency", 30, engine_efficiency},
      {8, "heat pump COP", 30, pump_cop},
      {9, "RWA no-go theorems", 60, nogo},
      {10, "analytic criteria vs ledger", 30, criteria_agreement},
      {11, "cooling below the cold bath", 30, below_cold_bath},
  };
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("aborted: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.limit_s)) + " s budget";
    }
    failed += !o.pass;
    std::printf("%s  %2d  %-30s %s  [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failed,
              criteria.size(), total);
  return failed ? 1 : 0;
}
