#include "qhm/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qhm/cli/csv.hpp"
#include "qhm/errors.hpp"
#include "qhm/steadystate.hpp"
#include "qhm/thermo.hpp"

namespace qhm::cli {
namespace {

real rel_gap(const Mat2& a, const Mat2& b) {
  const real scale = b.max_abs();
  return scale > 0 ? (a - b).max_abs() / scale : (a - b).max_abs();
}

real rel_gap(const Covar2& a, const Covar2& b) {
  const real scale = b.max_abs();
  return scale > 0 ? (a - b).max_abs() / scale : (a - b).max_abs();
}

real channel_gap(const GaussChannel& a, const GaussChannel& b) {
  return std::max(rel_gap(a.m, b.m), rel_gap(a.n, b.n));
}

std::vector<real> log_grid(real lo, real hi, int count) {
  std::vector<real> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1));
  }
  return out;
}

// Least-squares slope of log|y| against log x.
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

std::string fmt(real v) { return format_real(v); }

CheckResult check_oracle(const HotChannelFn& hot) {
  real worst = 0;
  for (real gt : log_grid(1e-6L, 3, 8)) {
    for (real wt : log_grid(1e-4L, 3, 8)) {
      const OscillatorParams osc{wt, gt};
      const GaussChannel ref = ode_oracle_channel(wt, gt, 10, 1, 1.0L / 4000);
      worst = std::max(worst, channel_gap(hot(osc, 10, 1), ref));
    }
  }
  return {"hot channel vs ODE oracle (8x8 grid)", worst <= 1e-8L, "max rel gap " + fmt(worst)};
}

CheckResult check_noise_identity(const HotChannelFn& hot, Rng& rng) {
  // Stationarity of the thermal state forces V_H = (2n + 1)(I - M M^T).
  real worst = 0;
  for (int i = 0; i < 200; ++i) {
    const OscillatorParams osc{1, rng.log_uniform(1e-6L, 5)};
    const real t = rng.log_uniform(1e-4L, 5);
    const real n = rng.log_uniform(1, 1e5L);
    const GaussChannel ch = hot(osc, n, t);
    const Covar2 expect = Covar2::thermal(n) - congruence(ch.m, Covar2::thermal(n));
    // The reference itself cancels down from 2n + 1; allow for that rounding.
    const real floor = 64 * std::numeric_limits<real>::epsilon() * (2 * n + 1);
    worst = std::max(worst, (ch.n - expect).max_abs() / (expect.max_abs() + floor / 1e-9L));
  }
  return {"thermal stationarity of the hot channel", worst <= 1e-9L,
          "max rel gap " + fmt(worst)};
}

CheckResult check_semigroup(const HotChannelFn& hot, Rng& rng) {
  real worst = 0;
  for (int i = 0; i < 200; ++i) {
    const OscillatorParams osc{1, rng.log_uniform(1e-6L, 5)};
    const real t1 = rng.log_uniform(1e-4L, 2), t2 = rng.log_uniform(1e-4L, 2);
    const real n = rng.log_uniform(1, 1e5L);
    const GaussChannel joint = hot(osc, n, t1 + t2);
    const GaussChannel split = compose(hot(osc, n, t2), hot(osc, n, t1));
    worst = std::max(worst, channel_gap(split, joint));
  }
  return {"hot channel semigroup", worst <= 1e-10L, "max rel gap " + fmt(worst)};
}

CheckResult check_short_time(const HotChannelFn& hot) {
  const OscillatorParams osc{1e6L, 1};
  const real n = 4e4L;
  const std::vector<real> ts = log_grid(1e-12L, 1e-9L, 7);
  std::vector<real> xx, xp, pp;
  real worst_lead = 0;
  for (real t : ts) {
    const Covar2 v = hot(osc, n, t).n;
    xx.push_back(v.xx);
    xp.push_back(v.xp);
    pp.push_back(v.pp);
    worst_lead = std::max(worst_lead, rel_gap(v, short_time_vh(osc, n, t)));
  }
  const real s3 = loglog_slope(ts, xx), s2 = loglog_slope(ts, xp), s1 = loglog_slope(ts, pp);
  const bool slopes = std::fabs(s3 - 3) <= 0.15L && std::fabs(s2 - 2) <= 0.1L &&
                      std::fabs(s1 - 1) <= 0.05L;
  return {"short-time noise scaling", slopes && worst_lead <= 1e-2L,
          "slopes " + fmt(s3) + " " + fmt(s2) + " " + fmt(s1) + ", leading-order gap " +
              fmt(worst_lead)};
}

CheckResult check_sylvester(Rng& rng) {
  real worst = 0;
  for (int i = 0; i < 200; ++i) {
    const ContractionInstance c = random_contraction(rng);
    const Covar2 direct = solve_direct(c.m, c.v_add);
    const Covar2 iter = solve_iterative(c.m, c.v_add).v;
    worst = std::max(worst, rel_gap(iter, direct));
  }
  const Covar2 half = solve_direct(Mat2::diag(0.5L, 0.5L), Covar2::identity());
  const real half_gap = (half - Covar2::scalar(4.0L / 3)).max_abs();
  return {"steady-state solver direct vs iterative", worst <= 1e-9L && half_gap <= 1e-11L,
          "max rel gap " + fmt(worst) + ", (1/2)I case gap " + fmt(half_gap)};
}

CheckResult check_first_law(Rng& rng) {
  real worst = 0;
  int failures = 0;
  for (int i = 0; i < 500; ++i) {
    const BathModel model = i % 2 ? BathModel::Rwa : BathModel::IndependentOscillator;
    try {
      const CycleLedger l = cycle_ledger(random_regime_point(rng, model));
      const real scale = std::max({std::fabs(l.w), std::fabs(l.q_h), std::fabs(l.q_c),
                                   real(1e-30)});
      worst = std::max(worst, std::fabs(l.w + l.q_h + l.q_c_direct) / scale);
    } catch (const Error&) {
      ++failures;
    }
  }
  return {"first-law closure (500 draws)", worst <= 1e-9L && failures == 0,
          "max rel residual " + fmt(worst) + ", failures " + std::to_string(failures)};
}

CheckResult check_nogo(Rng& rng, unsigned threads) {
  std::vector<MachineParams> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back(random_regime_point(rng, BathModel::Rwa));
  const NoGoScanReport r = rwa_nogo_scan(grid, BathModel::Rwa, threads);
  const bool ok = r.count(Phase::Engine) == 0 && r.count(Phase::Fridge) == 0 && r.failures == 0;
  return {"RWA no-go scan (1000 points)", ok,
          "engine " + std::to_string(r.count(Phase::Engine)) + ", fridge " +
              std::to_string(r.count(Phase::Fridge)) + ", pump " +
              std::to_string(r.count(Phase::Pump)) + ", failures " +
              std::to_string(r.failures)};
}

}  // namespace

real Rng::log_uniform(real lo, real hi) {
  return std::exp(uniform(std::log(lo), std::log(hi)));
}

MachineParams random_regime_point(Rng& rng, BathModel model) {
  MachineParams p;
  p.model = model;
  p.osc.omega_m = 1e6L;
  p.coupling.epsilon = real(0.5) * (1 - rng.uniform());
  p.osc.gamma = p.osc.omega_m * rng.log_uniform(1e-7L, 1e-3L);
  p.tau = rng.log_uniform(1e-4L, 0.1L) / p.osc.omega_m;
  p.n_h = rng.log_uniform(1e2L, 1e6L);
  p.n_c = p.n_h * rng.uniform(0.1L, 0.99L);
  p.mu = rng.log_uniform(0.1L, 100);
  return p;
}

ContractionInstance random_contraction(Rng& rng) {
  ContractionInstance c;
  c.m = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  const real rho = std::max(spectral_radius(c.m), real(1e-3));
  c.m = (rng.uniform(0.05L, 0.95L) / rho) * c.m;
  const Mat2 a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  c.v_add = congruence(a, Covar2::identity()) + Covar2::scalar(rng.uniform(0.01L, 1));
  return c;
}

HotChannelFn hot_channel_under_test(std::string_view fault) {
  if (fault == "vh-xp-sign") {
    return [](const OscillatorParams& osc, real n, real t) {
      GaussChannel ch = hot_channel_io(osc, n, t);
      ch.n.xp = -ch.n.xp;
      return ch;
    };
  }
  return [](const OscillatorParams& osc, real n, real t) { return hot_channel_io(osc, n, t); };
}

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
  const HotChannelFn hot = hot_channel_under_test(opts.fault);
  Rng rng(opts.seed);
  std::vector<CheckResult> out;
  auto guarded = [&](auto&& check) {
    try {
      out.push_back(check());
    } catch (const std::exception& e) {
      out.push_back({"(check aborted)", false, e.what()});
    }
  };
  guarded([&] { return check_oracle(hot); });
  guarded([&] { return check_noise_identity(hot, rng); });
  guarded([&] { return check_semigroup(hot, rng); });
  guarded([&] { return check_short_time(hot); });
  guarded([&] { return check_sylvester(rng); });
  guarded([&] { return check_first_law(rng); });
  guarded([&] { return check_nogo(rng, opts.threads); });
  return out;
}

int report_verify(const std::vector<CheckResult>& results, std::ostream& os) {
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  int failed = 0;
  for (const auto& r : results) {
    os << (r.pass ? "PASS  " : "FAIL  ") << r.name << std::string(width - r.name.size() + 2, ' ')
       << r.detail << '\n';
    if (!r.pass) ++failed;
  }
  os << (failed ? "verify: " + std::to_string(failed) + " check(s) failed\n"
                : std::string("verify: all checks passed\n"));
  return failed ? 1 : 0;
}

}  // namespace qhm::cli
