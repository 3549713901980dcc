#include "qhm/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qhm/errors.hpp"
#include "qhm/parallel.hpp"

namespace qhm {
namespace {

real quarter_trace_diff(const Covar2& a, const Covar2& b) {
  return ((a.xx - b.xx) + (a.pp - b.pp)) / 4;
}

// Rounding noise of a quarter-trace difference between states of this size.
real rounding_floor(const CycleStates& s) {
  real scale = 0;
  for (const Covar2& v : s.all()) scale = std::max(scale, std::fabs(v.trace()));
  return 64 * std::numeric_limits<real>::epsilon() * scale;
}

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Engine: return "engine";
    case Phase::Pump: return "pump";
    case Phase::Fridge: return "fridge";
    case Phase::Trivial: return "trivial";
  }
  return "unknown";
}

real default_deadband(const MachineParams& p) { return kDeadbandPerQuantum * p.n_h; }

CycleLedger cycle_ledger(const MachineParams& p, const LedgerOptions& opts) {
  const CycleChannels cycle = build_cycle(p);
  const SteadyStateResult ss = steady_state(cycle);

  CycleLedger out;
  out.n_ss = ss.n_ss;
  out.states = step_states(cycle, ss.v_ss);
  const CycleStates& s = out.states;

  out.w = quarter_trace_diff(s.v1, s.v_ss) + quarter_trace_diff(s.v4, s.v3);
  out.q_h = quarter_trace_diff(s.v3, s.v2);
  out.q_c = -(out.w + out.q_h);
  out.q_c_direct = quarter_trace_diff(s.v_ss, s.v4) + quarter_trace_diff(s.v2, s.v1);

  const real flows = std::max({std::fabs(out.w), std::fabs(out.q_h),
                               std::fabs(out.q_c), real(1e-30)});
  const real gap = std::fabs(out.q_c - out.q_c_direct);
  if (gap > kLedgerTol * flows + rounding_floor(s)) {
    std::ostringstream os;
    os.precision(17);
    os << "cycle ledger: Q_C = " << static_cast<double>(out.q_c)
       << " from closure but " << static_cast<double>(out.q_c_direct)
       << " from the state traces";
    throw LedgerInconsistent(os.str());
  }

  const real deadband = opts.deadband.value_or(default_deadband(p));
  out.phase = classify_phase(out, deadband);
  if (out.phase != Phase::Trivial) out.cop = cop(out, p, opts.temperature);
  return out;
}

Phase classify_phase(real w, real q_h, real q_c, real d) {
  if (w < -d && q_h > d) return Phase::Engine;
  if (q_c > d && w > d) return Phase::Fridge;
  if (q_h < -d && w > d && q_c <= d) return Phase::Pump;
  return Phase::Trivial;
}

Phase classify_phase(const CycleLedger& ledger, real deadband) {
  return classify_phase(ledger.w, ledger.q_h, ledger.q_c, deadband);
}

real carnot_efficiency(const MachineParams& p, TemperatureConvention convention) {
  return 1 - temperature_ratio(p.n_c, p.n_h, convention);
}

CopResult cop(const CycleLedger& ledger, const MachineParams& p,
              TemperatureConvention convention) {
  const real eta = carnot_efficiency(p, convention);
  const real inf = std::numeric_limits<real>::infinity();
  CopResult r;
  switch (ledger.phase) {
    case Phase::Engine:
      r.value = std::fabs(ledger.w / ledger.q_h);
      r.bound = eta;
      break;
    case Phase::Pump:
      r.value = std::fabs(ledger.q_h / ledger.w);
      r.bound = eta > 0 ? 1 / eta : inf;
      break;
    case Phase::Fridge:
      r.value = std::fabs(ledger.q_c / ledger.w);
      r.bound = eta > 0 ? (1 - eta) / eta : inf;
      break;
    case Phase::Trivial:
      throw TrivialPhase("cop: trivial phase has no coefficient of performance");
  }
  r.within_bound = r.value <= r.bound * (1 + kCopSlack);
  return r;
}

std::optional<real> heat_pumping_cop(const CycleLedger& ledger) {
  if (ledger.q_h < 0 && ledger.w > 0) return std::fabs(ledger.q_h / ledger.w);
  return std::nullopt;
}

bool engine_criterion(const MachineParams& p, CriterionForm form) {
  return engine_criterion(p, steady_state(p).n_ss, form);
}

bool engine_criterion(const MachineParams& p, real n_ss, CriterionForm form) {
  const real mu2 = p.mu * p.mu;
  if (form == CriterionForm::Simplified) {
    if (p.mu > 1) return p.n_h > mu2 * n_ss;
    if (p.mu < 1) return p.n_h < mu2 * n_ss;
    return false;
  }
  const real e = p.coupling.epsilon;
  const real mu4 = mu2 * mu2, mu6 = mu4 * mu2, mu8 = mu4 * mu4;
  const real lhs =
      n_ss * mu2 * (mu2 * n_ss - p.n_h) * (mu8 - 1) +
      2 * e * (p.n_c - 2 * n_ss * mu2) * (2 * n_ss * mu6 + p.n_h * (mu8 - 2 * mu4 - 1));
  return lhs < 0;
}

bool fridge_criterion(const MachineParams& p, CriterionForm form) {
  return fridge_criterion(p, steady_state(p).n_ss, form);
}

bool fridge_criterion(const MachineParams& p, real n_ss, CriterionForm form) {
  const real mu2 = p.mu * p.mu;
  if (form == CriterionForm::Simplified) return p.n_c > n_ss / 2 * (1 + mu2);
  const real e = p.coupling.epsilon;
  return p.n_c * (2 - 2 * e + e * e) > n_ss * (1 + (1 - e) * (1 - e) * mu2);
}

real squeezing_proxy(const Covar2& v) {
  const real det = v.det();
  if (!(v.xx > 0) || !(det > 0)) {
    throw std::invalid_argument("squeezing_proxy: covariance is not positive definite");
  }
  return v.trace() / std::sqrt(det);
}

bool RwaEngineCoefficients::forbids_engine(real tol) const {
  return a > 0 && b > 0 && c >= 0 && d >= 0 && big_b >= 2 - tol;
}

RwaEngineCoefficients rwa_engine_coefficients(const MachineParams& p) {
  const real e = p.coupling.epsilon;
  const real gt = p.osc.gamma * p.tau;
  const real s = std::sin(p.osc.omega_m * p.tau);
  if (!(e > 0 && e < 1)) {
    throw ParameterOutOfDomain("rwa_engine_coefficients: need 0 < epsilon < 1");
  }
  if (!(gt > 0) || !std::isfinite(gt)) {
    throw ParameterOutOfDomain("rwa_engine_coefficients: need gamma * tau > 0");
  }
  if (s == 0) {
    throw ParameterOutOfDomain("rwa_engine_coefficients: sin(omega_m tau) = 0");
  }

  // cos 2wt written as 1 - 2 s^2 so that the small-angle and small-loss
  // limits do not cancel.
  const real em1 = std::expm1(gt);  // e^{G tau} - 1
  const real big_e = em1 + 1;
  const real r = 1 - e;
  const real gap = em1 + e * (2 - e);  // e^{G tau} - (1 - e)^2
  const real s2 = s * s;

  RwaEngineCoefficients k;
  k.a = em1 * gap * (e * gap / s2 + 2 * r * (big_e + r));
  const real braces =
      big_e * big_e * (3 - 2 * e) - r * r * r + big_e * (e * (5 - 3 * e) - 2);
  k.b = e * (gap * gap * (em1 + 2 * e) / s2 + 2 * r * braces);
  k.c = em1 * r * (big_e + r * r) * (em1 + e);
  k.d = e * r * (big_e + r * r) * (em1 + e);

  const real hot = 2 * p.n_h + 1, cold = 2 * p.n_c + 1;
  k.big_b = (k.a * hot + k.b * cold) / (k.c * hot + k.d * cold);
  return k;
}

bool engine_condition_has_solution(real big_b) {
  // Roots of x^2 + Bx + 1 have product 1 and sum -B.
  if (big_b * big_b - 4 <= 0) return false;
  const real upper = (std::sqrt(big_b * big_b - 4) - big_b) / 2;
  return upper > 0;
}

NoGoScanReport rwa_nogo_scan(std::span<const MachineParams> grid, BathModel model,
                             unsigned threads) {
  struct Slot {
    bool ok{false};
    ScanPoint point;
  };
  std::vector<Slot> slots(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    Slot& slot = slots[i];
    slot.point.index = i;
    slot.point.params = grid[i];
    slot.point.params.model = model;
    try {
      const CycleLedger l = cycle_ledger(slot.point.params);
      slot.point.w = l.w;
      slot.point.q_h = l.q_h;
      slot.point.q_c = l.q_c;
      slot.point.phase = l.phase;
      slot.ok = true;
    } catch (const Error&) {
    } catch (const std::invalid_argument&) {
    }
  });

  NoGoScanReport report;
  report.points = grid.size();
  for (const Slot& slot : slots) {
    if (!slot.ok) {
      ++report.failures;
      continue;
    }
    ++report.phase_counts[static_cast<std::size_t>(slot.point.phase)];
    if (slot.point.phase == Phase::Engine || slot.point.phase == Phase::Fridge) {
      report.violations.push_back(slot.point);
    }
  }
  return report;
}

}  // namespace qhm
