#include "qhm/protocol.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qhm {

void validate(const MachineParams& p) {
  validate(p.osc);
  validate(p.coupling);
  if (!(p.n_h >= 0) || !std::isfinite(p.n_h)) {
    throw std::invalid_argument("machine: n_h must be finite and >= 0");
  }
  if (!(p.n_c >= 0) || !std::isfinite(p.n_c)) {
    throw std::invalid_argument("machine: n_c must be finite and >= 0");
  }
  if (!(p.mu > 0) || !std::isfinite(p.mu)) {
    throw std::invalid_argument("machine: mu must be finite and > 0");
  }
  if (!(p.tau > 0) || !std::isfinite(p.tau)) {
    throw std::invalid_argument("machine: tau must be finite and > 0");
  }
}

std::vector<std::string> validity_warnings(const MachineParams& p) {
  std::vector<std::string> out;
  auto note = [&](auto&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    out.push_back(os.str());
  };
  if (!in_high_occupancy_regime(p.n_h)) {
    note("n_h = ", static_cast<double>(p.n_h),
         " is below the trusted occupancy ", static_cast<double>(kMinTrustedOccupancy));
  }
  if (!in_high_occupancy_regime(p.n_c) && p.coupling.epsilon > 0 &&
      p.model == BathModel::IndependentOscillator) {
    note("n_c = ", static_cast<double>(p.n_c),
         " is below the trusted occupancy ", static_cast<double>(kMinTrustedOccupancy));
  }
  if (p.n_c >= p.n_h && p.coupling.epsilon > 0) {
    note("n_c >= n_h: the cold bath is not colder than the hot bath");
  }
  if (p.osc.omega_m * p.tau >= real(0.1)) {
    note("omega_m * tau = ", static_cast<double>(p.osc.omega_m * p.tau),
         " is not in the fast-squeezing regime (< 0.1)");
  }
  return out;
}

Mat2 rotated_unsqueeze(real mu, real theta) {
  // R diag(mu, 1/mu) R^T expanded so that mu = 1 gives I exactly.
  const Mat2 inv = squeeze_map(1 / mu);
  const real c = std::cos(theta), s = std::sin(theta);
  const real spread = inv.pp - inv.xx;  // 1/mu - mu
  return {inv.xx + spread * s * s, c * s * spread, c * s * spread,
          inv.pp - spread * s * s};
}

CycleChannels build_cycle(const MachineParams& p) {
  validate(p);
  CycleChannels c;
  c.s1 = GaussChannel::unitary(squeeze_map(p.mu));
  c.s2 = GaussChannel::unitary(rotated_unsqueeze(p.mu, p.osc.omega_m * p.tau));
  c.cold1 = cold_channel(p.model, p.coupling, p.n_c);
  c.cold2 = c.cold1;
  c.hot = hot_channel(p.model, p.osc, p.n_h, p.tau);

  const GaussChannel whole =
      compose(c.cold2, compose(c.s2, compose(c.hot, compose(c.cold1, c.s1))));
  c.m_hom = whole.m;
  c.v_add = whole.n;
  return c;
}

CycleStates step_states(const CycleChannels& cycle, const Covar2& v_ss) {
  CycleStates s;
  s.v_ss = v_ss;
  s.v1 = apply(cycle.s1, v_ss);
  s.v2 = apply(cycle.cold1, s.v1);
  s.v3 = apply(cycle.hot, s.v2);
  s.v4 = apply(cycle.s2, s.v3);
  return s;
}

CycleStates step_states(const MachineParams& p, const Covar2& v_ss) {
  return step_states(build_cycle(p), v_ss);
}

Covar2 close_cycle(const CycleChannels& cycle, const CycleStates& states) {
  return apply(cycle.cold2, states.v4);
}

}  // namespace qhm
