#pragma once

// One squeeze-rotate-squeeze cycle as a chain of Gaussian channels:
//
//   S1 -> cold -> hot(tau) -> S2 -> cold
//
// S1 = diag(1/mu, mu) and S2 = R S1^-1 R^T with R the rotation by w tau, so
// that without loss S2 R S1 = R. Each imperfect squeezer is a noiseless
// unitary followed by an instantaneous cold-bath interaction. A cycle
// starts immediately before S1.

#include <array>
#include <numbers>
#include <string>
#include <vector>

#include "qhm/bath_models.hpp"
#include "qhm/gaussian_core.hpp"

namespace qhm {

inline constexpr real kPi = std::numbers::pi_v<real>;

struct MachineParams {
  OscillatorParams osc;
  real n_h{0};            // hot-bath occupancy
  real n_c{0};            // cold-bath occupancy
  ColdCoupling coupling;  // cold interaction inside each squeezer
  real mu{1};             // squeezing strength, > 0
  real tau{0};            // cycle period in seconds, > 0
  BathModel model{BathModel::IndependentOscillator};

  /// Squeezer application rate 2 pi / tau.
  real omega_ap() const { return 2 * kPi / tau; }
  static real tau_for_rate(real omega_ap) { return 2 * kPi / omega_ap; }
};

/// Throws std::invalid_argument on any parameter outside its domain.
void validate(const MachineParams& p);

/// Human-readable notes for parameters that are admissible but outside the
/// regime where the bath model is trusted (low occupancy, n_c >= n_h,
/// w tau >= 0.1). Empty when none apply.
std::vector<std::string> validity_warnings(const MachineParams& p);

struct CycleChannels {
  GaussChannel s1;     // unitary squeeze, zero noise
  GaussChannel cold1;  // loss after S1
  GaussChannel hot;    // free evolution for tau
  GaussChannel s2;     // unitary unsqueeze in the rotated frame
  GaussChannel cold2;  // loss after S2
  Mat2 m_hom;          // homogeneous part of the whole cycle
  Covar2 v_add;        // noise added over the whole cycle

  GaussChannel cycle() const { return {m_hom, v_add}; }
};

/// S2 = R(theta) S1(mu)^-1 R(theta)^T.
Mat2 rotated_unsqueeze(real mu, real theta);

CycleChannels build_cycle(const MachineParams& p);

/// Covariance snapshots around one cycle.
struct CycleStates {
  Covar2 v_ss;  // start of cycle (before S1)
  Covar2 v1;    // after S1
  Covar2 v2;    // after the first cold interaction
  Covar2 v3;    // after the hot evolution
  Covar2 v4;    // after S2 (before the second cold interaction)

  std::array<Covar2, 5> all() const { return {v_ss, v1, v2, v3, v4}; }
};

CycleStates step_states(const CycleChannels& cycle, const Covar2& v_ss);
CycleStates step_states(const MachineParams& p, const Covar2& v_ss);

/// The state reached by applying the final cold interaction to v4; equals
/// v_ss when v_ss is the cyclic steady state.
Covar2 close_cycle(const CycleChannels& cycle, const CycleStates& states);

}  // namespace qhm
