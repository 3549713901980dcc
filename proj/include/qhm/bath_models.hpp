#pragma once

// Gaussian channels for the oscillator's contact with its two baths.
//
// Hot bath: free damped evolution for a time t, either under the
// momentum-damped (independent-oscillator) Langevin equations
//
//   dX/dt = w P,   dP/dt = -w X - G P + sqrt(2G) xi(t)
//
// or under the rotating-wave (Born-Markov) variant, which damps and heats
// both quadratures equally.
//
// Cold bath: an instantaneous interaction obtained as the gamma -> inf,
// gamma * t = lambda fixed limit of the same equations, parametrised by the
// loss epsilon = 1 - exp(-lambda).

#include "qhm/gaussian_core.hpp"

namespace qhm {

enum class BathModel { IndependentOscillator, Rwa };

struct OscillatorParams {
  real omega_m{0};  // angular frequency, rad/s, > 0
  real gamma{0};    // energy damping rate, rad/s, >= 0

  /// omega_m / gamma (infinite when gamma == 0).
  real quality_factor() const;
};

/// Throws std::invalid_argument unless omega_m > 0 and gamma >= 0 (finite).
void validate(const OscillatorParams& osc);

struct ColdCoupling {
  real epsilon{0};  // 0 = lossless, 1 = P fully replaced by bath noise
};

/// Throws std::invalid_argument unless 0 <= epsilon <= 1.
void validate(const ColdCoupling& coupling);

/// Loss parameter of the instantaneous interaction with damping product
/// lambda = gamma * t.
real epsilon_from_lambda(real lambda);

/// Markovian Langevin equations are only trusted for occupancies >= 100.
inline constexpr real kMinTrustedOccupancy = 100;
bool in_high_occupancy_regime(real occupancy);

/// Hot-bath channel under momentum damping. Underdamped and overdamped
/// inputs use closed forms (with a power-series evaluation of the added
/// noise at short times); within 1e-6 relative of critical damping the
/// channel is integrated numerically. Throws std::invalid_argument for t < 0.
GaussChannel hot_channel_io(const OscillatorParams& osc, real n_h, real t);

/// Hot-bath channel in the rotating-wave approximation:
/// M = exp(-G t / 2) R(w t), N = (2n + 1)(1 - exp(-G t)) I.
GaussChannel hot_channel_rwa(const OscillatorParams& osc, real n_h, real t);

GaussChannel hot_channel(BathModel model, const OscillatorParams& osc, real n_h,
                         real t);

/// Leading-order added noise of the momentum-damped model,
/// (2n + 1) [[2/3 G w^2 t^3, G w t^2], [G w t^2, 2 G t]].
/// Only meaningful while short_time_regime(osc, t) holds.
Covar2 short_time_vh(const OscillatorParams& osc, real n_h, real t);
bool short_time_regime(const OscillatorParams& osc, real t);

/// Instantaneous cold interaction, momentum-damped model:
/// M = diag(1, 1 - e), N = (2n + 1) diag(0, e (2 - e)).
GaussChannel cold_channel_io(const ColdCoupling& coupling, real n_c);

/// Instantaneous cold interaction, RWA (a beamsplitter of reflectivity e):
/// M = sqrt(1 - e) I, N = (2n + 1) e I.
GaussChannel cold_channel_rwa(const ColdCoupling& coupling, real n_c);

GaussChannel cold_channel(BathModel model, const ColdCoupling& coupling,
                          real n_c);

/// Momentum-damped evolution with gamma > 2 omega (cosh/sinh form with
/// alpha = sqrt(gamma^2 - 4 omega^2)). Throws std::invalid_argument for
/// underdamped or critically damped input.
GaussChannel overdamped_channel(real omega, real gamma, real n, real t);

/// Reference channel from fixed-step RK4 integration of
///   dM/dt = A M,              M(0) = I
///   dN/dt = A N + N A^T + D,  N(0) = 0
/// with A = [[0, w], [-w, -G]] and D = diag(0, 2 G (2n + 1)).
/// Requires dt <= t / 1000 (std::invalid_argument otherwise).
GaussChannel ode_oracle_channel(real omega, real gamma, real n, real t,
                                real dt);

enum class TemperatureConvention {
  HighTemperature,  // T proportional to n (k T >> hbar w)
  BoseEinstein,     // exact inversion of n = 1 / (exp(hbar w / k T) - 1)
};

/// T_cold / T_hot for two baths at the same mode frequency.
real temperature_ratio(real n_cold, real n_hot,
                       TemperatureConvention convention =
                           TemperatureConvention::HighTemperature);

}  // namespace qhm
