#include "qhm/bath_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qhm {
namespace {

constexpr real kCriticalBand = 1e-6L;
// Below this value of (w + G) t the added noise is summed from its Taylor
// series; the closed forms lose every digit of the t^3 entry there.
constexpr real kSeriesRadius = 2;

void require_time(real t, const char* who) {
  if (!(t >= 0) || !std::isfinite(t)) {
    throw std::invalid_argument(std::string(who) +
                                ": evolution time must be finite and >= 0");
  }
}

void require_occupancy(real n, const char* who) {
  if (!(n >= 0) || !std::isfinite(n)) {
    throw std::invalid_argument(std::string(who) +
                                ": occupancy must be finite and >= 0");
  }
}

bool near_critical(real omega, real gamma) {
  return std::fabs(gamma - 2 * omega) < kCriticalBand * omega;
}

// sin(x)/x and sinh(x)/x without the removable singularity.
real sinc(real x) {
  if (std::fabs(x) < 1e-4L) return 1 - x * x / 6 + x * x * x * x / 120;
  return std::sin(x) / x;
}

real sinhc(real x) {
  if (std::fabs(x) < 1e-4L) return 1 + x * x / 6 + x * x * x * x / 120;
  return std::sinh(x) / x;
}

// Noise of the momentum-damped channel divided by (2n + 1), as the series
//   2 G t sum_{j,k} a_j a_k^T / (j + k + 1),  a_{k+1} = (A t) a_k / (k + 1),
// with a_0 = (0, 1). Every term is formed from the exact Taylor coefficients
// of exp(A s) e_p, so the t^3 / t^2 / t scalings carry full relative accuracy.
Covar2 damped_noise_series(real omega, real gamma, real t) {
  constexpr int kTerms = 48;
  std::array<real, kTerms> ax{}, ap{};
  ax[0] = 0;
  ap[0] = 1;
  const real wt = omega * t, gt = gamma * t;
  int used = 1;
  for (int k = 0; k + 1 < kTerms; ++k) {
    ax[k + 1] = (wt * ap[k]) / (k + 1);
    ap[k + 1] = (-wt * ax[k] - gt * ap[k]) / (k + 1);
    used = k + 2;
    if (std::fabs(ax[k + 1]) + std::fabs(ap[k + 1]) <
        std::numeric_limits<real>::epsilon() * 1e-6L) {
      break;
    }
  }
  real sxx = 0, sxp = 0, spp = 0;
  // Sum from the smallest terms up.
  for (int s = 2 * (used - 1); s >= 0; --s) {
    const real w = real(1) / (s + 1);
    for (int j = std::max(0, s - (used - 1)); j <= std::min(s, used - 1); ++j) {
      const int k = s - j;
      sxx += ax[j] * ax[k] * w;
      sxp += ax[j] * ap[k] * w;
      spp += ap[j] * ap[k] * w;
    }
  }
  const real scale = 2 * gamma * t;
  return {scale * sxx, scale * sxp, scale * spp};
}

// Closed-form homogeneous part. `sigma2` = 1 - G^2 / 4w^2 may be negative.
Mat2 damped_homogeneous(real omega, real gamma, real t) {
  const real decay = std::exp(-gamma * t / 2);
  const real sigma2 = 1 - gamma * gamma / (4 * omega * omega);
  real c, s_over;  // cos-like term and sin(s w t) / (s w) with s = sqrt(sigma2)
  if (sigma2 >= 0) {
    const real phase = std::sqrt(sigma2) * omega * t;
    c = std::cos(phase);
    s_over = t * sinc(phase);
  } else {
    const real alpha = std::sqrt(gamma * gamma - 4 * omega * omega);
    const real half = alpha * t / 2;
    c = std::cosh(half);
    s_over = t * sinhc(half);
    if (half > 40) {
      // exp(-G t / 2) cosh(a t / 2) without overflow.
      const real slow = std::exp(-(4 * omega * omega / (gamma + alpha)) * t / 2);
      const real fast = std::exp(-(gamma + alpha) * t / 2);
      const real ch = (slow + fast) / 2, sh = (slow - fast) / 2;
      const real g_over_a = gamma / alpha, w_over_a = 2 * omega / alpha;
      return {ch + g_over_a * sh, w_over_a * sh, -w_over_a * sh,
              ch - g_over_a * sh};
    }
  }
  const real damp = gamma / 2 * s_over;
  const real couple = omega * s_over;
  return decay * Mat2{c + damp, couple, -couple, c - damp};
}

// Closed-form added noise divided by (2n + 1), underdamped branch.
Covar2 underdamped_noise(real omega, real gamma, real t) {
  const real sigma2 = 1 - gamma * gamma / (4 * omega * omega);
  const real sigma = std::sqrt(sigma2);
  const real phase = sigma * omega * t;
  const real decay = std::exp(-gamma * t);
  const real c2 = std::cos(2 * phase), s2 = std::sin(2 * phase);
  const real s = std::sin(phase);
  const real w2 = 4 * omega * omega;
  const real xx =
      1 + decay / sigma2 *
              ((gamma * gamma * c2 - 2 * gamma * sigma * omega * s2) / w2 - 1);
  const real pp =
      1 + decay / sigma2 *
              ((gamma * gamma * c2 + 2 * gamma * sigma * omega * s2) / w2 - 1);
  const real xp = gamma * decay / (sigma2 * omega) * s * s;
  return {xx, xp, pp};
}

// Closed-form added noise divided by (2n + 1), overdamped branch.
Covar2 overdamped_noise(real omega, real gamma, real t) {
  const real alpha = std::sqrt(gamma * gamma - 4 * omega * omega);
  const real a2 = alpha * alpha;
  // exp(-g t) cosh(a t) and exp(-g t) sinh(a t) through the two decay rates;
  // g - a is formed as 4w^2 / (g + a) to avoid cancellation.
  const real slow = std::exp(-(4 * omega * omega / (gamma + alpha)) * t);
  const real fast = std::exp(-(gamma + alpha) * t);
  const real ech = (slow + fast) / 2;
  const real esh = (slow - fast) / 2;
  const real decay = std::exp(-gamma * t);
  const real w2 = 4 * omega * omega;
  const real xx = 1 + (w2 * decay - gamma * gamma * ech - alpha * gamma * esh) / a2;
  const real pp = 1 + (w2 * decay - gamma * gamma * ech + alpha * gamma * esh) / a2;
  const real xp = 2 * gamma * omega / a2 * (ech - decay);
  return {xx, xp, pp};
}

GaussChannel numeric_channel(real omega, real gamma, real n, real t) {
  const real r = (omega + gamma) * t;
  const real steps = std::clamp(std::ceil(200 * r), real(4000), real(5e7));
  return ode_oracle_channel(omega, gamma, n, t, t / steps);
}

// Shared evaluation for the momentum-damped channel away from criticality.
GaussChannel damped_channel(real omega, real gamma, real n, real t) {
  const Mat2 m = damped_homogeneous(omega, gamma, t);
  Covar2 noise;
  if ((omega + gamma) * t <= kSeriesRadius) {
    noise = damped_noise_series(omega, gamma, t);
  } else if (gamma < 2 * omega) {
    noise = underdamped_noise(omega, gamma, t);
  } else {
    noise = overdamped_noise(omega, gamma, t);
  }
  return {m, (2 * n + 1) * noise};
}

}  // namespace

real OscillatorParams::quality_factor() const {
  return gamma > 0 ? omega_m / gamma : std::numeric_limits<real>::infinity();
}

void validate(const OscillatorParams& osc) {
  if (!(osc.omega_m > 0) || !std::isfinite(osc.omega_m)) {
    throw std::invalid_argument("oscillator: omega_m must be finite and > 0");
  }
  if (!(osc.gamma >= 0) || !std::isfinite(osc.gamma)) {
    throw std::invalid_argument("oscillator: gamma must be finite and >= 0");
  }
}

void validate(const ColdCoupling& coupling) {
  if (!(coupling.epsilon >= 0 && coupling.epsilon <= 1)) {
    throw std::invalid_argument("cold coupling: epsilon must lie in [0, 1]");
  }
}

real epsilon_from_lambda(real lambda) { return -std::expm1(-lambda); }

bool in_high_occupancy_regime(real occupancy) {
  return occupancy >= kMinTrustedOccupancy;
}

GaussChannel hot_channel_io(const OscillatorParams& osc, real n_h, real t) {
  validate(osc);
  require_occupancy(n_h, "hot_channel_io");
  require_time(t, "hot_channel_io");
  if (t == 0) return GaussChannel::identity();
  if (near_critical(osc.omega_m, osc.gamma)) {
    return numeric_channel(osc.omega_m, osc.gamma, n_h, t);
  }
  return damped_channel(osc.omega_m, osc.gamma, n_h, t);
}

GaussChannel hot_channel_rwa(const OscillatorParams& osc, real n_h, real t) {
  validate(osc);
  require_occupancy(n_h, "hot_channel_rwa");
  require_time(t, "hot_channel_rwa");
  const real decay = std::exp(-osc.gamma * t / 2);
  const real heat = -std::expm1(-osc.gamma * t);
  return {decay * rotation(osc.omega_m * t),
          Covar2::scalar((2 * n_h + 1) * heat)};
}

GaussChannel hot_channel(BathModel model, const OscillatorParams& osc, real n_h,
                         real t) {
  return model == BathModel::IndependentOscillator
             ? hot_channel_io(osc, n_h, t)
             : hot_channel_rwa(osc, n_h, t);
}

Covar2 short_time_vh(const OscillatorParams& osc, real n_h, real t) {
  const real g = osc.gamma, w = osc.omega_m;
  const real scale = 2 * n_h + 1;
  return scale * Covar2{real(2) / 3 * g * w * w * t * t * t, g * w * t * t,
                        2 * g * t};
}

bool short_time_regime(const OscillatorParams& osc, real t) {
  return osc.omega_m * t < real(0.1);
}

GaussChannel cold_channel_io(const ColdCoupling& coupling, real n_c) {
  validate(coupling);
  require_occupancy(n_c, "cold_channel_io");
  const real e = coupling.epsilon;
  return {Mat2::diag(1, 1 - e), Covar2::diag(0, (2 * n_c + 1) * e * (2 - e))};
}

GaussChannel cold_channel_rwa(const ColdCoupling& coupling, real n_c) {
  validate(coupling);
  require_occupancy(n_c, "cold_channel_rwa");
  const real e = coupling.epsilon;
  return {std::sqrt(1 - e) * Mat2::identity(),
          Covar2::scalar((2 * n_c + 1) * e)};
}

GaussChannel cold_channel(BathModel model, const ColdCoupling& coupling,
                          real n_c) {
  return model == BathModel::IndependentOscillator
             ? cold_channel_io(coupling, n_c)
             : cold_channel_rwa(coupling, n_c);
}

GaussChannel overdamped_channel(real omega, real gamma, real n, real t) {
  validate(OscillatorParams{omega, gamma});
  require_occupancy(n, "overdamped_channel");
  require_time(t, "overdamped_channel");
  if (!(gamma > 2 * omega) || near_critical(omega, gamma)) {
    throw std::invalid_argument(
        "overdamped_channel: requires gamma > 2 omega away from critical "
        "damping");
  }
  if (t == 0) return GaussChannel::identity();
  return damped_channel(omega, gamma, n, t);
}

GaussChannel ode_oracle_channel(real omega, real gamma, real n, real t,
                                real dt) {
  require_time(t, "ode_oracle_channel");
  if (t == 0) return GaussChannel::identity();
  if (!(dt > 0) || dt > t / 1000) {
    throw std::invalid_argument(
        "ode_oracle_channel: step must satisfy 0 < dt <= t / 1000");
  }
  const Mat2 a{0, omega, -omega, -gamma};
  const Mat2 at = a.transposed();
  const Covar2 diffusion = Covar2::diag(0, 2 * gamma * (2 * n + 1));

  struct State {
    Mat2 m;
    Covar2 v;
  };
  auto deriv = [&](const State& s) {
    const Mat2 av = a * s.v.as_mat();
    const Mat2 rate = av + s.v.as_mat() * at;
    return State{a * s.m, Covar2{rate.xx, rate.xp, rate.pp} + diffusion};
  };
  auto axpy = [](const State& s, real h, const State& k) {
    return State{s.m + h * k.m, s.v + h * k.v};
  };

  const auto steps = static_cast<long long>(std::ceil(t / dt));
  const real h = t / static_cast<real>(steps);
  State s{Mat2::identity(), Covar2::zero()};
  for (long long i = 0; i < steps; ++i) {
    const State k1 = deriv(s);
    const State k2 = deriv(axpy(s, h / 2, k1));
    const State k3 = deriv(axpy(s, h / 2, k2));
    const State k4 = deriv(axpy(s, h, k3));
    s.m = s.m + (h / 6) * (k1.m + 2 * k2.m + 2 * k3.m + k4.m);
    s.v = s.v + (h / 6) * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
  }
  return {s.m, s.v};
}

real temperature_ratio(real n_cold, real n_hot,
                       TemperatureConvention convention) {
  if (!(n_hot > 0)) {
    throw std::invalid_argument("temperature_ratio: hot occupancy must be > 0");
  }
  if (convention == TemperatureConvention::HighTemperature) {
    return n_cold / n_hot;
  }
  if (n_cold <= 0) return 0;
  // k T / hbar w = 1 / log(1 + 1/n)
  return std::log1p(1 / n_hot) / std::log1p(1 / n_cold);
}

}  // namespace qhm
