#include "qhm/steadystate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qhm/errors.hpp"

namespace qhm {
namespace {

using Vec3 = std::array<real, 3>;
using Mat3 = std::array<Vec3, 3>;

Vec3 to_vec(const Covar2& v) { return {v.xx, v.xp, v.pp}; }
Covar2 to_covar(const Vec3& v) { return {v[0], v[1], v[2]}; }

// Gaussian elimination with partial pivoting.
Vec3 solve3(Mat3 a, Vec3 b) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0) {
      throw NoUniqueSteadyState("steady state: singular fixed-point system");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < 3; ++r) {
      const real f = a[r][col] / a[col][col];
      for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec3 x{};
  for (int r = 2; r >= 0; --r) {
    real s = b[r];
    for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

void require_contraction(const Mat2& m) {
  const real rho = spectral_radius(m);
  if (!(rho < 1 - kContractionMargin)) {
    std::ostringstream os;
    os.precision(17);
    os << "no unique steady state: spectral radius of the cycle map is "
       << static_cast<double>(rho);
    throw NoUniqueSteadyState(os.str());
  }
}

real relative_change(const Covar2& a, const Covar2& b) {
  const real scale = std::max(a.max_abs(), b.max_abs());
  if (scale == 0) return 0;
  return (a - b).max_abs() / scale;
}

real trace_of_added_noise(MachineParams p, real mu) {
  p.mu = mu;
  return build_cycle(p).v_add.trace();
}

}  // namespace

real spectral_radius(const Mat2& m) {
  const real half_tr = m.trace() / 2;
  const real disc = half_tr * half_tr - m.det();
  if (disc >= 0) return std::fabs(half_tr) + std::sqrt(disc);
  return std::sqrt(m.det());
}

real fixed_point_residual(const Mat2& m_hom, const Covar2& v_add,
                          const Covar2& v) {
  const Covar2 diff = v - (congruence(m_hom, v) + v_add);
  const real scale = v.max_abs();
  return scale > 0 ? diff.max_abs() / scale : diff.max_abs();
}

Covar2 solve_direct(const Mat2& m_hom, const Covar2& v_add) {
  require_contraction(m_hom);
  const real a = m_hom.xx, b = m_hom.xp, c = m_hom.px, d = m_hom.pp;
  // (I - K) vec(V) = vec(v_add), K the action of V -> m V m^T on (xx, xp, pp).
  const Mat3 system{{{1 - a * a, -2 * a * b, -b * b},
                     {-a * c, 1 - (a * d + b * c), -b * d},
                     {-c * c, -2 * c * d, 1 - d * d}}};
  Vec3 x = solve3(system, to_vec(v_add));

  // One step of iterative refinement on the residual.
  const Covar2 v = to_covar(x);
  const Covar2 r = v_add - (v - congruence(m_hom, v));
  const Vec3 dx = solve3(system, to_vec(r));
  for (int i = 0; i < 3; ++i) x[i] += dx[i];
  return to_covar(x);
}

IterativeSolution solve_iterative(const Mat2& m_hom, const Covar2& v_add,
                                  real tol, std::uint64_t max_iters) {
  require_contraction(m_hom);
  // Plain iterate 1 from V = 0 is v_add itself.
  Covar2 v = v_add;
  Mat2 power = m_hom;
  std::uint64_t steps = 1;
  while (true) {
    const Covar2 next = v + congruence(power, v);
    const real change = relative_change(next, v);
    v = next;
    if (change < tol) break;
    if (steps >= max_iters) {
      throw MaxItersExceeded("solve_iterative: no convergence within " +
                             std::to_string(max_iters) + " doubling steps");
    }
    power = power * power;
    ++steps;
  }
  return {v, steps};
}

real effective_occupancy(const Covar2& v) {
  if (!is_physical_state(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "effective_occupancy: det(V) = " << static_cast<double>(v.det())
       << " violates the uncertainty bound";
    throw UnphysicalState(os.str());
  }
  return occupancy_of(v);
}

SteadyStateResult steady_state(const CycleChannels& cycle, SolveMethod method) {
  SteadyStateResult out;
  out.method = method;
  out.v_ss = method == SolveMethod::Direct
                 ? solve_direct(cycle.m_hom, cycle.v_add)
                 : solve_iterative(cycle.m_hom, cycle.v_add).v;
  out.residual = fixed_point_residual(cycle.m_hom, cycle.v_add, out.v_ss);
  out.n_ss = effective_occupancy(out.v_ss);
  return out;
}

SteadyStateResult steady_state(const MachineParams& p, SolveMethod method) {
  return steady_state(build_cycle(p), method);
}

real gamma_eff(const MachineParams& p) {
  return p.coupling.epsilon * p.omega_ap() / kPi;
}

real detailed_balance_occupancy(const MachineParams& p) {
  const real g_eff = gamma_eff(p);
  const real total = p.osc.gamma + g_eff;
  if (!(total > 0)) {
    throw NoUniqueSteadyState(
        "detailed balance: no coupling to either bath (gamma = epsilon = 0)");
  }
  return (p.osc.gamma * p.n_h + g_eff * p.n_c) / total;
}

real mu_opt_approx(const MachineParams& p) {
  const real rate_ratio = p.omega_ap() / (2 * kPi * p.osc.omega_m);
  real cold_boost = 0;
  if (p.coupling.epsilon > 0) {
    cold_boost = gamma_eff(p) * p.n_c / (2 * p.osc.gamma * p.n_h);
  }
  return std::pow(3 * rate_ratio * rate_ratio * (1 + cold_boost), real(0.25));
}

real n_ss_approx(const MachineParams& p) {
  const real mu_opt = mu_opt_approx(p);
  const real mu2 = p.mu * p.mu;
  return detailed_balance_occupancy(p) *
         (1 / mu2 + mu2 / (mu_opt * mu_opt * mu_opt * mu_opt));
}

real n_ss_rwa_approx(const MachineParams& p) {
  const real mu2 = p.mu * p.mu;
  return detailed_balance_occupancy(p) * (1 / mu2 + mu2) / 2;
}

MuOptSearch mu_opt_numeric(const MachineParams& p) {
  validate(p);
  constexpr int kGrid = 241;  // 40 points per decade
  const real lo = std::log(kMuSearchMin), hi = std::log(kMuSearchMax);
  std::vector<real> log_mu(kGrid), tr(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    log_mu[i] = lo + (hi - lo) * i / (kGrid - 1);
    tr[i] = trace_of_added_noise(p, std::exp(log_mu[i]));
  }
  const auto best = static_cast<int>(std::min_element(tr.begin(), tr.end()) - tr.begin());
  int local_minima = 0;
  for (int i = 1; i + 1 < kGrid; ++i) {
    if (tr[i] < tr[i - 1] && tr[i] <= tr[i + 1]) ++local_minima;
  }

  MuOptSearch out;
  out.unimodal = local_minima <= 1;
  if (best == 0 || best == kGrid - 1) {
    // Minimum sits on the search boundary; report it unrefined.
    out.mu_opt = std::exp(log_mu[best]);
    out.min_trace = tr[best];
    return out;
  }

  // Golden-section search in log(mu) on the bracketing cell pair.
  const real inv_phi = (std::sqrt(real(5)) - 1) / 2;
  real a = log_mu[best - 1], b = log_mu[best + 1];
  real x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  real f1 = trace_of_added_noise(p, std::exp(x1));
  real f2 = trace_of_added_noise(p, std::exp(x2));
  while (b - a > 1e-12L) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = trace_of_added_noise(p, std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = trace_of_added_noise(p, std::exp(x2));
    }
  }
  out.mu_opt = std::exp((a + b) / 2);
  out.min_trace = trace_of_added_noise(p, out.mu_opt);
  return out;
}

}  // namespace qhm
