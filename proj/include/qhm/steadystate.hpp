#pragma once

// Cyclic steady state V = M V M^T + N of the cycle map, plus the analytic
// occupancy and optimal-squeezing approximations valid for
// {Q, n_h} >> 1 >> {w tau, epsilon}.

#include <cstdint>

#include "qhm/gaussian_core.hpp"
#include "qhm/protocol.hpp"

namespace qhm {

/// Relative fixed-point residual the direct solver must reach.
inline constexpr real kSteadyStateTol = 1e-10L;
/// Spectral radius at or above 1 - kContractionMargin counts as no contraction.
inline constexpr real kContractionMargin = 1e-12L;

enum class SolveMethod { Direct, Iterative };

struct SteadyStateResult {
  Covar2 v_ss;
  real n_ss{0};
  real residual{0};
  SolveMethod method{SolveMethod::Direct};
};

real spectral_radius(const Mat2& m);

/// ||V - (m V m^T + v_add)||_max / ||V||_max.
real fixed_point_residual(const Mat2& m_hom, const Covar2& v_add,
                          const Covar2& v);

/// Solves V = m V m^T + v_add as a 3x3 linear system on (xx, xp, pp).
/// Throws NoUniqueSteadyState when the spectral radius of m_hom is not
/// below 1 - kContractionMargin.
Covar2 solve_direct(const Mat2& m_hom, const Covar2& v_add);

struct IterativeSolution {
  Covar2 v;
  std::uint64_t iterations{0};  // doubling steps taken
};

/// Fixed-point iteration V <- m V m^T + v_add from V = 0, accelerated by
/// doubling: step k replaces (V, M) with (V + M V M^T, M M), so after k
/// steps V equals the plain iterate number 2^k. Stops when successive
/// iterates differ by less than `tol` relative. Throws MaxItersExceeded
/// after `max_iters` steps and NoUniqueSteadyState if m_hom is not a
/// contraction.
IterativeSolution solve_iterative(const Mat2& m_hom, const Covar2& v_add,
                                  real tol = 1e-12L,
                                  std::uint64_t max_iters = 128);

/// (sqrt(det V) - 1) / 2. Throws UnphysicalState if det V < 1 - kPhysTol.
real effective_occupancy(const Covar2& v);

SteadyStateResult steady_state(const CycleChannels& cycle,
                               SolveMethod method = SolveMethod::Direct);
SteadyStateResult steady_state(const MachineParams& p,
                               SolveMethod method = SolveMethod::Direct);

/// Effective cold-bath damping rate epsilon * omega_ap / pi.
real gamma_eff(const MachineParams& p);

/// Detailed-balance occupancy (G n_h + g_eff n_c) / (G + g_eff).
real detailed_balance_occupancy(const MachineParams& p);

/// mu_opt^4 = 3 (omega_ap / 2 pi w)^2 [1 + g_eff n_c / (2 G n_h)].
real mu_opt_approx(const MachineParams& p);

/// Detailed-balance occupancy times (mu^-2 + mu^2 / mu_opt^4).
real n_ss_approx(const MachineParams& p);

/// Detailed-balance occupancy times (mu^-2 + mu^2) / 2; minimal at mu = 1.
real n_ss_rwa_approx(const MachineParams& p);

struct MuOptSearch {
  real mu_opt{0};
  real min_trace{0};   // trace of v_add at mu_opt
  bool unimodal{true}; // false when the bracketing scan saw several minima
};

inline constexpr real kMuSearchMin = 1e-2L;
inline constexpr real kMuSearchMax = 1e4L;

/// argmin over mu in [1e-2, 1e4] of trace(v_add(mu)), by a log-spaced scan
/// followed by golden-section refinement around the global grid minimum.
MuOptSearch mu_opt_numeric(const MachineParams& p);

}  // namespace qhm
