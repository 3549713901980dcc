#pragma once

// Per-cycle energetics of the squeeze-rotate-squeeze machine in units of
// mechanical quanta. Positive values are energy flowing into the oscillator.
//
//   W   = 1/4 Tr{V1 - Vss + V4 - V3}     (both unitary squeezers)
//   Q_H = 1/4 Tr{V3 - V2}                (hot evolution)
//   Q_C = -(W + Q_H)                     (no net change over a cycle)
//
// Q_C is also evaluated directly as 1/4 Tr{Vss - V4 + V2 - V1}; the two must
// agree or the ledger is rejected.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qhm/bath_models.hpp"
#include "qhm/protocol.hpp"
#include "qhm/steadystate.hpp"

namespace qhm {

enum class Phase { Engine, Pump, Fridge, Trivial };

std::string_view to_string(Phase phase);

/// Relative agreement required between the two cold-heat evaluations.
inline constexpr real kLedgerTol = 1e-9L;
/// Default phase deadband per quantum of hot-bath occupancy.
inline constexpr real kDeadbandPerQuantum = 1e-12L;
/// Relative slack allowed when checking a COP against its Carnot bound.
inline constexpr real kCopSlack = 1e-6L;

struct CopResult {
  real value{0};
  real bound{0};
  bool within_bound{true};
};

struct CycleLedger {
  real w{0};
  real q_h{0};
  real q_c{0};         // -(W + Q_H)
  real q_c_direct{0};  // 1/4 Tr{Vss - V4 + V2 - V1}
  Phase phase{Phase::Trivial};
  std::optional<CopResult> cop;  // empty for Trivial
  real n_ss{0};
  CycleStates states;
};

struct LedgerOptions {
  /// Phase deadband in quanta; defaults to kDeadbandPerQuantum * n_h.
  std::optional<real> deadband;
  TemperatureConvention temperature = TemperatureConvention::HighTemperature;
};

real default_deadband(const MachineParams& p);

/// Steady-state energetics of one cycle. Propagates NoUniqueSteadyState and
/// UnphysicalState; throws LedgerInconsistent when the two Q_C evaluations
/// disagree beyond kLedgerTol (plus a rounding floor).
CycleLedger cycle_ledger(const MachineParams& p, const LedgerOptions& opts = {});

/// Engine: W < -d and Q_H > d. Fridge: Q_C > d and W > d.
/// Pump: Q_H < -d, W > d and Q_C <= d. Otherwise Trivial.
Phase classify_phase(real w, real q_h, real q_c, real deadband);
Phase classify_phase(const CycleLedger& ledger, real deadband);

/// Carnot efficiency 1 - T_C / T_H.
real carnot_efficiency(const MachineParams& p,
                       TemperatureConvention convention =
                           TemperatureConvention::HighTemperature);

/// Coefficient of performance of the ledger's phase with its Carnot bound:
/// pump |Q_H/W| <= 1/eta, engine |W/Q_H| <= eta, fridge |Q_C/W| <= (1-eta)/eta.
/// Throws TrivialPhase for Trivial ledgers.
CopResult cop(const CycleLedger& ledger, const MachineParams& p,
              TemperatureConvention convention =
                  TemperatureConvention::HighTemperature);

/// |Q_H / W| whenever heat is being pushed into the hot bath (Q_H < 0,
/// W > 0), whatever the phase label; this is the quantity plotted as the
/// heat-pump COP, and exceeds 1 only where the cycle also refrigerates.
std::optional<real> heat_pumping_cop(const CycleLedger& ledger);

enum class CriterionForm { Simplified, Expanded };

/// Engine condition on the exact steady-state occupancy:
/// n_h > mu^2 n_ss for mu > 1, n_h < mu^2 n_ss for mu < 1, false at mu = 1.
/// The expanded form keeps the first-order epsilon correction.
bool engine_criterion(const MachineParams& p,
                      CriterionForm form = CriterionForm::Simplified);
bool engine_criterion(const MachineParams& p, real n_ss,
                      CriterionForm form = CriterionForm::Simplified);

/// Refrigeration condition: n_c > (n_ss / 2)(1 + mu^2), or in expanded form
/// n_c (2 - 2e + e^2) > n_ss (1 + (1 - e)^2 mu^2).
bool fridge_criterion(const MachineParams& p,
                      CriterionForm form = CriterionForm::Simplified);
bool fridge_criterion(const MachineParams& p, real n_ss,
                      CriterionForm form = CriterionForm::Simplified);

/// K = Tr V / sqrt(det V); mu^2 + mu^-2 for vacuum squeezed by mu.
/// Throws std::invalid_argument unless v is positive definite.
real squeezing_proxy(const Covar2& v);

/// Coefficients of the exact RWA engine condition mu^4 + B mu^2 + 1 < 0.
struct RwaEngineCoefficients {
  real a{0}, b{0}, c{0}, d{0};
  real big_b{0};

  /// a > 0, b > 0, c >= 0, d >= 0 and B >= 2 (within `tol`).
  bool forbids_engine(real tol = 1e-9L) const;
};

/// Throws ParameterOutOfDomain unless 0 < epsilon < 1, gamma * tau > 0 and
/// sin(w tau) != 0.
RwaEngineCoefficients rwa_engine_coefficients(const MachineParams& p);

/// Whether x^2 + B x + 1 < 0 has a solution with x = mu^2 > 0.
bool engine_condition_has_solution(real big_b);

struct ScanPoint {
  std::size_t index{0};
  MachineParams params;
  real w{0}, q_h{0}, q_c{0};
  Phase phase{Phase::Trivial};
};

struct NoGoScanReport {
  std::size_t points{0};
  std::array<std::size_t, 4> phase_counts{};  // indexed by Phase
  std::size_t failures{0};                    // points with no usable ledger
  std::vector<ScanPoint> violations;          // Engine or Fridge points

  std::size_t count(Phase phase) const {
    return phase_counts[static_cast<std::size_t>(phase)];
  }
};

/// Runs the full ledger at every grid point under `model` (RWA by default)
/// and collects every Engine or Fridge classification. Deadband is
/// kDeadbandPerQuantum * n_h per point. Results do not depend on `threads`.
NoGoScanReport rwa_nogo_scan(std::span<const MachineParams> grid,
                             BathModel model = BathModel::Rwa,
                             unsigned threads = 0);

}  // namespace qhm
