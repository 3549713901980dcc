#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qhm/bath_models.hpp"
#include "qhm/protocol.hpp"

namespace qhm::cli {

/// Deterministic uniform draws: 53 high bits of a 64-bit Mersenne twister.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  real uniform() { return static_cast<real>(engine_() >> 11) * 0x1.0p-53L; }
  real uniform(real lo, real hi) { return lo + (hi - lo) * uniform(); }
  real log_uniform(real lo, real hi);

 private:
  std::mt19937_64 engine_;
};

/// A point of the regime used for the no-go scans:
/// epsilon in (0, 0.5], gamma/omega_m in [1e-7, 1e-3] (log),
/// omega_m tau in [1e-4, 0.1] (log), n_c/n_h in [0.1, 0.99],
/// n_h in [1e2, 1e6] (log), mu in [0.1, 100] (log); omega_m = 1e6.
MachineParams random_regime_point(Rng& rng, BathModel model);

struct ContractionInstance {
  Mat2 m;
  Covar2 v_add;
};

/// Random m with spectral radius in [0.05, 0.95] and positive definite v_add.
ContractionInstance random_contraction(Rng& rng);

using HotChannelFn = std::function<GaussChannel(const OscillatorParams&, real, real)>;

/// The momentum-damped hot channel, optionally with a deliberate defect:
/// "vh-xp-sign" flips the sign of the added-noise cross term.
HotChannelFn hot_channel_under_test(std::string_view fault = {});

struct CheckResult {
  std::string name;
  bool pass{false};
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed{42};
  std::string fault;
  unsigned threads{0};
};

std::vector<CheckResult> run_verify(const VerifyOptions& opts);

/// Prints the pass/fail table; returns 0 iff every check passes.
int report_verify(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace qhm::cli
