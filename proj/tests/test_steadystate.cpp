#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qhm/cli/verify.hpp"
#include "qhm/errors.hpp"
#include "qhm/steadystate.hpp"
#include "test_support.hpp"

using namespace qhm;
using qhm::test::gap;
using qhm::test::rel;

namespace {

MachineParams lossless(real mu) {
  MachineParams p;
  p.osc = {1e6L, 1};
  p.n_h = 4e4L;
  p.mu = mu;
  p.tau = MachineParams::tau_for_rate(1e3L * p.osc.omega_m);
  return p;
}

// omega_m / gamma_eff = 1e6 with n_c = 3e4.
MachineParams coupled(real mu, BathModel model = BathModel::IndependentOscillator) {
  MachineParams p = lossless(mu);
  p.n_c = 3e4L;
  p.coupling.epsilon = std::numbers::pi_v<real> * p.osc.omega_m / (1e6L * p.omega_ap());
  p.model = model;
  return p;
}

real n_ss(const MachineParams& p) { return steady_state(p).n_ss; }

real local_slope(real mu, MachineParams (*make)(real)) {
  const real a = n_ss(make(mu)), b = n_ss(make(2 * mu));
  return std::log(b / a) / std::log(real(2));
}

MachineParams coupled_io(real mu) { return coupled(mu); }

}  // namespace

TEST_CASE("solve_direct") {
  CHECK(solve_direct(Mat2::zero(), Covar2{2, 0.5L, 3}) == (Covar2{2, 0.5L, 3}));
  CHECK(gap(solve_direct(Mat2::diag(0.5L, 0.5L), Covar2::identity()),
            Covar2::scalar(4.0L / 3)) < 1e-15L);
  CHECK_THROWS_AS(solve_direct(rotation(0.3L), Covar2::identity()), NoUniqueSteadyState);

  MachineParams p = lossless(2);
  p.osc.gamma = 0;
  CHECK_THROWS_AS(steady_state(p), NoUniqueSteadyState);
}

TEST_CASE("solve_iterative") {
  const IterativeSolution zero = solve_iterative(Mat2::zero(), Covar2{2, 0.5L, 3});
  CHECK(zero.iterations == 1);
  CHECK(zero.v == (Covar2{2, 0.5L, 3}));

  const IterativeSolution half = solve_iterative(Mat2::diag(0.5L, 0.5L), Covar2::identity(), 1e-12L);
  CHECK(gap(half.v, Covar2::scalar(4.0L / 3)) < 1e-11L);

  CHECK_THROWS_AS(solve_iterative(Mat2::diag(0.9L, 0.9L), Covar2::identity(), 1e-12L, 2),
                  MaxItersExceeded);
  CHECK_THROWS_AS(solve_iterative(Mat2::identity(), Covar2::identity()), NoUniqueSteadyState);

  for (real mu : {0.5L, 1.0L, 16.6L, 100.0L}) {
    const CycleChannels c = build_cycle(lossless(mu));
    CHECK(rel(solve_iterative(c.m_hom, c.v_add).v, solve_direct(c.m_hom, c.v_add)) < 1e-9L);
  }
}

TEST_CASE("direct and iterative agree on random draws") {
  cli::Rng rng(31);
  real worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const BathModel model = i % 2 ? BathModel::Rwa : BathModel::IndependentOscillator;
    const CycleChannels c = build_cycle(cli::random_regime_point(rng, model));
    const Covar2 d = solve_direct(c.m_hom, c.v_add);
    worst = std::max(worst, rel(solve_iterative(c.m_hom, c.v_add).v, d));
    CHECK(fixed_point_residual(c.m_hom, c.v_add, d) < kSteadyStateTol);
  }
  CHECK(worst < 1e-9L);
}

TEST_CASE("effective_occupancy") {
  CHECK(effective_occupancy(Covar2::identity()) == 0);
  CHECK(effective_occupancy(Covar2::thermal(4e4L)) == doctest::Approx(4e4));
  CHECK(effective_occupancy(Covar2::diag(3, 27)) == doctest::Approx(4));
  CHECK_THROWS_AS(effective_occupancy(Covar2::scalar(0.5L)), UnphysicalState);
}

TEST_CASE("analytic occupancy") {
  const real mu_opt = mu_opt_approx(lossless(1));
  CHECK(mu_opt == doctest::Approx(16.60).epsilon(0.001));
  CHECK(rel(std::pow(mu_opt, 4), 3 * std::pow(1e3L / (2 * std::numbers::pi_v<real>), 2)) < 1e-15L);
  CHECK(rel(n_ss_approx(lossless(1)), 4e4L) < 1e-4L);
  CHECK(n_ss_approx(lossless(mu_opt)) == doctest::Approx(2 * 4e4 / (mu_opt * mu_opt)));
  CHECK(n_ss_approx(lossless(mu_opt)) == doctest::Approx(290).epsilon(0.01));

  MachineParams faster = lossless(1);
  faster.tau /= 2;
  CHECK(rel(mu_opt_approx(faster), std::sqrt(real(2)) * mu_opt) < 1e-15L);

  const MachineParams b = coupled(1);
  CHECK(rel(gamma_eff(b), 1) < 1e-15L);
  CHECK(rel(detailed_balance_occupancy(b), (4e4L + 3e4L) / 2) < 1e-12L);
  CHECK(n_ss_rwa_approx(b) == detailed_balance_occupancy(b));
  CHECK(rel(n_ss_rwa_approx(coupled(2)), n_ss_rwa_approx(coupled(0.5L))) < 1e-15L);
  for (real mu = 0.1L; mu < 100; mu *= 1.3L) CHECK(n_ss_rwa_approx(coupled(mu)) > 3e4L);

  MachineParams none = lossless(1);
  none.osc.gamma = 0;
  CHECK_THROWS_AS(detailed_balance_occupancy(none), NoUniqueSteadyState);
}

TEST_CASE("exact occupancy curve") {
  CHECK(std::fabs(local_slope(0.01L, lossless) + 2) < 0.1L);
  CHECK(std::fabs(local_slope(2000, lossless) - 2) < 0.1L);
  CHECK(std::fabs(local_slope(0.01L, coupled_io) + 2) < 0.1L);
  CHECK(std::fabs(local_slope(2000, coupled_io) - 2) < 0.1L);

  for (real mu = 1; mu <= 100; mu *= 1.25L) {
    CHECK(rel(n_ss_approx(lossless(mu)), n_ss(lossless(mu))) < 0.2L);
  }
  // Thermal-like steady state.
  for (real mu : {1.0L, 16.6L, 100.0L}) {
    const Covar2 v = steady_state(lossless(mu)).v_ss;
    CHECK(std::fabs(v.xx - v.pp) / v.trace() < 0.05L);
    CHECK(std::fabs(v.xp) / v.trace() < 0.05L);
  }
}

TEST_CASE("mu_opt_numeric") {
  const MuOptSearch s = mu_opt_numeric(lossless(1));
  CHECK(s.unimodal);
  CHECK(rel(s.mu_opt, mu_opt_approx(lossless(1))) < 0.02L);

  MachineParams hotter = lossless(1);
  hotter.n_h = 1e3L;
  CHECK(rel(mu_opt_numeric(hotter).mu_opt, s.mu_opt) < 1e-6L);

  const MuOptSearch b = mu_opt_numeric(coupled(1));
  CHECK(rel(b.mu_opt, mu_opt_approx(coupled(1))) < 0.05L);
}

TEST_CASE("RWA occupancy never drops below the cold bath") {
  for (int i = 0; i < 1000; ++i) {
    const real mu = std::exp(std::log(0.1L) + std::log(1000.0L) * i / 999);
    CHECK(n_ss(coupled(mu, BathModel::Rwa)) >= 3e4L * (1 - 1e-9L));
  }
}
