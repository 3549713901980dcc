#include <doctest.h>

#include <numbers>
#include <stdexcept>

#include "qhm/bath_models.hpp"
#include "qhm/cli/verify.hpp"
#include "qhm/gaussian_core.hpp"
#include "test_support.hpp"

using namespace qhm;
using qhm::test::gap;
using qhm::test::rel;

namespace {

Covar2 random_state(cli::Rng& rng) {
  const Mat2 s = squeeze_map(rng.log_uniform(0.2L, 5)) * rotation(rng.uniform(0, 6.3L));
  return congruence(s, Covar2::thermal(rng.log_uniform(0.01L, 100)));
}

GaussChannel random_channel(cli::Rng& rng) {
  const Mat2 m{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  const Mat2 a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return {m, congruence(a, Covar2::identity())};
}

}  // namespace

TEST_CASE("apply") {
  CHECK(apply(GaussChannel::identity(), Covar2::identity()) == Covar2::identity());
  const Covar2 out = apply(GaussChannel::unitary(Mat2::diag(2, 0.5L)), Covar2::identity());
  CHECK(out == Covar2::diag(4, 0.25L));

  const real n = 4e4L;
  const GaussChannel hot = hot_channel_io({1, 0.1L}, n, 1);
  CHECK(rel(apply(hot, Covar2::thermal(n)), Covar2::thermal(n)) < 1e-9L);
}

TEST_CASE("compose") {
  cli::Rng rng(7);
  const GaussChannel ch = random_channel(rng);
  const GaussChannel same = compose(GaussChannel::identity(), ch);
  CHECK(same.m == ch.m);
  CHECK(same.n == ch.n);

  const GaussChannel r = compose(GaussChannel::unitary(rotation(0.3L)),
                                 GaussChannel::unitary(rotation(1.1L)));
  CHECK(gap(r.m, rotation(1.4L)) < 1e-12L);
  CHECK(r.n == Covar2::zero());

  for (int i = 0; i < 200; ++i) {
    const GaussChannel a = random_channel(rng), b = random_channel(rng), c = random_channel(rng);
    const Covar2 v = random_state(rng);
    CHECK(rel(apply(compose(a, b), v), apply(a, apply(b, v))) < 1e-15L);
    CHECK(rel(apply(compose(compose(a, b), c), v), apply(compose(a, compose(b, c)), v)) < 1e-12L);
  }
}

TEST_CASE("rotation") {
  CHECK(rotation(0) == Mat2::identity());
  CHECK(gap(rotation(std::numbers::pi_v<real> / 2), Mat2{0, 1, -1, 0}) < 1e-18L);
  cli::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const real th = rng.uniform(-10, 10);
    CHECK(gap(rotation(th) * rotation(-th), Mat2::identity()) < 1e-15L);
    CHECK(std::fabs(rotation(th).det() - 1) < 1e-12L);
  }
}

TEST_CASE("squeeze_map") {
  CHECK(squeeze_map(1) == Mat2::identity());
  CHECK(squeeze_map(2) == Mat2::diag(0.5L, 2));
  cli::Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const real mu = rng.log_uniform(1e-3L, 1e3L);
    CHECK(gap(squeeze_map(mu) * squeeze_map(1 / mu), Mat2::identity()) < 1e-15L);
    CHECK(std::fabs(squeeze_map(mu).det() - 1) < 1e-12L);
  }
  CHECK_THROWS_AS(squeeze_map(0), std::invalid_argument);
  CHECK_THROWS_AS(squeeze_map(-1), std::invalid_argument);
}

TEST_CASE("is_physical_state") {
  CHECK(is_physical_state(Covar2::identity()));
  CHECK_FALSE(is_physical_state(Covar2::scalar(0.5L)));
  CHECK(is_physical_state(Covar2::thermal(100)));
  CHECK_FALSE(is_physical_state(Covar2{-2, 0, -2}));
  CHECK(occupancy_of(Covar2::thermal(4e4L)) == doctest::Approx(4e4));
}

TEST_CASE("channels keep states positive definite") {
  cli::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    GaussChannel ch = random_channel(rng);
    if (ch.m.det() == 0) continue;
    const Covar2 out = apply(ch, random_state(rng));
    CHECK(out.xx > 0);
    CHECK(out.det() > 0);
  }
}

TEST_CASE("matrix helpers") {
  const Mat2 m{1, 2, 3, 4};
  CHECK(m.det() == -2);
  CHECK(gap(m * m.inverse(), Mat2::identity()) < 1e-18L);
  CHECK_THROWS_AS(Mat2::zero().inverse(), std::domain_error);
  CHECK(m.transposed() == Mat2{1, 3, 2, 4});
  CHECK(congruence(m, Covar2::identity()) == Covar2{5, 11, 25});
  CHECK(Covar2::diag(1, 2).is_psd());
  CHECK_FALSE((Covar2{1, 2, 1}).is_psd());
}
