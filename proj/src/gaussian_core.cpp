#include "qhm/gaussian_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qhm {

Mat2 Mat2::inverse() const {
  const real d = det();
  if (d == 0 || !std::isfinite(d)) {
    throw std::domain_error("Mat2::inverse: singular matrix");
  }
  return {pp / d, -xp / d, -px / d, xx / d};
}

real Mat2::max_abs() const {
  return std::max({std::fabs(xx), std::fabs(xp), std::fabs(px), std::fabs(pp)});
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.xx * b.xx + a.xp * b.px, a.xx * b.xp + a.xp * b.pp,
          a.px * b.xx + a.pp * b.px, a.px * b.xp + a.pp * b.pp};
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
  return {a.xx + b.xx, a.xp + b.xp, a.px + b.px, a.pp + b.pp};
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
  return {a.xx - b.xx, a.xp - b.xp, a.px - b.px, a.pp - b.pp};
}

Mat2 operator*(real s, const Mat2& a) {
  return {s * a.xx, s * a.xp, s * a.px, s * a.pp};
}

real Covar2::max_abs() const {
  return std::max({std::fabs(xx), std::fabs(xp), std::fabs(pp)});
}

bool Covar2::is_psd(real tol) const {
  const real slack = tol * max_abs();
  return xx >= -slack && pp >= -slack && det() >= -slack * max_abs();
}

Covar2 operator+(const Covar2& a, const Covar2& b) {
  return {a.xx + b.xx, a.xp + b.xp, a.pp + b.pp};
}

Covar2 operator-(const Covar2& a, const Covar2& b) {
  return {a.xx - b.xx, a.xp - b.xp, a.pp - b.pp};
}

Covar2 operator*(real s, const Covar2& a) {
  return {s * a.xx, s * a.xp, s * a.pp};
}

Covar2 congruence(const Mat2& m, const Covar2& v) {
  // Rows of m as (a, b) and (c, d).
  const real a = m.xx, b = m.xp, c = m.px, d = m.pp;
  return {a * a * v.xx + 2 * a * b * v.xp + b * b * v.pp,
          a * c * v.xx + (a * d + b * c) * v.xp + b * d * v.pp,
          c * c * v.xx + 2 * c * d * v.xp + d * d * v.pp};
}

Covar2 apply(const GaussChannel& ch, const Covar2& v) {
  return congruence(ch.m, v) + ch.n;
}

GaussChannel compose(const GaussChannel& outer, const GaussChannel& inner) {
  return {outer.m * inner.m, congruence(outer.m, inner.n) + outer.n};
}

Mat2 rotation(real theta) {
  const real c = std::cos(theta);
  const real s = std::sin(theta);
  return {c, s, -s, c};
}

Mat2 squeeze_map(real mu) {
  if (!(mu > 0) || !std::isfinite(mu)) {
    throw std::invalid_argument("squeeze_map: mu must be finite and > 0, got " +
                                std::to_string(static_cast<double>(mu)));
  }
  return Mat2::diag(1 / mu, mu);
}

bool is_physical_state(const Covar2& v, real tol) {
  if (!(v.xx > 0) || !(v.pp > 0)) return false;
  const real d = v.det();
  return d > 0 && d >= 1 - tol;
}

real occupancy_of(const Covar2& v) { return (std::sqrt(v.det()) - 1) / 2; }

}  // namespace qhm
