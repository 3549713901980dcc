#pragma once

// Single-mode Gaussian algebra over the quadrature pair (X, P).
//
// Conventions: [X, P] = 2i, so the vacuum covariance is the identity and a
// thermal state of occupancy n has covariance (2n + 1) I. All states are
// zero-mean; only second moments are tracked.
//
// Scalars are `long double`. Per-cycle heat flows in the squeeze-rotate-
// squeeze machine are ~1e-8 of the stored state energy at typical operating
// points, and the energy bookkeeping is differenced at that scale.

namespace qhm {

using real = long double;

/// Relative tolerance on det(V) >= 1 for physicality checks.
inline constexpr real kPhysTol = 1e-9L;

/// Real 2x2 matrix, row-major, rows/columns ordered (X, P).
struct Mat2 {
  real xx{0}, xp{0};
  real px{0}, pp{0};

  static constexpr Mat2 identity() { return {1, 0, 0, 1}; }
  static constexpr Mat2 zero() { return {0, 0, 0, 0}; }
  static constexpr Mat2 diag(real x, real p) { return {x, 0, 0, p}; }

  real det() const { return xx * pp - xp * px; }
  real trace() const { return xx + pp; }
  Mat2 transposed() const { return {xx, px, xp, pp}; }
  /// Throws std::domain_error when singular.
  Mat2 inverse() const;
  /// Largest |entry|.
  real max_abs() const;

  friend bool operator==(const Mat2&, const Mat2&) = default;
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator*(real s, const Mat2& a);

/// Symmetric 2x2 covariance. Only three entries are stored, so symmetry holds
/// by construction.
struct Covar2 {
  real xx{0};  // <dX^2>
  real xp{0};  // (1/2)<dX dP + dP dX>
  real pp{0};  // <dP^2>

  static constexpr Covar2 zero() { return {0, 0, 0}; }
  static constexpr Covar2 identity() { return {1, 0, 1}; }
  static constexpr Covar2 diag(real x, real p) { return {x, 0, p}; }
  static constexpr Covar2 scalar(real s) { return {s, 0, s}; }
  /// Thermal state (2n + 1) I.
  static constexpr Covar2 thermal(real occupancy) {
    return scalar(2 * occupancy + 1);
  }

  real det() const { return xx * pp - xp * xp; }
  real trace() const { return xx + pp; }
  real max_abs() const;
  Mat2 as_mat() const { return {xx, xp, xp, pp}; }

  /// Positive semidefinite up to `tol` relative to the largest entry.
  bool is_psd(real tol = 0) const;

  friend bool operator==(const Covar2&, const Covar2&) = default;
};

Covar2 operator+(const Covar2& a, const Covar2& b);
Covar2 operator-(const Covar2& a, const Covar2& b);
Covar2 operator*(real s, const Covar2& a);

/// m v m^T evaluated on the three stored entries.
Covar2 congruence(const Mat2& m, const Covar2& v);

/// Affine Gaussian map V -> m V m^T + n.
struct GaussChannel {
  Mat2 m = Mat2::identity();
  Covar2 n = Covar2::zero();

  static constexpr GaussChannel identity() { return {}; }
  static constexpr GaussChannel unitary(const Mat2& m) {
    return {m, Covar2::zero()};
  }
};

Covar2 apply(const GaussChannel& ch, const Covar2& v);

/// The channel equivalent to applying `inner` and then `outer`.
GaussChannel compose(const GaussChannel& outer, const GaussChannel& inner);

/// Phase-space rotation [[cos, sin], [-sin, cos]]; this is the lossless
/// limit of free evolution for a time theta / omega.
Mat2 rotation(real theta);

/// Unitary squeezer X -> X / mu, P -> mu P. Throws std::invalid_argument
/// unless mu > 0.
Mat2 squeeze_map(real mu);

/// True iff v is positive definite and det(v) >= 1 - tol (Heisenberg bound).
bool is_physical_state(const Covar2& v, real tol = kPhysTol);

/// Effective occupancy (sqrt(det v) - 1) / 2 with no physicality check.
real occupancy_of(const Covar2& v);

}  // namespace qhm
