#pragma once

#include <cstddef>
#include <vector>

namespace hycore::geo {

using Vec = std::vector<double>;

// Numerical guards near the ball boundary. Double precision loses geodesic
// accuracy fast as points approach the sphere, so every constructed point is
// kept strictly inside radius (1 - kBallEps)/sqrt(c).
inline constexpr double kBallEps = 1e-5;
inline constexpr double kAtanhArgMax = 1.0 - 1e-7;
inline constexpr double kNormFloor = 1e-15;

/// Magnitude of the negative curvature. `euclidean` is a separate ablation
/// switch that selects flat-space formulas outright; it is not c = 0
/// arithmetic (the hyperbolic formulas are never evaluated in that mode).
struct Curvature {
  double c = 1.0;
  bool euclidean = false;

  double sqrt_c() const;
  /// Largest Euclidean norm a stored point may have. Infinite when flat.
  double max_norm() const;
};

bool operator==(const Curvature& a, const Curvature& b);

/// A point of the Poincare ball. Always construct through project_to_ball
/// (or origin); the invariant ||coords|| < (1 - kBallEps)/sqrt(c) must hold.
struct PoincarePoint {
  Vec coords;
  Curvature curv;

  static PoincarePoint origin(std::size_t dim, Curvature curv);
  std::size_t dim() const { return coords.size(); }
};

/// Element of the tangent space at `base`.
struct TangentVector {
  Vec coords;
  PoincarePoint base;

  static TangentVector at_origin(Vec v, Curvature curv);
};

/// lambda_x^c = 2 / (1 - c ||x||^2). Flat mode returns the c -> 0 limit 2.
double conformal_factor(const PoincarePoint& x);

/// Gyrovector addition, result projected back into the safe ball.
PoincarePoint mobius_add(const PoincarePoint& x, const PoincarePoint& y);

/// Mobius matrix-vector product of a rows x cols row-major matrix.
/// x = 0 or Mx = 0 map to the origin.
PoincarePoint mobius_matvec(const double* m, std::size_t rows, std::size_t cols,
                            const PoincarePoint& x);
PoincarePoint mobius_matvec(const std::vector<double>& m, std::size_t rows,
                            std::size_t cols, const PoincarePoint& x);

/// Exponential map based at the origin; exp0(0) = 0.
PoincarePoint exp0(const Vec& v, Curvature curv);
PoincarePoint exp0(const TangentVector& v);

/// Logarithmic map to the tangent space at the origin; inverse of exp0.
TangentVector log0(const PoincarePoint& y);

/// Exponential map based at x, composed through mobius_add.
PoincarePoint exp_at(const PoincarePoint& x, const Vec& v);
PoincarePoint exp_at(const TangentVector& v);

/// Geodesic distance, (2/sqrt(c)) atanh(sqrt(c) ||(-x) + y||) with the
/// Mobius sum inside; Euclidean distance in flat mode.
double dist(const PoincarePoint& x, const PoincarePoint& y);

/// Hyperbolic norm, equal to dist(origin, x).
double hnorm(const PoincarePoint& x);

/// Radially clamps v into the safe ball. Rejects non-finite input.
PoincarePoint project_to_ball(Vec v, Curvature curv);

}  // namespace hycore::geo
