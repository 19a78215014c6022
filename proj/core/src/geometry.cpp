#include "hycore/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hycore::geo {

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

double safe_atanh(double u) {
  u = std::clamp(u, 0.0, kAtanhArgMax);
  return std::atanh(u);
}

void check_compatible(const PoincarePoint& x, const PoincarePoint& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("geo: dimension mismatch");
  if (!(x.curv == y.curv)) throw std::invalid_argument("geo: curvature mismatch");
}

}  // namespace

double Curvature::sqrt_c() const { return std::sqrt(c); }

double Curvature::max_norm() const {
  if (euclidean) return std::numeric_limits<double>::infinity();
  return (1.0 - kBallEps) / std::sqrt(c);
}

bool operator==(const Curvature& a, const Curvature& b) {
  return a.c == b.c && a.euclidean == b.euclidean;
}

PoincarePoint PoincarePoint::origin(std::size_t dim, Curvature curv) {
  return PoincarePoint{Vec(dim, 0.0), curv};
}

TangentVector TangentVector::at_origin(Vec v, Curvature curv) {
  return TangentVector{std::move(v), PoincarePoint::origin(0, curv)};
}

double conformal_factor(const PoincarePoint& x) {
  if (x.curv.euclidean) return 2.0;
  const double cn2 = x.curv.c * dot(x.coords, x.coords);
  if (cn2 >= 1.0) throw std::domain_error("conformal_factor: point outside the ball");
  return 2.0 / (1.0 - cn2);
}

PoincarePoint mobius_add(const PoincarePoint& x, const PoincarePoint& y) {
  check_compatible(x, y);
  const std::size_t n = x.dim();
  if (x.curv.euclidean) {
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x.coords[i] + y.coords[i];
    return PoincarePoint{std::move(out), x.curv};
  }
  const double c = x.curv.c;
  const double xx = dot(x.coords, x.coords);
  const double yy = dot(y.coords, y.coords);
  const double xy = dot(x.coords, y.coords);
  const double a = 1.0 + 2.0 * c * xy + c * yy;
  const double b = 1.0 - c * xx;
  double denom = 1.0 + 2.0 * c * xy + c * c * xx * yy;
  if (std::abs(denom) < kNormFloor) denom = denom < 0 ? -kNormFloor : kNormFloor;
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (a * x.coords[i] + b * y.coords[i]) / denom;
  return project_to_ball(std::move(out), x.curv);
}

PoincarePoint mobius_matvec(const double* m, std::size_t rows, std::size_t cols,
                            const PoincarePoint& x) {
  if (cols != x.dim()) throw std::invalid_argument("mobius_matvec: shape mismatch");
  Vec mx(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < cols; ++k) s += m[r * cols + k] * x.coords[k];
    mx[r] = s;
  }
  if (x.curv.euclidean) return PoincarePoint{std::move(mx), x.curv};

  const double nx = norm(x.coords);
  const double nmx = norm(mx);
  if (nx < kNormFloor || nmx < kNormFloor)
    return PoincarePoint::origin(rows, x.curv);

  const double sc = x.curv.sqrt_c();
  const double t = std::tanh((nmx / nx) * safe_atanh(sc * nx));
  const double scale = t / (sc * nmx);
  for (auto& v : mx) v *= scale;
  return project_to_ball(std::move(mx), x.curv);
}

PoincarePoint mobius_matvec(const std::vector<double>& m, std::size_t rows,
                            std::size_t cols, const PoincarePoint& x) {
  if (m.size() != rows * cols) throw std::invalid_argument("mobius_matvec: bad matrix size");
  return mobius_matvec(m.data(), rows, cols, x);
}

PoincarePoint exp0(const Vec& v, Curvature curv) {
  if (curv.euclidean) return PoincarePoint{v, curv};
  const double nv = norm(v);
  if (nv < kNormFloor) return PoincarePoint::origin(v.size(), curv);
  const double sc = curv.sqrt_c();
  const double scale = std::tanh(sc * nv) / (sc * nv);
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = scale * v[i];
  return project_to_ball(std::move(out), curv);
}

PoincarePoint exp0(const TangentVector& v) { return exp0(v.coords, v.base.curv); }

TangentVector log0(const PoincarePoint& y) {
  if (y.curv.euclidean) return TangentVector::at_origin(y.coords, y.curv);
  const double ny = norm(y.coords);
  if (ny < kNormFloor)
    return TangentVector::at_origin(Vec(y.dim(), 0.0), y.curv);
  const double sc = y.curv.sqrt_c();
  const double scale = safe_atanh(sc * ny) / (sc * ny);
  Vec out(y.dim());
  for (std::size_t i = 0; i < y.dim(); ++i) out[i] = scale * y.coords[i];
  return TangentVector::at_origin(std::move(out), y.curv);
}

PoincarePoint exp_at(const PoincarePoint& x, const Vec& v) {
  if (v.size() != x.dim()) throw std::invalid_argument("exp_at: dimension mismatch");
  if (x.curv.euclidean) {
    Vec out(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) out[i] = x.coords[i] + v[i];
    return PoincarePoint{std::move(out), x.curv};
  }
  const double nv = norm(v);
  if (nv < kNormFloor) return x;
  const double sc = x.curv.sqrt_c();
  const double lam = conformal_factor(x);
  const double scale = std::tanh(sc * lam * nv / 2.0) / (sc * nv);
  Vec step(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) step[i] = scale * v[i];
  return mobius_add(x, PoincarePoint{std::move(step), x.curv});
}

PoincarePoint exp_at(const TangentVector& v) { return exp_at(v.base, v.coords); }

double dist(const PoincarePoint& x, const PoincarePoint& y) {
  check_compatible(x, y);
  if (x.curv.euclidean) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) {
      const double d = x.coords[i] - y.coords[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
  PoincarePoint neg_x{Vec(x.dim()), x.curv};
  for (std::size_t i = 0; i < x.dim(); ++i) neg_x.coords[i] = -x.coords[i];
  const PoincarePoint sum = mobius_add(neg_x, y);
  const double sc = x.curv.sqrt_c();
  return (2.0 / sc) * safe_atanh(sc * norm(sum.coords));
}

double hnorm(const PoincarePoint& x) {
  if (x.curv.euclidean) return norm(x.coords);
  const double sc = x.curv.sqrt_c();
  return (2.0 / sc) * safe_atanh(sc * norm(x.coords));
}

PoincarePoint project_to_ball(Vec v, Curvature curv) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("project_to_ball: non-finite input");
  if (curv.euclidean) return PoincarePoint{std::move(v), curv};
  const double limit = curv.max_norm();
  const double nv = norm(v);
  if (nv >= limit) {
    const double scale = limit / nv;
    for (auto& x : v) x *= scale;
  }
  return PoincarePoint{std::move(v), curv};
}

}  // namespace hycore::geo
