#include "hycore/geometry_ad.hpp"

#include <cmath>

namespace hycore::geo {

using ad::Var;

Var conformal_factor(ad::Tape& t, Var x, Curvature curv) {
  if (curv.euclidean) return t.constant(2.0);
  return ad::div(t.constant(2.0),
                 ad::sub(t.constant(1.0), ad::scale(ad::dot(x, x), curv.c)));
}

Var project_to_ball(ad::Tape& t, Var v, Curvature curv) {
  if (curv.euclidean) return v;
  const ad::Tensor& val = t.value(v);
  double n2 = 0.0;
  for (double e : val.v) n2 += e * e;
  const double limit = curv.max_norm();
  if (std::sqrt(n2) < limit) return v;
  return ad::mul(v, ad::div(t.constant(limit), ad::norm(v)));
}

Var mobius_add(ad::Tape& t, Var x, Var y, Curvature curv) {
  if (curv.euclidean) return ad::add(x, y);
  const double c = curv.c;
  Var one = t.constant(1.0);
  Var xx = ad::dot(x, x);
  Var yy = ad::dot(y, y);
  Var xy = ad::dot(x, y);
  Var two_c_xy = ad::scale(xy, 2.0 * c);
  Var a = ad::add(ad::add(one, two_c_xy), ad::scale(yy, c));
  Var b = ad::sub(one, ad::scale(xx, c));
  Var denom = ad::add(ad::add(one, two_c_xy), ad::scale(ad::mul(xx, yy), c * c));
  Var num = ad::add(ad::mul(a, x), ad::mul(b, y));
  return project_to_ball(t, ad::div(num, denom), curv);
}

Var mobius_matvec(ad::Tape& t, Var m, Var x, Curvature curv) {
  Var mx = ad::matmul(m, x);
  if (curv.euclidean) return mx;
  const double sc = curv.sqrt_c();
  Var nx = ad::norm(x);
  Var nmx = ad::norm(mx);
  Var ratio = ad::div(nmx, nx);
  Var arg = ad::mul(ratio, ad::atanh(ad::scale(nx, sc)));
  Var coef = ad::div(ad::tanh(arg), ad::scale(nmx, sc));
  return project_to_ball(t, ad::mul(coef, mx), curv);
}

Var exp0(ad::Tape& t, Var v, Curvature curv) {
  if (curv.euclidean) return v;
  const double sc = curv.sqrt_c();
  Var n = ad::norm(v);
  Var scn = ad::scale(n, sc);
  Var coef = ad::div(ad::tanh(scn), scn);
  return project_to_ball(t, ad::mul(coef, v), curv);
}

Var log0(ad::Tape&, Var y, Curvature curv) {
  if (curv.euclidean) return y;
  const double sc = curv.sqrt_c();
  Var n = ad::norm(y);
  Var scn = ad::scale(n, sc);
  Var coef = ad::div(ad::atanh(scn), scn);
  return ad::mul(coef, y);
}

Var exp_at(ad::Tape& t, Var x, Var v, Curvature curv) {
  if (curv.euclidean) return ad::add(x, v);
  const double sc = curv.sqrt_c();
  Var lam = conformal_factor(t, x, curv);
  Var n = ad::norm(v);
  Var arg = ad::scale(ad::mul(lam, n), sc / 2.0);
  Var coef = ad::div(ad::tanh(arg), ad::scale(n, sc));
  return mobius_add(t, x, ad::mul(coef, v), curv);
}

Var dist(ad::Tape& t, Var x, Var y, Curvature curv) {
  if (curv.euclidean) return ad::norm(ad::sub(x, y));
  const double sc = curv.sqrt_c();
  Var sum = mobius_add(t, ad::neg(x), y, curv);
  return ad::scale(ad::atanh(ad::scale(ad::norm(sum), sc)), 2.0 / sc);
}

Var hnorm(ad::Tape&, Var x, Curvature curv) {
  if (curv.euclidean) return ad::norm(x);
  const double sc = curv.sqrt_c();
  return ad::scale(ad::atanh(ad::scale(ad::norm(x), sc)), 2.0 / sc);
}

}  // namespace hycore::geo
