#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hycore/geometry.hpp"
#include "hycore/rng.hpp"

using namespace hycore;
using geo::Curvature;
using geo::PoincarePoint;
using geo::Vec;

namespace {

Vec negated(const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
  return out;
}

double norm(const Vec& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

PoincarePoint random_in_ball(std::size_t dim, Curvature curv, rng::Engine& rng,
                             double max_frac = 0.95) {
  Vec v(dim);
  for (auto& x : v) x = rng.normal();
  const double r = max_frac * rng.uniform() / std::max(norm(v), 1e-12);
  for (auto& x : v) x *= r / curv.sqrt_c();
  return geo::project_to_ball(std::move(v), curv);
}

// Polyline length of t -> exp_at(x, t v) under the conformal metric; an
// independent check of both exp_at and dist.
double geodesic_length_quadrature(const PoincarePoint& x, const Vec& v, int segments) {
  double len = 0.0;
  PoincarePoint prev = x;
  for (int s = 1; s <= segments; ++s) {
    Vec vt(v.size());
    const double t = static_cast<double>(s) / segments;
    for (std::size_t i = 0; i < v.size(); ++i) vt[i] = t * v[i];
    PoincarePoint cur = geo::exp_at(x, vt);
    Vec mid(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      mid[i] = 0.5 * (prev.coords[i] + cur.coords[i]);
    const double lam = geo::conformal_factor(geo::project_to_ball(mid, x.curv));
    Vec step(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) step[i] = cur.coords[i] - prev.coords[i];
    len += lam * norm(step);
    prev = cur;
  }
  return len;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("conformal factor closed form") {
  for (double c : {1.0, 0.5, 2.0}) {
    const Curvature curv{c, false};
    CHECK(geo::conformal_factor(PoincarePoint::origin(3, curv)) == 2.0);
  }
  const PoincarePoint x{{0.5, 0.0}, Curvature{1.0, false}};
  CHECK(geo::conformal_factor(x) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  const PoincarePoint y{{0.5, 0.0}, Curvature{0.5, false}};
  CHECK(geo::conformal_factor(y) == doctest::Approx(16.0 / 7.0).epsilon(1e-15));

  // invariant violation upstream is a domain error
  const PoincarePoint bad{{1.5, 0.0}, Curvature{1.0, false}};
  CHECK_THROWS_AS(geo::conformal_factor(bad), std::domain_error);
}

TEST_CASE("mobius_add identities and collinear oracle") {
  const Curvature curv{1.0, false};
  rng::Engine rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const PoincarePoint x = random_in_ball(4, curv, rng);
    const PoincarePoint zero = PoincarePoint::origin(4, curv);
    const PoincarePoint right = geo::mobius_add(x, zero);
    const PoincarePoint left = geo::mobius_add(zero, x);
    const PoincarePoint inv = geo::mobius_add(PoincarePoint{negated(x.coords), curv}, x);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(right.coords[i] == doctest::Approx(x.coords[i]).epsilon(1e-9));
      CHECK(left.coords[i] == doctest::Approx(x.coords[i]).epsilon(1e-9));
      CHECK(std::abs(inv.coords[i]) < 1e-9);
    }
  }

  // collinear points add like tanh(atanh a + atanh b) along the shared ray
  const PoincarePoint x{{0.5, 0.0}, curv};
  const PoincarePoint sum = geo::mobius_add(x, x);
  const double oracle = std::tanh(std::atanh(0.5) + std::atanh(0.5));
  CHECK(oracle == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(sum.coords[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(sum.coords[1] == doctest::Approx(0.0));

  CHECK_THROWS_AS(geo::mobius_add(x, PoincarePoint::origin(3, curv)),
                  std::invalid_argument);
  CHECK_THROWS_AS(geo::mobius_add(x, PoincarePoint::origin(2, Curvature{0.5, false})),
                  std::invalid_argument);
}

TEST_CASE("mobius_matvec oracles") {
  const Curvature curv{1.0, false};
  const PoincarePoint x{{0.3, 0.0}, curv};

  const std::vector<double> identity = {1, 0, 0, 1};
  const PoincarePoint id_out = geo::mobius_matvec(identity, 2, 2, x);
  CHECK(id_out.coords[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(id_out.coords[1] == doctest::Approx(0.0));

  const std::vector<double> twice = {2, 0, 0, 2};
  const PoincarePoint two_out = geo::mobius_matvec(twice, 2, 2, x);
  const double oracle = std::tanh(2.0 * std::atanh(0.3));
  CHECK(oracle == doctest::Approx(0.6 / 1.09).epsilon(1e-12));
  CHECK(two_out.coords[0] == doctest::Approx(0.55046).epsilon(1e-4));
  CHECK(two_out.coords[0] == doctest::Approx(oracle).epsilon(1e-12));

  // origin is a fixed point; a vanishing product also maps to the origin
  const PoincarePoint zero = PoincarePoint::origin(2, curv);
  CHECK(norm(geo::mobius_matvec(twice, 2, 2, zero).coords) == 0.0);
  const std::vector<double> null_m = {0, 0, 0, 0};
  CHECK(norm(geo::mobius_matvec(null_m, 2, 2, x).coords) == 0.0);

  CHECK_THROWS_AS(geo::mobius_matvec(identity, 2, 2, PoincarePoint::origin(3, curv)),
                  std::invalid_argument);
}

TEST_CASE("exp0/log0 oracles and roundtrips") {
  const Curvature curv{1.0, false};
  CHECK(norm(geo::exp0(Vec{0, 0, 0}, curv).coords) == 0.0);
  CHECK(norm(geo::log0(PoincarePoint::origin(3, curv)).coords) == 0.0);

  const PoincarePoint half = geo::exp0(Vec{std::atanh(0.5), 0.0}, curv);
  CHECK(half.coords[0] == doctest::Approx(0.5).epsilon(1e-12));

  const auto back = geo::log0(PoincarePoint{{0.5, 0.0}, curv});
  CHECK(back.coords[0] == doctest::Approx(0.54930).epsilon(1e-5));
  CHECK(back.coords[0] == doctest::Approx(std::log(3.0) / 2.0).epsilon(1e-12));

  rng::Engine rng(2);
  for (double c : {1.0, 0.5, 0.1}) {
    const Curvature cc{c, false};
    for (int trial = 0; trial < 300; ++trial) {
      Vec v(5);
      for (auto& e : v) e = rng.normal();
      const double target = rng.uniform(0.0, 3.0);
      const double nv = norm(v);
      for (auto& e : v) e *= target / std::max(nv, 1e-12);
      const auto round = geo::log0(geo::exp0(v, cc));
      for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(round.coords[i] == doctest::Approx(v[i]).epsilon(1e-9));

      const PoincarePoint y = random_in_ball(5, cc, rng);
      const auto round2 = geo::exp0(geo::log0(y));
      for (std::size_t i = 0; i < 5; ++i)
        CHECK(round2.coords[i] == doctest::Approx(y.coords[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("exp_at basics and geodesic length") {
  const Curvature curv{1.0, false};
  rng::Engine rng(3);
  const PoincarePoint x = random_in_ball(3, curv, rng, 0.7);
  CHECK(geo::exp_at(x, Vec{0, 0, 0}).coords == x.coords);

  // base at the origin reduces to exp0
  Vec v = {0.3, -0.2, 0.1};
  const auto from_origin = geo::exp_at(PoincarePoint::origin(3, curv), v);
  const auto direct = geo::exp0(v, curv);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(from_origin.coords[i] == doctest::Approx(direct.coords[i]).epsilon(1e-15));

  // metric length of a small step equals the geodesic distance
  for (int trial = 0; trial < 200; ++trial) {
    const PoincarePoint base = random_in_ball(3, curv, rng, 0.7);
    Vec step(3);
    for (auto& e : step) e = 1e-2 * rng.normal();
    const double expected = geo::conformal_factor(base) * norm(step);
    const double got = geo::dist(base, geo::exp_at(base, step));
    CHECK(got == doctest::Approx(expected).epsilon(1e-6));
  }

  // quadrature oracle for a finite step
  for (int trial = 0; trial < 5; ++trial) {
    const PoincarePoint base = random_in_ball(3, curv, rng, 0.5);
    Vec step(3);
    for (auto& e : step) e = 0.3 * rng.normal();
    const double quad = geodesic_length_quadrature(base, step, 20000);
    const double direct_dist = geo::dist(base, geo::exp_at(base, step));
    CHECK(direct_dist == doctest::Approx(quad).epsilon(1e-5));
  }
}

TEST_CASE("dist and hnorm") {
  const Curvature curv{1.0, false};
  rng::Engine rng(4);

  const PoincarePoint origin = PoincarePoint::origin(2, curv);
  const PoincarePoint y{{0.5, 0.0}, curv};
  CHECK(geo::dist(y, y) == 0.0);
  CHECK(geo::dist(origin, y) == doctest::Approx(std::log(3.0)).epsilon(1e-5));
  // Poincare distance agrees with the arccosh form
  const double acosh_form = std::acosh(1.0 + 2.0 * 0.25 / 0.75);
  CHECK(geo::dist(origin, y) == doctest::Approx(acosh_form).epsilon(1e-12));

  CHECK(geo::hnorm(origin) == 0.0);
  CHECK(geo::hnorm(y) == doctest::Approx(std::log(3.0)).epsilon(1e-5));

  for (int trial = 0; trial < 500; ++trial) {
    const PoincarePoint a = random_in_ball(4, curv, rng);
    const PoincarePoint b = random_in_ball(4, curv, rng);
    CHECK(geo::dist(a, b) == doctest::Approx(geo::dist(b, a)).epsilon(1e-12));
    CHECK(geo::hnorm(a) == doctest::Approx(geo::dist(PoincarePoint::origin(4, curv), a))
                               .epsilon(1e-9));
  }

  // distance axioms on random triples
  for (int trial = 0; trial < 500; ++trial) {
    const PoincarePoint a = random_in_ball(3, curv, rng);
    const PoincarePoint b = random_in_ball(3, curv, rng);
    const PoincarePoint c = random_in_ball(3, curv, rng);
    const double ab = geo::dist(a, b), bc = geo::dist(b, c), ac = geo::dist(a, c);
    CHECK(ab >= 0.0);
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("geodesic midpoint of antipodal points is the origin") {
  const Curvature curv{1.0, false};
  rng::Engine rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Vec dir(3);
    for (auto& e : dir) e = rng.normal();
    const double n = norm(dir);
    for (auto& e : dir) e *= 0.9 / n;
    const PoincarePoint x{dir, curv};
    const PoincarePoint nx{negated(dir), curv};
    const PoincarePoint mid = PoincarePoint::origin(3, curv);
    CHECK(geo::dist(x, mid) == doctest::Approx(geo::dist(nx, mid)).epsilon(1e-9));
    CHECK(geo::dist(x, nx) == doctest::Approx(2.0 * geo::dist(x, mid)).epsilon(1e-9));
  }
}

TEST_CASE("euclidean limit of the mobius matvec") {
  rng::Engine rng(6);
  std::vector<double> m(12);
  for (auto& e : m) e = rng.normal();
  Vec x = {0.4, -0.3, 0.35};

  std::vector<double> mx(4, 0.0);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t k = 0; k < 3; ++k) mx[r] += m[r * 3 + k] * x[k];

  double prev = 1e300;
  for (double c : {1e-3, 1e-4, 1e-5}) {
    const Curvature curv{c, false};
    const auto out = geo::mobius_matvec(m, 4, 3, PoincarePoint{x, curv});
    Vec diff(4);
    for (std::size_t i = 0; i < 4; ++i) diff[i] = out.coords[i] - mx[i];
    const double dev = norm(diff);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("project_to_ball") {
  const Curvature curv{1.0, false};
  const Vec inside = {0.1, 0.2};
  const auto kept = geo::project_to_ball(inside, curv);
  CHECK(kept.coords == inside);

  const auto clamped = geo::project_to_ball(Vec{2.0, 0.0}, curv);
  CHECK(clamped.coords[0] == doctest::Approx(1.0 - geo::kBallEps).epsilon(1e-15));
  CHECK(clamped.coords[1] == 0.0);

  rng::Engine rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec v(4);
    for (auto& e : v) e = 10.0 * rng.normal();
    const Curvature cc{rng.uniform(0.05, 2.0), false};
    const auto p = geo::project_to_ball(v, cc);
    CHECK(norm(p.coords) < 1.0 / cc.sqrt_c());
  }

  CHECK_THROWS_AS(geo::project_to_ball(Vec{std::nan(""), 0.0}, curv),
                  std::invalid_argument);
  CHECK_THROWS_AS(geo::project_to_ball(Vec{HUGE_VAL, 0.0}, curv),
                  std::invalid_argument);
}

TEST_CASE("flat mode lowers every op to its linear form") {
  const Curvature flat{1.0, true};
  const PoincarePoint a{{1.5, -2.0}, flat};  // no ball constraint in flat mode
  const PoincarePoint b{{0.25, 1.0}, flat};

  CHECK(geo::conformal_factor(a) == 2.0);
  const auto sum = geo::mobius_add(a, b);
  CHECK(sum.coords[0] == 1.75);
  CHECK(sum.coords[1] == -1.0);

  const std::vector<double> m = {1, 2, 3, 4};
  const auto mv = geo::mobius_matvec(m, 2, 2, a);
  CHECK(mv.coords[0] == doctest::Approx(1.5 - 4.0));
  CHECK(mv.coords[1] == doctest::Approx(4.5 - 8.0));

  CHECK(geo::exp0(a.coords, flat).coords == a.coords);
  CHECK(geo::log0(a).coords == a.coords);
  CHECK(geo::exp_at(a, b.coords).coords == sum.coords);
  CHECK(geo::dist(a, b) ==
        doctest::Approx(std::sqrt(1.25 * 1.25 + 3.0 * 3.0)).epsilon(1e-15));
  CHECK(geo::hnorm(a) == doctest::Approx(std::sqrt(1.5 * 1.5 + 4.0)).epsilon(1e-15));
  CHECK(geo::project_to_ball(Vec{100.0, 0.0}, flat).coords[0] == 100.0);
}

}  // TEST_SUITE
