#include <doctest.h>

#include <cmath>
#include <functional>

#include "hycore/geometry_ad.hpp"
#include "hycore/gradcheck.hpp"
#include "hycore/rng.hpp"

using namespace hycore;
using ad::Tape;
using ad::Tensor;
using ad::Var;
using geo::Curvature;
using geo::PoincarePoint;
using geo::Vec;

namespace {

double norm(const Vec& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Vec random_in_ball(std::size_t dim, Curvature curv, rng::Engine& rng, double max_frac) {
  Vec v(dim);
  for (auto& x : v) x = rng.normal();
  const double r = max_frac * (0.1 + 0.9 * rng.uniform()) / std::max(norm(v), 1e-12);
  for (auto& x : v) x *= r / curv.sqrt_c();
  return v;
}

}  // namespace

TEST_SUITE("geometry_ad") {

TEST_CASE("tape overloads reproduce the pure functions") {
  rng::Engine rng(31);
  for (double c : {1.0, 0.5, 0.1}) {
    const Curvature curv{c, false};
    for (int trial = 0; trial < 100; ++trial) {
      const Vec xv = random_in_ball(4, curv, rng, 0.9);
      const Vec yv = random_in_ball(4, curv, rng, 0.9);
      std::vector<double> mv(3 * 4);
      for (auto& e : mv) e = rng.normal();
      const PoincarePoint x{xv, curv};
      const PoincarePoint y{yv, curv};

      Tape t;
      Var gx = t.leaf(Tensor::vector(xv));
      Var gy = t.leaf(Tensor::vector(yv));
      Var gm = t.leaf(Tensor::matrix(3, 4, mv));

      CHECK(t.value(geo::conformal_factor(t, gx, curv)).item() ==
            doctest::Approx(geo::conformal_factor(x)).epsilon(1e-12));

      const auto sum_pure = geo::mobius_add(x, y);
      const auto& sum_graph = t.value(geo::mobius_add(t, gx, gy, curv)).v;
      for (std::size_t i = 0; i < 4; ++i)
        CHECK(sum_graph[i] == doctest::Approx(sum_pure.coords[i]).epsilon(1e-12));

      const auto mv_pure = geo::mobius_matvec(mv, 3, 4, x);
      const auto& mv_graph = t.value(geo::mobius_matvec(t, gm, gx, curv)).v;
      for (std::size_t i = 0; i < 3; ++i)
        CHECK(mv_graph[i] == doctest::Approx(mv_pure.coords[i]).epsilon(1e-12));

      const auto exp_pure = geo::exp0(xv, curv);
      const auto& exp_graph = t.value(geo::exp0(t, gx, curv)).v;
      for (std::size_t i = 0; i < 4; ++i)
        CHECK(exp_graph[i] == doctest::Approx(exp_pure.coords[i]).epsilon(1e-12));

      const auto log_pure = geo::log0(x);
      const auto& log_graph = t.value(geo::log0(t, gx, curv)).v;
      for (std::size_t i = 0; i < 4; ++i)
        CHECK(log_graph[i] == doctest::Approx(log_pure.coords[i]).epsilon(1e-12));

      const auto exp_at_pure = geo::exp_at(x, yv);
      const auto& exp_at_graph = t.value(geo::exp_at(t, gx, gy, curv)).v;
      for (std::size_t i = 0; i < 4; ++i)
        CHECK(exp_at_graph[i] == doctest::Approx(exp_at_pure.coords[i]).epsilon(1e-12));

      CHECK(t.value(geo::dist(t, gx, gy, curv)).item() ==
            doctest::Approx(geo::dist(x, y)).epsilon(1e-12));
      CHECK(t.value(geo::hnorm(t, gx, curv)).item() ==
            doctest::Approx(geo::hnorm(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("projection branch in the graph matches the pure clamp") {
  const Curvature curv{1.0, false};
  Tape t;
  Var far = t.leaf(Tensor::vector({3.0, 4.0}));
  const auto& proj = t.value(geo::project_to_ball(t, far, curv)).v;
  const auto pure = geo::project_to_ball(Vec{3.0, 4.0}, curv);
  CHECK(proj[0] == doctest::Approx(pure.coords[0]).epsilon(1e-15));
  CHECK(proj[1] == doctest::Approx(pure.coords[1]).epsilon(1e-15));

  Var inside = t.leaf(Tensor::vector({0.1, 0.2}));
  Var kept = geo::project_to_ball(t, inside, curv);
  CHECK(t.value(kept).v == std::vector<double>{0.1, 0.2});
}

TEST_CASE("finite differences across every ball op") {
  const Curvature curv{1.0, false};
  rng::Engine rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const Vec xv = random_in_ball(3, curv, rng, 0.7);
    const Vec yv = random_in_ball(3, curv, rng, 0.7);

    auto check = [&](const char* what, const std::function<Var(Tape&, Var)>& f,
                     const Tensor& at) {
      const auto report = ad::check_gradients(f, at, 1e-6, 1e-5);
      CAPTURE(what);
      CAPTURE(trial);
      CAPTURE(report.max_rel_error);
      CHECK(report.pass);
    };

    check("conformal",
          [&](Tape& t, Var x) { return geo::conformal_factor(t, x, curv); },
          Tensor::vector(xv));
    check("mobius_add_lhs",
          [&](Tape& t, Var x) {
            Var y = t.constant(Tensor::vector(yv));
            return geo::hnorm(t, geo::mobius_add(t, x, y, curv), curv);
          },
          Tensor::vector(xv));
    check("mobius_add_rhs",
          [&](Tape& t, Var y) {
            Var x = t.constant(Tensor::vector(xv));
            return geo::hnorm(t, geo::mobius_add(t, x, y, curv), curv);
          },
          Tensor::vector(yv));
    {
      std::vector<double> mv(2 * 3);
      for (auto& e : mv) e = rng.normal();
      check("matvec_by_matrix",
            [&](Tape& t, Var m) {
              Var x = t.constant(Tensor::vector(xv));
              return geo::hnorm(t, geo::mobius_matvec(t, m, x, curv), curv);
            },
            Tensor::matrix(2, 3, mv));
      check("matvec_by_point",
            [&](Tape& t, Var x) {
              Var m = t.constant(Tensor::matrix(2, 3, mv));
              return geo::hnorm(t, geo::mobius_matvec(t, m, x, curv), curv);
            },
            Tensor::vector(xv));
    }
    check("exp0",
          [&](Tape& t, Var v) { return geo::hnorm(t, geo::exp0(t, v, curv), curv); },
          Tensor::vector(Vec{0.8, -1.2, 0.5}));
    check("log0",
          [&](Tape& t, Var y) { return ad::norm(geo::log0(t, y, curv)); },
          Tensor::vector(xv));
    check("exp_at",
          [&](Tape& t, Var v) {
            Var x = t.constant(Tensor::vector(xv));
            return geo::hnorm(t, geo::exp_at(t, x, v, curv), curv);
          },
          Tensor::vector(Vec{0.3, 0.2, -0.4}));
    check("dist",
          [&](Tape& t, Var x) {
            Var y = t.constant(Tensor::vector(yv));
            return geo::dist(t, x, y, curv);
          },
          Tensor::vector(xv));
    check("hnorm", [&](Tape& t, Var x) { return geo::hnorm(t, x, curv); },
          Tensor::vector(xv));
  }
}

TEST_CASE("hnorm of a projected point differentiates cleanly") {
  const Curvature curv{1.0, false};
  rng::Engine rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec xv = random_in_ball(4, curv, rng, 0.9);
    auto f = [&](Tape& t, Var x) {
      return geo::hnorm(t, geo::project_to_ball(t, x, curv), curv);
    };
    const auto report = ad::check_gradients(f, Tensor::vector(xv), 1e-6, 1e-5);
    CHECK(report.pass);
  }
}

TEST_CASE("flat mode graph ops lower to linear forms") {
  const Curvature flat{1.0, true};
  Tape t;
  Var x = t.leaf(Tensor::vector({1.5, -2.0}));
  Var y = t.leaf(Tensor::vector({0.25, 1.0}));
  CHECK(t.value(geo::mobius_add(t, x, y, flat)).v == std::vector<double>{1.75, -1.0});
  CHECK(t.value(geo::exp0(t, x, flat)).v == t.value(x).v);
  CHECK(t.value(geo::log0(t, x, flat)).v == t.value(x).v);
  CHECK(t.value(geo::dist(t, x, y, flat)).item() ==
        doctest::Approx(std::sqrt(1.25 * 1.25 + 9.0)).epsilon(1e-15));
  CHECK(t.value(geo::hnorm(t, x, flat)).item() ==
        doctest::Approx(std::sqrt(1.5 * 1.5 + 4.0)).epsilon(1e-15));
  CHECK(t.value(geo::conformal_factor(t, x, flat)).item() == 2.0);
}

}  // TEST_SUITE
