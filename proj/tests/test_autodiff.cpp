#include <doctest.h>

#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>

#include "hycore/gradcheck.hpp"
#include "hycore/rng.hpp"
#include "hycore/tape.hpp"

using namespace hycore;
using ad::Tape;
using ad::Tensor;
using ad::Var;

namespace {

Tensor random_vec(std::size_t n, rng::Engine& rng, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return Tensor::vector(std::move(v));
}

Tensor random_mat(std::size_t r, std::size_t c, rng::Engine& rng) {
  std::vector<double> v(r * c);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return Tensor::matrix(r, c, std::move(v));
}

// Scalarizes a tensor output against fixed random coefficients so every
// output coordinate contributes a distinct cotangent.
Var pin(Tape& t, Var y, rng::Engine& rng) {
  const Tensor& val = t.value(y);
  if (val.is_scalar()) return y;
  if (val.rank() == 2) {
    std::vector<double> col(val.cols());
    for (auto& c : col) c = rng.uniform(-1.0, 1.0);
    Var folded = ad::matmul(y, t.constant(Tensor::vector(std::move(col))));
    std::vector<double> row(val.rows());
    for (auto& c : row) c = rng.uniform(-1.0, 1.0);
    return ad::dot(folded, t.constant(Tensor::vector(std::move(row))));
  }
  std::vector<double> coeffs(val.size());
  for (auto& c : coeffs) c = rng.uniform(-1.0, 1.0);
  return ad::dot(y, t.constant(Tensor::vector(std::move(coeffs))));
}

void run_fd_suite(const char* what,
                  const std::function<Var(Tape&, Var, rng::Engine&)>& build,
                  const std::function<Tensor(rng::Engine&)>& sample, int trials = 100,
                  double tol = 1e-5) {
  rng::Engine rng(rng::hash_str(what));
  for (int i = 0; i < trials; ++i) {
    const Tensor x = sample(rng);
    const std::uint64_t coeff_seed = rng.next_u64();
    auto f = [&build, coeff_seed](Tape& t, Var leaf) {
      rng::Engine coeff_rng(coeff_seed);
      return build(t, leaf, coeff_rng);
    };
    const ad::GradCheckReport report = ad::check_gradients(f, x, 1e-6, tol);
    CAPTURE(what);
    CAPTURE(i);
    CAPTURE(report.max_rel_error);
    CHECK(report.pass);
  }
}

}  // namespace

TEST_SUITE("autodiff") {

TEST_CASE("forward values of the listed primitives") {
  Tape t;
  Var a = t.leaf(Tensor::vector({1, 2}));
  Var b = t.leaf(Tensor::vector({3, 4}));
  CHECK(t.value(ad::add(a, b)).v == std::vector<double>{4, 6});
  CHECK(t.value(ad::sub(a, b)).v == std::vector<double>{-2, -2});
  CHECK(t.value(ad::mul(a, b)).v == std::vector<double>{3, 8});
  CHECK(t.value(ad::div(a, b)).v == std::vector<double>{1.0 / 3.0, 0.5});

  Var m = t.leaf(Tensor::matrix(2, 2, {1, 5, 3, 2}));
  CHECK(t.value(ad::max_axis(m, 1)).v == std::vector<double>{5, 3});
  CHECK(t.value(ad::max_axis(m, 0)).v == std::vector<double>{3, 5});

  CHECK(t.value(ad::sum(a)).item() == 3.0);
  CHECK(t.value(ad::mean(a)).item() == 1.5);
  CHECK(t.value(ad::dot(a, b)).item() == 11.0);
  CHECK(t.value(ad::norm(a)).item() == doctest::Approx(std::sqrt(5.0)));
  CHECK(t.value(ad::concat(a, b)).v == std::vector<double>{1, 2, 3, 4});
  CHECK(t.value(ad::neg(a)).v == std::vector<double>{-1, -2});
  CHECK(t.value(ad::scale(a, 3.0)).v == std::vector<double>{3, 6});
  CHECK(t.value(ad::square(a)).v == std::vector<double>{1, 4});

  Var mv = ad::matmul(m, a);
  CHECK(t.value(mv).v == std::vector<double>{11, 7});

  Var sm = ad::softmax(t.leaf(Tensor::vector({0.0, 0.0})));
  CHECK(t.value(sm).v[0] == doctest::Approx(0.5));

  Var cl = ad::clamp(t.leaf(Tensor::vector({-3, 0.5, 3})), -1.0, 1.0);
  CHECK(t.value(cl).v == std::vector<double>{-1, 0.5, 1});
  Var rl = ad::relu(t.leaf(Tensor::vector({-3, 0.5})));
  CHECK(t.value(rl).v == std::vector<double>{0, 0.5});
}

TEST_CASE("tanh at zero has unit gradient") {
  Tape t;
  Var x = t.leaf(Tensor::vector({0.0}), true);
  Var y = ad::sum(ad::tanh(x));
  CHECK(t.value(y).item() == 0.0);
  t.backward(y);
  CHECK(t.grad(x).v[0] == 1.0);
}

TEST_CASE("backward basics") {
  {
    Tape t;
    Var x = t.leaf(Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6}), true);
    Var loss = ad::sum(x);
    t.backward(loss);
    CHECK(t.grad(x).v == std::vector<double>(6, 1.0));
  }
  {
    Tape t;
    Var x = t.leaf(Tensor::vector({1, 2}), true);
    Var loss = ad::dot(x, x);
    t.backward(loss);
    CHECK(t.grad(x).v == std::vector<double>{2, 4});
  }
  {
    // fan-out accumulates additively
    Tape t;
    Var x = t.leaf(Tensor::vector({3.0}), true);
    Var loss = ad::sum(ad::add(x, x));
    t.backward(loss);
    CHECK(t.grad(x).v[0] == 2.0);
  }
}

TEST_CASE("subgradient conventions") {
  {
    // ties go to the first attaining index
    Tape t;
    Var x = t.leaf(Tensor::vector({2.0, 2.0}), true);
    Var loss = ad::max_axis(x, 0);
    t.backward(loss);
    CHECK(t.grad(x).v == std::vector<double>{1, 0});
  }
  {
    // relu exactly at zero propagates zero
    Tape t;
    Var x = t.leaf(Tensor::vector({0.0}), true);
    Var loss = ad::sum(ad::relu(x));
    t.backward(loss);
    CHECK(t.grad(x).v[0] == 0.0);
  }
  {
    // clamp passes gradient only strictly inside
    Tape t;
    Var x = t.leaf(Tensor::vector({-1.0, 0.0, 1.0}), true);
    Var loss = ad::sum(ad::clamp(x, -1.0, 1.0));
    t.backward(loss);
    CHECK(t.grad(x).v == std::vector<double>{0, 1, 0});
  }
}

TEST_CASE("atanh clamps forward and backward consistently") {
  Tape t;
  Var x = t.leaf(Tensor::vector({0.999999999999}), true);
  Var y = ad::sum(ad::atanh(x));
  const double clamped = 1.0 - 1e-7;
  CHECK(t.value(y).item() == doctest::Approx(std::atanh(clamped)).epsilon(1e-15));
  t.backward(y);
  CHECK(t.grad(x).v[0] == doctest::Approx(1.0 / (1.0 - clamped * clamped)).epsilon(1e-12));
}

TEST_CASE("error paths") {
  Tape t;
  Var a = t.leaf(Tensor::vector({1, 2}));
  Var b = t.leaf(Tensor::vector({1, 2, 3}));
  CHECK_THROWS_AS(ad::add(a, b), std::invalid_argument);
  CHECK_THROWS_AS(ad::matmul(a, b), std::invalid_argument);
  CHECK_THROWS_AS(ad::dot(a, b), std::invalid_argument);

  Var c = t.leaf(Tensor::vector({1, 2}), true);
  Var vec_out = ad::add(a, c);
  CHECK_THROWS_AS(t.backward(vec_out), std::invalid_argument);  // non-scalar loss

  Var loss = ad::sum(vec_out);
  CHECK_THROWS_AS(t.grad(c), std::logic_error);  // backward has not run
  t.backward(loss);
  CHECK_THROWS_AS(t.backward(loss), std::logic_error);  // graph already consumed
}

TEST_CASE("backward is deterministic") {
  auto run = [](std::vector<double>& grad_out) {
    Tape t;
    rng::Engine rng(99);
    Var x = t.leaf(random_vec(8, rng), true);
    Var w = t.constant(random_mat(5, 8, rng));
    Var y = ad::tanh(ad::matmul(w, x));
    Var loss = ad::sum(ad::mul(y, y));
    t.backward(loss);
    grad_out = t.grad(x).v;
  };
  std::vector<double> g1, g2;
  run(g1);
  run(g2);
  CHECK(std::memcmp(g1.data(), g2.data(), g1.size() * sizeof(double)) == 0);
}

TEST_CASE("apply dispatches every primitive") {
  Tape t;
  Var a = t.leaf(Tensor::vector({0.5, 0.125}));
  Var b = t.leaf(Tensor::vector({0.25, 0.25}));
  CHECK(t.value(t.apply(ad::Op::kAdd, {a, b})).v == std::vector<double>{0.75, 0.375});
  CHECK(t.value(t.apply(ad::Op::kScale, {a}, 2.0)).v == std::vector<double>{1.0, 0.25});
  CHECK(t.value(t.apply(ad::Op::kDot, {a, b})).item() == 0.15625);
  CHECK(t.value(t.apply(ad::Op::kTanh, {a})).v[0] == doctest::Approx(std::tanh(0.5)));
  CHECK(t.value(t.apply(ad::Op::kMaxAxis, {a}, 0, 0, 0)).item() == 0.5);
  CHECK_THROWS_AS(t.apply(ad::Op::kLeaf, {a}), std::invalid_argument);
}

TEST_CASE("gradients match finite differences for every primitive") {
  run_fd_suite(
      "tanh", [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::tanh(x), r); },
      [](rng::Engine& r) { return random_vec(5, r); });
  run_fd_suite(
      "atanh", [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::atanh(x), r); },
      [](rng::Engine& r) { return random_vec(5, r, -0.9, 0.9); });
  run_fd_suite(
      "acosh_safe",
      [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::acosh_safe(x), r); },
      [](rng::Engine& r) { return random_vec(5, r, 1.2, 3.0); });
  run_fd_suite(
      "sqrt", [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::sqrt(x), r); },
      [](rng::Engine& r) { return random_vec(5, r, 0.1, 4.0); });
  run_fd_suite(
      "square", [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::square(x), r); },
      [](rng::Engine& r) { return random_vec(5, r); });
  run_fd_suite(
      "log", [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::log(x), r); },
      [](rng::Engine& r) { return random_vec(5, r, 0.1, 4.0); });
  run_fd_suite(
      "exp", [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::exp(x), r); },
      [](rng::Engine& r) { return random_vec(5, r, -1.5, 1.5); });
  run_fd_suite(
      "neg", [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::neg(x), r); },
      [](rng::Engine& r) { return random_vec(5, r); });
  run_fd_suite(
      "scale",
      [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::scale(x, -1.7), r); },
      [](rng::Engine& r) { return random_vec(5, r); });
  run_fd_suite(
      "relu", [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::relu(x), r); },
      [](rng::Engine& r) {
        Tensor x = random_vec(5, r);
        for (auto& v : x.v)
          if (std::abs(v) < 0.05) v = 0.1;  // keep clear of the kink
        return x;
      });
  run_fd_suite(
      "clamp",
      [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::clamp(x, -1.0, 1.0), r); },
      [](rng::Engine& r) {
        Tensor x = random_vec(5, r);
        for (auto& v : x.v)
          if (std::abs(std::abs(v) - 1.0) < 0.05) v *= 1.2;
        return x;
      });
  run_fd_suite(
      "softmax",
      [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::softmax(x), r); },
      [](rng::Engine& r) { return random_vec(5, r); });

  run_fd_suite(
      "add",
      [](Tape& t, Var x, rng::Engine& r) {
        Var c = t.constant(random_vec(5, r));
        return pin(t, ad::add(x, c), r);
      },
      [](rng::Engine& r) { return random_vec(5, r); });
  run_fd_suite(
      "add_rowvec",
      [](Tape& t, Var x, rng::Engine& r) {
        Var c = t.constant(random_mat(3, 4, r));
        return pin(t, ad::add(c, x), r);
      },
      [](rng::Engine& r) { return random_vec(4, r); });
  run_fd_suite(
      "sub",
      [](Tape& t, Var x, rng::Engine& r) {
        Var c = t.constant(random_vec(5, r));
        return pin(t, ad::sub(c, x), r);
      },
      [](rng::Engine& r) { return random_vec(5, r); });
  run_fd_suite(
      "mul",
      [](Tape& t, Var x, rng::Engine& r) {
        Var c = t.constant(random_vec(5, r));
        return pin(t, ad::mul(x, c), r);
      },
      [](rng::Engine& r) { return random_vec(5, r); });
  run_fd_suite(
      "mul_scalar",
      [](Tape& t, Var x, rng::Engine& r) {
        Var c = t.constant(random_vec(6, r));
        return pin(t, ad::mul(x, c), r);
      },
      [](rng::Engine& r) { return Tensor::scalar(r.uniform(-2.0, 2.0)); });
  run_fd_suite(
      "div",
      [](Tape& t, Var x, rng::Engine& r) {
        Var c = t.constant(random_vec(5, r, 0.5, 2.0));
        return pin(t, ad::div(x, c), r);
      },
      [](rng::Engine& r) { return random_vec(5, r); });
  run_fd_suite(
      "div_by_leaf",
      [](Tape& t, Var x, rng::Engine& r) {
        Var c = t.constant(random_vec(5, r));
        return pin(t, ad::div(c, x), r);
      },
      [](rng::Engine& r) { return random_vec(5, r, 0.5, 2.0); });
  run_fd_suite(
      "matmul_mat",
      [](Tape& t, Var x, rng::Engine& r) {
        Var c = t.constant(random_mat(4, 3, r));
        return pin(t, ad::matmul(c, ad::matmul(x, c)), r);
      },
      [](rng::Engine& r) { return random_mat(3, 4, r); });
  run_fd_suite(
      "matmul_vec",
      [](Tape& t, Var x, rng::Engine& r) {
        Var c = t.constant(random_mat(4, 5, r));
        return pin(t, ad::matmul(c, x), r);
      },
      [](rng::Engine& r) { return random_vec(5, r); });
  run_fd_suite(
      "dot",
      [](Tape& t, Var x, rng::Engine& r) {
        Var c = t.constant(random_vec(5, r));
        return ad::dot(x, c);
      },
      [](rng::Engine& r) { return random_vec(5, r); });
  run_fd_suite(
      "norm", [](Tape& t, Var x, rng::Engine&) { (void)t; return ad::norm(x); },
      [](rng::Engine& r) {
        Tensor x = random_vec(5, r);
        double n = 0;
        for (double v : x.v) n += v * v;
        if (std::sqrt(n) < 0.3)
          for (auto& v : x.v) v += 0.5;
        return x;
      });
  run_fd_suite(
      "sum", [](Tape& t, Var x, rng::Engine&) { (void)t; return ad::sum(x); },
      [](rng::Engine& r) { return random_mat(3, 4, r); });
  run_fd_suite(
      "mean", [](Tape& t, Var x, rng::Engine&) { (void)t; return ad::mean(x); },
      [](rng::Engine& r) { return random_vec(7, r); });
  run_fd_suite(
      "concat",
      [](Tape& t, Var x, rng::Engine& r) {
        Var c = t.constant(random_vec(3, r));
        return pin(t, ad::concat(x, c), r);
      },
      [](rng::Engine& r) { return random_vec(4, r); });
  run_fd_suite(
      "max_axis0",
      [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::max_axis(x, 0), r); },
      [](rng::Engine& r) { return random_mat(4, 3, r); });
  run_fd_suite(
      "max_axis1",
      [](Tape& t, Var x, rng::Engine& r) { return pin(t, ad::max_axis(x, 1), r); },
      [](rng::Engine& r) { return random_mat(4, 3, r); });
}

TEST_CASE("check_gradients reports") {
  // smooth case: tight agreement
  auto sum_sq = [](Tape& t, Var x) { (void)t; return ad::dot(x, x); };
  rng::Engine rng(12);
  const auto smooth = ad::check_gradients(sum_sq, random_vec(6, rng), 1e-6, 1e-5);
  CHECK(smooth.pass);
  CHECK(smooth.max_rel_error < 1e-8);
  CHECK(smooth.kink_skipped.empty());

  // hinge exactly at zero: the corner coordinate is reported and skipped
  auto hinge = [](Tape& t, Var x) { (void)t; return ad::sum(ad::relu(x)); };
  const auto report = ad::check_gradients(hinge, Tensor::vector({0.0, 0.5}), 1e-6, 1e-5);
  CHECK(report.kink_skipped == std::vector<std::size_t>{0});
  CHECK(report.pass);
}

}  // TEST_SUITE
