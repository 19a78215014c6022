#include "hycore/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hycore/errors.hpp"
#include "hycore/rng.hpp"

namespace hycore::nn {

namespace {

using ERowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<const ERowMat>;

// Uniform fan-in init with relu gain, U(+-sqrt(6/fan_in)); keeps activation
// variance stable through the shared MLP so features reach the exp0 lift at
// a useful scale instead of collapsing toward the origin.
ad::Tensor kaiming_uniform(std::size_t rows, std::size_t cols, rng::Engine& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows));
  std::vector<double> v(rows * cols);
  for (auto& e : v) e = rng.uniform(-limit, limit);
  return ad::Tensor::matrix(rows, cols, std::move(v));
}

// One shared-MLP layer on an N x in matrix: X W + b, optional relu.
ERowMat dense(const ERowMat& x, const ad::Tensor& w, const ad::Tensor& b, bool use_relu) {
  ERowMat out = x * MapMat(w.v.data(), w.rows(), w.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      out(r, c) += b.v[static_cast<std::size_t>(c)];
      if (use_relu && out(r, c) < 0.0) out(r, c) = 0.0;
    }
  return out;
}

}  // namespace

std::vector<ParamRef> ModelState::params() {
  const bool on_manifold = !curv.euclidean;
  return {
      {"encoder.w1", &encoder.w1, false},
      {"encoder.b1", &encoder.b1, false},
      {"encoder.w2", &encoder.w2, false},
      {"encoder.b2", &encoder.b2, false},
      {"encoder.w3", &encoder.w3, false},
      {"encoder.b3", &encoder.b3, false},
      {"mobius.weight", &mobius.weight, false},
      {"mobius.bias", &mobius.bias, on_manifold},
      {"head.weight", &head.weight, false},
      {"head.bias", &head.bias, on_manifold},
  };
}

ModelState init_model(const ModelDims& dims, geo::Curvature curv, std::uint64_t seed) {
  if (dims.h1 == 0 || dims.h2 == 0 || dims.m == 0 || dims.f == 0 || dims.num_classes < 2)
    throw ConfigError("init_model: bad dimensions");
  ModelState s;
  s.curv = curv;
  s.f = dims.f;
  s.num_classes = dims.num_classes;
  s.encoder.h1 = dims.h1;
  s.encoder.h2 = dims.h2;
  s.encoder.m = dims.m;

  rng::Engine r1(rng::derive(seed, 101));
  s.encoder.w1 = kaiming_uniform(3, dims.h1, r1);
  s.encoder.b1 = ad::Tensor::zeros({dims.h1});
  rng::Engine r2(rng::derive(seed, 102));
  s.encoder.w2 = kaiming_uniform(dims.h1, dims.h2, r2);
  s.encoder.b2 = ad::Tensor::zeros({dims.h2});
  rng::Engine r3(rng::derive(seed, 103));
  s.encoder.w3 = kaiming_uniform(dims.h2, dims.m, r3);
  s.encoder.b3 = ad::Tensor::zeros({dims.m});
  // mobius and head weights multiply from the left, so fan-in is the column
  // count; no relu follows them, so plain (gain 1) fan-in scaling applies.
  s.mobius.weight = ad::Tensor::zeros({dims.f, dims.m});
  {
    const double limit = std::sqrt(3.0 / static_cast<double>(dims.m));
    rng::Engine r(rng::derive(seed, 105));
    for (auto& e : s.mobius.weight.v) e = r.uniform(-limit, limit);
  }
  s.mobius.bias = ad::Tensor::zeros({dims.f});
  s.head.weight = ad::Tensor::zeros({dims.num_classes, dims.f});
  {
    const double limit = std::sqrt(3.0 / static_cast<double>(dims.f));
    rng::Engine r(rng::derive(seed, 106));
    for (auto& e : s.head.weight.v) e = r.uniform(-limit, limit);
  }
  s.head.bias = ad::Tensor::zeros({dims.num_classes});
  return s;
}

std::vector<double> encode(const data::PointCloud& cloud, const EncoderParams& params) {
  const std::size_t n = cloud.n();
  if (n == 0) throw DataError("encode: empty cloud");
  MapMat x(cloud.pts.data(), static_cast<Eigen::Index>(n), 3);
  ERowMat h1 = dense(x, params.w1, params.b1, true);
  ERowMat h2 = dense(h1, params.w2, params.b2, true);
  ERowMat h3 = dense(h2, params.w3, params.b3, false);
  std::vector<double> out(params.m);
  for (std::size_t j = 0; j < params.m; ++j) {
    double best = h3(0, static_cast<Eigen::Index>(j));
    for (Eigen::Index r = 1; r < h3.rows(); ++r)
      best = std::max(best, h3(r, static_cast<Eigen::Index>(j)));
    out[j] = best;
  }
  return out;
}

geo::PoincarePoint embed(const data::PointCloud& cloud, const ModelState& state) {
  const std::vector<double> features = encode(cloud, state.encoder);
  const geo::PoincarePoint lifted = geo::exp0(features, state.curv);
  const geo::PoincarePoint projected = geo::mobius_matvec(
      state.mobius.weight.v, state.f, state.encoder.m, lifted);
  const geo::PoincarePoint bias{state.mobius.bias.v, state.curv};
  return geo::mobius_add(projected, bias);
}

std::vector<double> class_logits(const geo::PoincarePoint& z, const ModelState& state) {
  const geo::PoincarePoint wz = geo::mobius_matvec(
      state.head.weight.v, state.num_classes, state.f, z);
  const geo::PoincarePoint bias{state.head.bias.v, state.curv};
  const geo::PoincarePoint shifted = geo::mobius_add(wz, bias);
  return geo::log0(shifted).coords;
}

int predict(const data::PointCloud& cloud, const ModelState& state) {
  const std::vector<double> logits = class_logits(embed(cloud, state), state);
  std::size_t best = 0;
  for (std::size_t k = 1; k < logits.size(); ++k)
    if (logits[k] > logits[best]) best = k;
  return static_cast<int>(best);
}

ModelVars attach_params(ad::Tape& tape, const ModelState& state) {
  ModelVars v;
  v.w1 = tape.param(state.encoder.w1);
  v.b1 = tape.param(state.encoder.b1);
  v.w2 = tape.param(state.encoder.w2);
  v.b2 = tape.param(state.encoder.b2);
  v.w3 = tape.param(state.encoder.w3);
  v.b3 = tape.param(state.encoder.b3);
  v.mobius_w = tape.param(state.mobius.weight);
  v.mobius_b = tape.param(state.mobius.bias);
  v.head_w = tape.param(state.head.weight);
  v.head_b = tape.param(state.head.bias);
  return v;
}

ad::Var encode_g(ad::Tape& tape, const ModelVars& vars, const data::PointCloud& cloud) {
  const std::size_t n = cloud.n();
  if (n == 0) throw DataError("encode: empty cloud");
  ad::Var x = tape.constant(ad::Tensor::matrix(n, 3, cloud.pts));
  ad::Var h1 = ad::relu(ad::add(ad::matmul(x, vars.w1), vars.b1));
  ad::Var h2 = ad::relu(ad::add(ad::matmul(h1, vars.w2), vars.b2));
  ad::Var h3 = ad::add(ad::matmul(h2, vars.w3), vars.b3);
  return ad::max_axis(h3, 0);
}

ad::Var embed_g(ad::Tape& tape, const ModelVars& vars, const data::PointCloud& cloud,
                const ModelState& state) {
  ad::Var features = encode_g(tape, vars, cloud);
  ad::Var lifted = geo::exp0(tape, features, state.curv);
  ad::Var projected = geo::mobius_matvec(tape, vars.mobius_w, lifted, state.curv);
  return geo::mobius_add(tape, projected, vars.mobius_b, state.curv);
}

ad::Var logits_g(ad::Tape& tape, const ModelVars& vars, ad::Var z,
                 const ModelState& state) {
  ad::Var wz = geo::mobius_matvec(tape, vars.head_w, z, state.curv);
  ad::Var shifted = geo::mobius_add(tape, wz, vars.head_b, state.curv);
  return geo::log0(tape, shifted, state.curv);
}

}  // namespace hycore::nn
