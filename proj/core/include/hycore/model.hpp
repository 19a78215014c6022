#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hycore/geometry.hpp"
#include "hycore/geometry_ad.hpp"
#include "hycore/pointcloud.hpp"
#include "hycore/tape.hpp"
#include "hycore/tensor.hpp"

namespace hycore::nn {

/// Shared per-point map 3 -> h1 -> h2 -> m (relu on the hidden layers, last
/// layer linear), pooled with a coordinatewise max over points. Weights are
/// stored (in x out) so the forward pass is a plain row-major matmul.
struct EncoderParams {
  ad::Tensor w1, b1, w2, b2, w3, b3;
  std::size_t h1 = 64, h2 = 128, m = 256;
};

/// Ball-to-ball affine layer; bias is a manifold parameter kept inside the
/// safe ball.
struct MobiusLayerParams {
  ad::Tensor weight;  // (f x m)
  ad::Tensor bias;    // (f), Poincare point
};

struct HeadParams {
  ad::Tensor weight;  // (K x f)
  ad::Tensor bias;    // (K), Poincare point
};

/// Reference to one trainable tensor plus its update rule group.
struct ParamRef {
  std::string name;
  ad::Tensor* tensor;
  bool manifold;  // Poincare-ball parameter (Riemannian updates)
};

struct ModelState {
  EncoderParams encoder;
  MobiusLayerParams mobius;
  HeadParams head;
  geo::Curvature curv;
  std::size_t f = 256;
  std::size_t num_classes = 8;

  /// All parameters in a fixed order; {encoder, mobius.weight, head.weight}
  /// are Euclidean, {mobius.bias, head.bias} live on the manifold. In flat
  /// mode the manifold flag is reported false for every parameter.
  std::vector<ParamRef> params();
  std::vector<ParamRef> params() const = delete;
};

struct ModelDims {
  std::size_t h1 = 64, h2 = 128, m = 256, f = 256, num_classes = 8;
};

/// Uniform fan-in init for the weight matrices, zeros for Euclidean biases,
/// origin for the manifold biases.
ModelState init_model(const ModelDims& dims, geo::Curvature curv, std::uint64_t seed);

// ----- fast inference path (no tape) ----------------------------------------

std::vector<double> encode(const data::PointCloud& cloud, const EncoderParams& params);
geo::PoincarePoint embed(const data::PointCloud& cloud, const ModelState& state);
std::vector<double> class_logits(const geo::PoincarePoint& z, const ModelState& state);
/// argmax of class_logits(embed(cloud)); ties resolve to the lowest index.
int predict(const data::PointCloud& cloud, const ModelState& state);

// ----- differentiable path ---------------------------------------------------

/// Parameter leaves of one tape, borrowed from a ModelState that must outlive
/// the tape and stay unmodified while it is in use.
struct ModelVars {
  ad::Var w1, b1, w2, b2, w3, b3;
  ad::Var mobius_w, mobius_b;
  ad::Var head_w, head_b;
};

ModelVars attach_params(ad::Tape& tape, const ModelState& state);
ad::Var encode_g(ad::Tape& tape, const ModelVars& vars, const data::PointCloud& cloud);
ad::Var embed_g(ad::Tape& tape, const ModelVars& vars, const data::PointCloud& cloud,
                const ModelState& state);
ad::Var logits_g(ad::Tape& tape, const ModelVars& vars, ad::Var z,
                 const ModelState& state);

}  // namespace hycore::nn
