#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hycore/geometry.hpp"
#include "hycore/model.hpp"
#include "hycore/tensor.hpp"

namespace hycore::optim {

struct OptimConfig {
  double lr = 0.01;
  double momentum = 0.9;        // Euclidean group only
  double weight_decay = 0.0;    // Euclidean group only
  int epochs = 60;
  int batch_size = 16;
  std::uint64_t seed = 1;
};

/// Gradients were spiking through the hinge and boundary terms; everything is
/// clipped to this global norm before either update rule runs.
inline constexpr double kClipNorm = 10.0;

using GradMap = std::map<std::string, ad::Tensor>;

/// Rescales the Euclidean gradient by the inverse metric and retracts along
/// the geodesic: p <- exp_p(-lr * grad / lambda_p^2), projected back into the
/// safe ball. A non-finite gradient leaves p untouched.
geo::PoincarePoint riemannian_sgd_step(const geo::PoincarePoint& p,
                                       const geo::Vec& grad_e, double lr);

/// velocity <- momentum * velocity + grad + weight_decay * w;
/// w <- w - lr * velocity. Returns the updated (w, velocity).
std::pair<ad::Tensor, ad::Tensor> euclidean_sgd_step(const ad::Tensor& w,
                                                     const ad::Tensor& grad,
                                                     const ad::Tensor& velocity,
                                                     const OptimConfig& cfg);

/// Scales all gradients so their concatenated norm is at most max_norm;
/// returns the pre-clip norm.
double clip_global_norm(GradMap& grads, double max_norm);

struct StepLog {
  // (parameter, "riemannian" | "euclidean") in update order
  std::vector<std::pair<std::string, std::string>> rules;
  // parameters skipped because their gradient was non-finite
  std::vector<std::string> skipped;
};

/// Routes every parameter to its rule: manifold biases take Riemannian steps
/// (no momentum; parallel transport is out of scope), everything else takes
/// momentum SGD. In flat mode all parameters are Euclidean.
class Optimizer {
 public:
  explicit Optimizer(OptimConfig cfg) : cfg_(std::move(cfg)) {}

  StepLog step_all(nn::ModelState& state, GradMap grads, double lr_now);

  const OptimConfig& config() const { return cfg_; }

  /// Cosine decay over epochs: lr * 0.5 * (1 + cos(pi * epoch / epochs)).
  static double cosine_lr(const OptimConfig& cfg, int epoch);

 private:
  OptimConfig cfg_;
  std::map<std::string, ad::Tensor> velocity_;
};

}  // namespace hycore::optim
