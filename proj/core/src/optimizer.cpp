#include "hycore/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hycore::optim {

namespace {

bool finite(const ad::Tensor& t) { return t.all_finite(); }

bool finite(const geo::Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

geo::PoincarePoint riemannian_sgd_step(const geo::PoincarePoint& p,
                                       const geo::Vec& grad_e, double lr) {
  if (grad_e.size() != p.dim())
    throw std::invalid_argument("riemannian_sgd_step: gradient dimension mismatch");
  if (!finite(grad_e)) return p;
  const double lam = geo::conformal_factor(p);
  const double scale = -lr / (lam * lam);
  geo::Vec step(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) step[i] = scale * grad_e[i];
  return geo::project_to_ball(geo::exp_at(p, step).coords, p.curv);
}

std::pair<ad::Tensor, ad::Tensor> euclidean_sgd_step(const ad::Tensor& w,
                                                     const ad::Tensor& grad,
                                                     const ad::Tensor& velocity,
                                                     const OptimConfig& cfg) {
  if (!w.same_shape(grad) || !w.same_shape(velocity))
    throw std::invalid_argument("euclidean_sgd_step: shape mismatch");
  ad::Tensor v_next = velocity;
  ad::Tensor w_next = w;
  for (std::size_t i = 0; i < w.size(); ++i) {
    v_next.v[i] = cfg.momentum * velocity.v[i] + grad.v[i] + cfg.weight_decay * w.v[i];
    w_next.v[i] = w.v[i] - cfg.lr * v_next.v[i];
  }
  return {std::move(w_next), std::move(v_next)};
}

double clip_global_norm(GradMap& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, g] : grads)
    for (double x : g.v) sq += x * x;
  const double n = std::sqrt(sq);
  if (std::isfinite(n) && n > max_norm) {
    const double s = max_norm / n;
    for (auto& [name, g] : grads)
      for (auto& x : g.v) x *= s;
  }
  return n;
}

double Optimizer::cosine_lr(const OptimConfig& cfg, int epoch) {
  const double t = static_cast<double>(epoch) / static_cast<double>(std::max(1, cfg.epochs));
  return cfg.lr * 0.5 * (1.0 + std::cos(M_PI * t));
}

StepLog Optimizer::step_all(nn::ModelState& state, GradMap grads, double lr_now) {
  StepLog log;
  clip_global_norm(grads, kClipNorm);
  OptimConfig step_cfg = cfg_;
  step_cfg.lr = lr_now;

  for (auto& ref : state.params()) {
    auto it = grads.find(ref.name);
    if (it == grads.end())
      throw std::invalid_argument("step_all: missing gradient for " + ref.name);
    const ad::Tensor& g = it->second;
    if (!g.same_shape(*ref.tensor))
      throw std::invalid_argument("step_all: gradient shape mismatch for " + ref.name);
    if (!finite(g)) {
      log.skipped.push_back(ref.name);
      continue;
    }
    if (ref.manifold) {
      geo::PoincarePoint p{ref.tensor->v, state.curv};
      geo::PoincarePoint next = riemannian_sgd_step(p, g.v, lr_now);
      ref.tensor->v = std::move(next.coords);
      log.rules.emplace_back(ref.name, "riemannian");
    } else {
      auto vel = velocity_.find(ref.name);
      if (vel == velocity_.end())
        vel = velocity_.emplace(ref.name, ad::Tensor::zeros_like(*ref.tensor)).first;
      auto [w_next, v_next] = euclidean_sgd_step(*ref.tensor, g, vel->second, step_cfg);
      *ref.tensor = std::move(w_next);
      vel->second = std::move(v_next);
      log.rules.emplace_back(ref.name, "euclidean");
    }
  }
  return log;
}

}  // namespace hycore::optim
