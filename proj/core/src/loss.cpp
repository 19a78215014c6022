#include "hycore/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hycore::loss {

double r_hier(const geo::PoincarePoint& z_whole, const geo::PoincarePoint& z_part,
              int n_part, double gamma) {
  if (n_part < 1) throw std::invalid_argument("r_hier: n_part must be positive");
  const double margin = gamma / static_cast<double>(n_part);
  return std::max(0.0, -geo::hnorm(z_whole) + geo::hnorm(z_part) + margin);
}

double r_contr(const geo::PoincarePoint& z_whole, const geo::PoincarePoint& z_part_pos,
               const geo::PoincarePoint& z_part_neg, double delta) {
  return std::max(0.0, geo::dist(z_whole, z_part_pos) -
                           geo::dist(z_whole, z_part_neg) + delta);
}

ad::Var r_hier(ad::Tape& t, ad::Var z_whole, ad::Var z_part, int n_part, double gamma,
               geo::Curvature curv) {
  if (n_part < 1) throw std::invalid_argument("r_hier: n_part must be positive");
  const double margin = gamma / static_cast<double>(n_part);
  ad::Var gap = ad::sub(geo::hnorm(t, z_part, curv), geo::hnorm(t, z_whole, curv));
  return ad::relu(ad::add(gap, t.constant(margin)));
}

ad::Var r_contr(ad::Tape& t, ad::Var z_whole, ad::Var z_part_pos, ad::Var z_part_neg,
                double delta, geo::Curvature curv) {
  ad::Var gap = ad::sub(geo::dist(t, z_whole, z_part_pos, curv),
                        geo::dist(t, z_whole, z_part_neg, curv));
  return ad::relu(ad::add(gap, t.constant(delta)));
}

ad::Var cross_entropy(ad::Tape& t, ad::Var logits, int label) {
  const auto k = t.value(logits).size();
  if (label < 0 || static_cast<std::size_t>(label) >= k)
    throw std::invalid_argument("cross_entropy: label out of range");
  ad::Var mx = ad::max_axis(logits, 0);
  ad::Var lse = ad::add(ad::log(ad::sum(ad::exp(ad::sub(logits, mx)))), mx);
  std::vector<double> onehot(k, 0.0);
  onehot[static_cast<std::size_t>(label)] = 1.0;
  ad::Var picked = ad::dot(logits, t.constant(ad::Tensor::vector(std::move(onehot))));
  return ad::sub(lse, picked);
}

BatchResult evaluate_batch(const TripletBatch& batch, const nn::ModelState& state,
                           const LossWeights& weights, bool with_grads,
                           bool ce_on_parts) {
  const std::size_t b = batch.size();
  if (b == 0) throw std::invalid_argument("evaluate_batch: empty batch");
  if (batch.parts_pos.size() != b || batch.parts_neg.size() != b ||
      batch.part_sizes.size() != b || batch.labels.size() != b)
    throw std::invalid_argument("evaluate_batch: misaligned batch fields");

  const bool need_pos = weights.beta > 0.0 || weights.alpha > 0.0 || ce_on_parts;
  const bool need_neg = weights.alpha > 0.0;

  BatchResult result;
  for (std::size_t i = 0; i < b; ++i) {
    ad::Tape tape;
    nn::ModelVars vars = nn::attach_params(tape, state);
    ad::Var z_whole = nn::embed_g(tape, vars, batch.wholes[i], state);
    ad::Var logits = nn::logits_g(tape, vars, z_whole, state);
    ad::Var ce = cross_entropy(tape, logits, batch.labels[i]);

    ad::Var z_pos;
    if (need_pos) z_pos = nn::embed_g(tape, vars, batch.parts_pos[i], state);
    if (ce_on_parts) {
      ad::Var part_logits = nn::logits_g(tape, vars, z_pos, state);
      ad::Var part_ce = cross_entropy(tape, part_logits, batch.labels[i]);
      ce = ad::scale(ad::add(ce, part_ce), 0.5);
    }

    ad::Var total = ce;
    double rh_val = 0.0, rc_val = 0.0;
    if (weights.beta > 0.0) {
      ad::Var rh = r_hier(tape, z_whole, z_pos, batch.part_sizes[i], weights.gamma,
                          state.curv);
      rh_val = tape.value(rh).item();
      total = ad::add(total, ad::scale(rh, weights.beta));
    }
    if (need_neg) {
      ad::Var z_neg = nn::embed_g(tape, vars, batch.parts_neg[i], state);
      ad::Var rc = r_contr(tape, z_whole, z_pos, z_neg, weights.delta, state.curv);
      rc_val = tape.value(rc).item();
      total = ad::add(total, ad::scale(rc, weights.alpha));
    }

    result.terms.ce += tape.value(ce).item();
    result.terms.r_hier += rh_val;
    result.terms.r_contr += rc_val;
    result.terms.total += tape.value(total).item();

    if (with_grads) {
      tape.backward(total);
      auto accumulate = [&](const char* name, ad::Var v) {
        auto [it, inserted] = result.grads.try_emplace(
            name, ad::Tensor::zeros_like(tape.value(v)));
        const ad::Tensor& g = tape.grad(v);
        for (std::size_t k = 0; k < g.size(); ++k) it->second.v[k] += g.v[k];
      };
      accumulate("encoder.w1", vars.w1);
      accumulate("encoder.b1", vars.b1);
      accumulate("encoder.w2", vars.w2);
      accumulate("encoder.b2", vars.b2);
      accumulate("encoder.w3", vars.w3);
      accumulate("encoder.b3", vars.b3);
      accumulate("mobius.weight", vars.mobius_w);
      accumulate("mobius.bias", vars.mobius_b);
      accumulate("head.weight", vars.head_w);
      accumulate("head.bias", vars.head_b);
    }
  }

  const double inv_b = 1.0 / static_cast<double>(b);
  result.terms.ce *= inv_b;
  result.terms.r_hier *= inv_b;
  result.terms.r_contr *= inv_b;
  result.terms.total *= inv_b;
  for (auto& [name, g] : result.grads)
    for (auto& x : g.v) x *= inv_b;
  return result;
}

double total_loss(const TripletBatch& batch, const nn::ModelState& state,
                  const LossWeights& weights) {
  return evaluate_batch(batch, state, weights, false).terms.total;
}

}  // namespace hycore::loss
