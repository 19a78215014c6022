#pragma once

#include "hycore/geometry.hpp"
#include "hycore/geometry_ad.hpp"
#include "hycore/model.hpp"
#include "hycore/optimizer.hpp"
#include "hycore/triplet.hpp"

namespace hycore::loss {

struct LossWeights {
  double alpha = 0.01;   // contrastive term
  double beta = 0.01;    // hierarchy term
  double gamma = 1000.0; // variable margin gamma / N'
  double delta = 4.0;    // contrastive margin
};

/// Hinge pushing the whole's hyperbolic norm above the part's by the
/// part-size dependent margin gamma/N': small parts sit near the center,
/// large parts approach the boundary.
double r_hier(const geo::PoincarePoint& z_whole, const geo::PoincarePoint& z_part,
              int n_part, double gamma);

/// Triplet hinge on geodesic distances: the positive part must sit at least
/// delta closer to its whole than a different-class part does.
double r_contr(const geo::PoincarePoint& z_whole, const geo::PoincarePoint& z_part_pos,
               const geo::PoincarePoint& z_part_neg, double delta);

// Tape overloads of the same hinges.
ad::Var r_hier(ad::Tape& t, ad::Var z_whole, ad::Var z_part, int n_part, double gamma,
               geo::Curvature curv);
ad::Var r_contr(ad::Tape& t, ad::Var z_whole, ad::Var z_part_pos, ad::Var z_part_neg,
                double delta, geo::Curvature curv);

/// -log softmax(logits)[label], assembled from primitives with the usual
/// max-shift stabilization.
ad::Var cross_entropy(ad::Tape& t, ad::Var logits, int label);

struct BatchTerms {
  double ce = 0.0;
  double r_hier = 0.0;
  double r_contr = 0.0;
  double total = 0.0;
};

struct BatchResult {
  BatchTerms terms;        // batch means
  optim::GradMap grads;    // mean gradients, keyed by parameter name
};

/// Mean over the batch of CE(whole) + alpha * r_contr + beta * r_hier.
/// CE sees whole objects only; part embeddings are computed only for terms
/// with nonzero weight. `ce_on_parts` additionally averages a CE term on the
/// positive crops into the classification loss (the crop-augmented baseline),
/// and `with_grads` controls the backward pass. Per-sample gradients are
/// reduced in batch order, so results do not depend on scheduling.
BatchResult evaluate_batch(const TripletBatch& batch, const nn::ModelState& state,
                           const LossWeights& weights, bool with_grads,
                           bool ce_on_parts = false);

/// The scalar training objective for one batch.
double total_loss(const TripletBatch& batch, const nn::ModelState& state,
                  const LossWeights& weights);

}  // namespace hycore::loss
