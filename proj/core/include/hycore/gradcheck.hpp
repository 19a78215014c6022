#pragma once

#include <functional>
#include <vector>

#include "hycore/tape.hpp"

namespace hycore::ad {

struct GradCheckReport {
  std::vector<double> rel_errors;        // per coordinate; 0 for skipped ones
  std::vector<std::size_t> kink_skipped; // coordinates judged non-smooth
  double max_rel_error = 0.0;            // over checked coordinates
  bool pass = false;
};

/// Compares reverse-mode gradients of a scalar-valued function against
/// central finite differences. `f` must deterministically build a scalar
/// loss from the given leaf.
///
/// A coordinate is reported as a kink (and skipped) when the second central
/// difference indicates a slope discontinuity within h of the point, which
/// is where the subgradient convention rather than the derivative applies.
/// Relative error uses denominator max(|ad|, |fd|, 0.1), so tiny gradients
/// are judged on absolute error well above the finite-difference noise
/// floor.
GradCheckReport check_gradients(const std::function<Var(Tape&, Var)>& f,
                                const Tensor& x, double h = 1e-6,
                                double tol = 1e-5);

}  // namespace hycore::ad
