#pragma once

#include "hycore/geometry.hpp"
#include "hycore/tape.hpp"

namespace hycore::geo {

// Tape overloads of the ball primitives, composed from autodiff primitives so
// the whole model differentiates end to end. Values agree with the pure
// functions on in-ball inputs; the origin special cases are handled by the
// shared norm/division floors rather than branches, so gradients there follow
// the documented floor conventions. In flat (euclidean) mode each op lowers
// to its linear-space counterpart.

ad::Var conformal_factor(ad::Tape& t, ad::Var x, Curvature curv);
ad::Var mobius_add(ad::Tape& t, ad::Var x, ad::Var y, Curvature curv);
ad::Var mobius_matvec(ad::Tape& t, ad::Var m, ad::Var x, Curvature curv);
ad::Var exp0(ad::Tape& t, ad::Var v, Curvature curv);
ad::Var log0(ad::Tape& t, ad::Var y, Curvature curv);
ad::Var exp_at(ad::Tape& t, ad::Var x, ad::Var v, Curvature curv);
ad::Var dist(ad::Tape& t, ad::Var x, ad::Var y, Curvature curv);
ad::Var hnorm(ad::Tape& t, ad::Var x, Curvature curv);

/// Radial clamp into the safe ball. The branch is chosen from the current
/// value (define-by-run), identity when already inside.
ad::Var project_to_ball(ad::Tape& t, ad::Var v, Curvature curv);

}  // namespace hycore::geo
