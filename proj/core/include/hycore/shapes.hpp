#pragma once

#include <string>
#include <vector>

#include "hycore/pointcloud.hpp"
#include "hycore/rng.hpp"

namespace hycore::data {

// Eight synthetic classes. Legs, planes and tapering bodies recur across
// classes (table/chair share legs, cone/cylinder share round cross sections)
// so that small parts are genuinely ambiguous between classes.
enum class ShapeKind {
  kSphere,
  kCube,
  kCylinder,
  kCone,
  kTorus,
  kPyramid,
  kTable,
  kChair,
};

const std::vector<std::string>& shape_names();
ShapeKind shape_from_name(const std::string& name);
const std::string& shape_name(ShapeKind kind);

/// n raw surface points (N x 3 flat), uniform by surface area, no jitter,
/// no rotation, no normalization.
std::vector<double> sample_surface(ShapeKind kind, std::size_t n, rng::Engine& rng);

/// Full pipeline: surface sample -> isotropic Gaussian jitter (sigma) ->
/// random rotation about the vertical axis -> normalize.
/// Throws DataError for n < 8.
PointCloud generate_shape(ShapeKind kind, std::size_t n, rng::Engine& rng, double sigma);

}  // namespace hycore::data
