#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace hycore::data {

/// A set of N 3D points. Coordinates are object-local; clouds produced by
/// the generators and loaders are normalized (centroid at 0, max radius 1).
struct PointCloud {
  std::vector<double> pts;  // N x 3, row-major
  int label = -1;
  std::string id;

  std::size_t n() const { return pts.size() / 3; }
  std::array<double, 3> point(std::size_t i) const {
    return {pts[3 * i], pts[3 * i + 1], pts[3 * i + 2]};
  }
};

/// Centers on the centroid and rescales so the farthest point sits at
/// radius 1. Throws DataError on an empty cloud or non-finite coordinates.
PointCloud normalize(PointCloud cloud);

/// Indices of the k nearest points to pts[anchor] (the anchor itself
/// counts), in ascending (distance, index) order.
std::vector<std::size_t> knn_indices(const PointCloud& cloud, std::size_t anchor,
                                     std::size_t k);

/// New cloud keeping only the given indices; label and id carry over.
PointCloud subset(const PointCloud& cloud, const std::vector<std::size_t>& indices);

/// Whitespace-separated "x y z" lines. Malformed input reports the line
/// number; the parsed cloud is validated and normalized.
PointCloud load_xyz(const std::filesystem::path& path);

/// Full-precision text dump, one point per line; load_xyz(save_xyz(c)) is
/// coordinate-exact.
void save_xyz(const PointCloud& cloud, const std::filesystem::path& path);

}  // namespace hycore::data
