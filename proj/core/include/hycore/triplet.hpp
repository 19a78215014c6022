#pragma once

#include <vector>

#include "hycore/dataset.hpp"
#include "hycore/pointcloud.hpp"
#include "hycore/rng.hpp"

namespace hycore::loss {

struct TripletConfig {
  int whole_min = 800;
  int whole_max = 1024;
  int part_min = 200;
  int part_max = 600;
};

/// Aligned (whole+, part+, part-) samples. parts_pos[i] is a contiguous kNN
/// crop of the same source cloud as wholes[i]; parts_neg[i] comes from a
/// uniformly drawn cloud of a different class.
struct TripletBatch {
  std::vector<data::PointCloud> wholes;
  std::vector<data::PointCloud> parts_pos;
  std::vector<data::PointCloud> parts_neg;
  std::vector<int> part_sizes;  // N' of parts_pos
  std::vector<int> labels;

  std::size_t size() const { return wholes.size(); }
};

/// Uniform subsample without replacement of `count` points.
data::PointCloud subsample_cloud(const data::PointCloud& cloud, std::size_t count,
                                 rng::Engine& rng);

/// kNN part around a uniformly chosen anchor point.
data::PointCloud knn_part(const data::PointCloud& cloud, std::size_t count,
                          rng::Engine& rng);

/// Triplets for the given anchor clouds. Whole sizes are drawn uniformly in
/// [whole_min, whole_max], part sizes in [part_min, part_max]. Negatives are
/// drawn uniformly over the clouds of every other class. Throws DataError
/// when an anchor's class has no negative candidates or a cloud is smaller
/// than whole_min.
TripletBatch build_triplets(const data::Dataset& dataset,
                            const std::vector<std::size_t>& anchors,
                            rng::Engine& rng, const TripletConfig& cfg);

/// Samples `count` anchors uniformly, then assembles their triplets.
TripletBatch build_triplets(const data::Dataset& dataset, rng::Engine& rng,
                            const TripletConfig& cfg, std::size_t count);

}  // namespace hycore::loss
