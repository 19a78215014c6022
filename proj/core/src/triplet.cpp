#include "hycore/triplet.hpp"

#include <numeric>

#include "hycore/errors.hpp"

namespace hycore::loss {

data::PointCloud subsample_cloud(const data::PointCloud& cloud, std::size_t count,
                                 rng::Engine& rng) {
  const std::size_t n = cloud.n();
  if (count > n) throw DataError("subsample_cloud: count exceeds cloud size");
  // partial Fisher-Yates: first `count` entries are a uniform subset
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n) - 1));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return data::subset(cloud, idx);
}

data::PointCloud knn_part(const data::PointCloud& cloud, std::size_t count,
                          rng::Engine& rng) {
  const std::size_t n = cloud.n();
  if (count > n) throw DataError("knn_part: part size exceeds cloud size");
  const auto anchor = static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
  return data::subset(cloud, data::knn_indices(cloud, anchor, count));
}

TripletBatch build_triplets(const data::Dataset& dataset,
                            const std::vector<std::size_t>& anchors, rng::Engine& rng,
                            const TripletConfig& cfg) {
  if (dataset.num_classes() < 2)
    throw DataError("build_triplets: need at least 2 classes");
  const auto by_class = dataset.by_class();

  TripletBatch batch;
  batch.wholes.reserve(anchors.size());
  batch.parts_pos.reserve(anchors.size());
  batch.parts_neg.reserve(anchors.size());

  for (const auto ai : anchors) {
    const data::PointCloud& cloud = dataset.clouds.at(ai);
    if (cloud.n() < static_cast<std::size_t>(cfg.whole_min))
      throw DataError("build_triplets: cloud " + cloud.id + " smaller than whole_min");

    const auto whole_n = static_cast<std::size_t>(
        rng.uniform_int(cfg.whole_min,
                        std::min<std::int64_t>(cfg.whole_max,
                                               static_cast<std::int64_t>(cloud.n()))));
    const auto part_n = static_cast<std::size_t>(
        rng.uniform_int(cfg.part_min, cfg.part_max));

    // negatives: uniform over all clouds whose class differs from the anchor
    std::size_t other_total = 0;
    for (std::size_t ci = 0; ci < by_class.size(); ++ci)
      if (ci != static_cast<std::size_t>(cloud.label)) other_total += by_class[ci].size();
    if (other_total == 0)
      throw DataError("build_triplets: no negative candidates for class " +
                      std::to_string(cloud.label));
    auto pick = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(other_total) - 1));
    std::size_t neg_index = 0;
    for (std::size_t ci = 0; ci < by_class.size(); ++ci) {
      if (ci == static_cast<std::size_t>(cloud.label)) continue;
      if (pick < by_class[ci].size()) {
        neg_index = by_class[ci][pick];
        break;
      }
      pick -= by_class[ci].size();
    }
    const data::PointCloud& neg_cloud = dataset.clouds[neg_index];
    const auto neg_part_n = static_cast<std::size_t>(
        rng.uniform_int(cfg.part_min,
                        std::min<std::int64_t>(cfg.part_max,
                                               static_cast<std::int64_t>(neg_cloud.n()))));

    batch.wholes.push_back(subsample_cloud(cloud, whole_n, rng));
    batch.parts_pos.push_back(knn_part(cloud, part_n, rng));
    batch.parts_neg.push_back(knn_part(neg_cloud, neg_part_n, rng));
    batch.part_sizes.push_back(static_cast<int>(part_n));
    batch.labels.push_back(cloud.label);
  }
  return batch;
}

TripletBatch build_triplets(const data::Dataset& dataset, rng::Engine& rng,
                            const TripletConfig& cfg, std::size_t count) {
  if (dataset.size() == 0) throw DataError("build_triplets: empty dataset");
  std::vector<std::size_t> anchors(count);
  for (auto& a : anchors)
    a = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(dataset.size()) - 1));
  return build_triplets(dataset, anchors, rng, cfg);
}

}  // namespace hycore::loss
