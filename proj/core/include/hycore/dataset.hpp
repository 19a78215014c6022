#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hycore/pointcloud.hpp"

namespace hycore::data {

struct DatasetSpec {
  std::vector<std::string> classes;  // empty selects all eight generators
  int per_class_train = 200;
  int per_class_test = 50;
  int points_per_cloud = 1024;
  double noise_sigma = 0.01;
  std::uint64_t seed = 7;

  std::vector<std::string> effective_classes() const;
};

struct Dataset {
  std::vector<PointCloud> clouds;
  std::vector<std::string> class_names;

  std::size_t size() const { return clouds.size(); }
  std::size_t num_classes() const { return class_names.size(); }
  /// Cloud indices grouped by label.
  std::vector<std::vector<std::size_t>> by_class() const;
};

/// Generates (train+test) clouds per class with ids "<class>_<index>".
/// Per-cloud substreams are derived from the spec seed, so regeneration is
/// bit-identical regardless of order.
Dataset generate_dataset(const DatasetSpec& spec);

/// Deterministic stratified split into exactly per_class_train /
/// per_class_test clouds per class. Throws DataError when a class has fewer
/// clouds than requested.
std::pair<Dataset, Dataset> split(const Dataset& dataset, const DatasetSpec& spec);

// On-disk layout: classes.txt (one name per line), manifest.csv ("id,label"
// per line), clouds/<id>.xyz.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace hycore::data
