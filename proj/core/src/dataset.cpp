#include "hycore/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hycore/errors.hpp"
#include "hycore/rng.hpp"
#include "hycore/shapes.hpp"

namespace hycore::data {

std::vector<std::string> DatasetSpec::effective_classes() const {
  return classes.empty() ? shape_names() : classes;
}

std::vector<std::vector<std::size_t>> Dataset::by_class() const {
  std::vector<std::vector<std::size_t>> groups(num_classes());
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    const int label = clouds[i].label;
    if (label < 0 || static_cast<std::size_t>(label) >= groups.size())
      throw DataError("dataset: label out of range for cloud " + clouds[i].id);
    groups[static_cast<std::size_t>(label)].push_back(i);
  }
  return groups;
}

Dataset generate_dataset(const DatasetSpec& spec) {
  if (spec.per_class_train <= 0 || spec.per_class_test <= 0)
    throw ConfigError("dataset: per-class counts must be positive");
  if (spec.points_per_cloud < 8)
    throw ConfigError("dataset: points_per_cloud must be at least 8");
  Dataset ds;
  ds.class_names = spec.effective_classes();
  const int per_class = spec.per_class_train + spec.per_class_test;
  for (std::size_t ci = 0; ci < ds.class_names.size(); ++ci) {
    const ShapeKind kind = shape_from_name(ds.class_names[ci]);
    for (int j = 0; j < per_class; ++j) {
      rng::Engine cloud_rng(
          rng::derive(rng::derive(spec.seed, ci), static_cast<std::uint64_t>(j)));
      PointCloud cloud = generate_shape(
          kind, static_cast<std::size_t>(spec.points_per_cloud), cloud_rng,
          spec.noise_sigma);
      cloud.label = static_cast<int>(ci);
      char idbuf[64];
      std::snprintf(idbuf, sizeof(idbuf), "%s_%04d", ds.class_names[ci].c_str(), j);
      cloud.id = idbuf;
      ds.clouds.push_back(std::move(cloud));
    }
  }
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, const DatasetSpec& spec) {
  Dataset train, test;
  train.class_names = dataset.class_names;
  test.class_names = dataset.class_names;
  const auto groups = dataset.by_class();
  const auto want_train = static_cast<std::size_t>(spec.per_class_train);
  const auto want_test = static_cast<std::size_t>(spec.per_class_test);
  for (std::size_t ci = 0; ci < groups.size(); ++ci) {
    auto indices = groups[ci];
    if (indices.size() < want_train + want_test)
      throw DataError("split: class " + dataset.class_names[ci] + " has " +
                      std::to_string(indices.size()) + " clouds, need " +
                      std::to_string(want_train + want_test));
    rng::Engine class_rng(rng::derive(rng::derive(spec.seed, 0x5eedULL), ci));
    rng::shuffle(indices, class_rng);
    for (std::size_t k = 0; k < want_train; ++k)
      train.clouds.push_back(dataset.clouds[indices[k]]);
    for (std::size_t k = 0; k < want_test; ++k)
      test.clouds.push_back(dataset.clouds[indices[want_train + k]]);
  }
  return {std::move(train), std::move(test)};
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "clouds");
  {
    std::ofstream out(dir / "classes.txt");
    if (!out) throw DataError("save_dataset: cannot write classes.txt");
    for (const auto& name : dataset.class_names) out << name << "\n";
  }
  {
    std::ofstream out(dir / "manifest.csv");
    if (!out) throw DataError("save_dataset: cannot write manifest.csv");
    for (const auto& cloud : dataset.clouds) out << cloud.id << "," << cloud.label << "\n";
  }
  for (const auto& cloud : dataset.clouds)
    save_xyz(cloud, dir / "clouds" / (cloud.id + ".xyz"));
}

Dataset load_dataset(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw DataError("load_dataset: not a directory: " + dir.string());
  Dataset ds;
  {
    std::ifstream in(dir / "classes.txt");
    if (!in) throw DataError("load_dataset: missing classes.txt in " + dir.string());
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) ds.class_names.push_back(line);
    }
  }
  if (ds.class_names.empty())
    throw DataError("load_dataset: classes.txt is empty");
  std::ifstream in(dir / "manifest.csv");
  if (!in) throw DataError("load_dataset: missing manifest.csv in " + dir.string());
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DataError("load_dataset: malformed manifest line " + std::to_string(lineno));
    const std::string id = line.substr(0, comma);
    int label = -1;
    try {
      label = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw DataError("load_dataset: bad label on manifest line " + std::to_string(lineno));
    }
    if (label < 0 || static_cast<std::size_t>(label) >= ds.class_names.size())
      throw DataError("load_dataset: label out of range on manifest line " +
                      std::to_string(lineno));
    if (!seen.insert(id).second)
      throw DataError("load_dataset: duplicate id " + id);
    PointCloud cloud = load_xyz(dir / "clouds" / (id + ".xyz"));
    cloud.id = id;
    cloud.label = label;
    ds.clouds.push_back(std::move(cloud));
  }
  if (ds.clouds.empty()) throw DataError("load_dataset: manifest.csv lists no clouds");
  return ds;
}

}  // namespace hycore::data
