#include "hycore/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hycore/errors.hpp"

namespace hycore::data {

PointCloud normalize(PointCloud cloud) {
  const std::size_t n = cloud.n();
  if (n == 0) throw DataError("normalize: empty cloud");
  double cx = 0.0, cy = 0.0, cz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(cloud.pts[3 * i]) || !std::isfinite(cloud.pts[3 * i + 1]) ||
        !std::isfinite(cloud.pts[3 * i + 2]))
      throw DataError("normalize: non-finite coordinate in cloud " + cloud.id);
    cx += cloud.pts[3 * i];
    cy += cloud.pts[3 * i + 1];
    cz += cloud.pts[3 * i + 2];
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  cz /= static_cast<double>(n);
  double max_r2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cloud.pts[3 * i] -= cx;
    cloud.pts[3 * i + 1] -= cy;
    cloud.pts[3 * i + 2] -= cz;
    const double r2 = cloud.pts[3 * i] * cloud.pts[3 * i] +
                      cloud.pts[3 * i + 1] * cloud.pts[3 * i + 1] +
                      cloud.pts[3 * i + 2] * cloud.pts[3 * i + 2];
    max_r2 = std::max(max_r2, r2);
  }
  const double max_r = std::sqrt(max_r2);
  if (max_r > 0.0)
    for (auto& v : cloud.pts) v /= max_r;
  return cloud;
}

std::vector<std::size_t> knn_indices(const PointCloud& cloud, std::size_t anchor,
                                     std::size_t k) {
  const std::size_t n = cloud.n();
  if (anchor >= n) throw DataError("knn_indices: anchor out of range");
  if (k > n) throw DataError("knn_indices: k exceeds cloud size");
  const auto a = cloud.point(anchor);
  std::vector<std::pair<double, std::size_t>> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = cloud.pts[3 * i] - a[0];
    const double dy = cloud.pts[3 * i + 1] - a[1];
    const double dz = cloud.pts[3 * i + 2] - a[2];
    order[i] = {dx * dx + dy * dy + dz * dz, i};
  }
  // (distance, index) pairs make the selection deterministic under ties
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k) - 1,
                   order.end());
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = order[i].second;
  return out;
}

PointCloud subset(const PointCloud& cloud, const std::vector<std::size_t>& indices) {
  PointCloud out;
  out.label = cloud.label;
  out.id = cloud.id;
  out.pts.reserve(indices.size() * 3);
  for (auto i : indices) {
    out.pts.push_back(cloud.pts[3 * i]);
    out.pts.push_back(cloud.pts[3 * i + 1]);
    out.pts.push_back(cloud.pts[3 * i + 2]);
  }
  return out;
}

PointCloud load_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_xyz: cannot open " + path.string());
  PointCloud cloud;
  cloud.id = path.stem().string();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z)) {
      throw DataError("load_xyz: malformed line " + std::to_string(lineno) + " in " +
                      path.string());
    }
    std::string trailing;
    if (ls >> trailing)
      throw DataError("load_xyz: trailing tokens on line " + std::to_string(lineno) +
                      " in " + path.string());
    cloud.pts.push_back(x);
    cloud.pts.push_back(y);
    cloud.pts.push_back(z);
  }
  if (cloud.pts.empty()) throw DataError("load_xyz: empty file " + path.string());
  return normalize(std::move(cloud));
}

void save_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("save_xyz: cannot write " + path.string());
  char buf[128];
  for (std::size_t i = 0; i < cloud.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", cloud.pts[3 * i],
                  cloud.pts[3 * i + 1], cloud.pts[3 * i + 2]);
    out << buf;
  }
  if (!out) throw DataError("save_xyz: write failed for " + path.string());
}

}  // namespace hycore::data
