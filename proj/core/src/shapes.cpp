#include "hycore/shapes.hpp"

#include <array>
#include <cmath>

#include "hycore/errors.hpp"

namespace hycore::data {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct P3 {
  double x, y, z;
};

// --- primitive surface samplers, all uniform by area ------------------------

P3 sample_sphere(double r, rng::Engine& rng) {
  const double u = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
  return {r * s * std::cos(phi), r * s * std::sin(phi), r * u};
}

P3 sample_triangle(const P3& a, const P3& b, const P3& c, rng::Engine& rng) {
  double u = rng.uniform();
  double v = rng.uniform();
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return {a.x + u * (b.x - a.x) + v * (c.x - a.x),
          a.y + u * (b.y - a.y) + v * (c.y - a.y),
          a.z + u * (b.z - a.z) + v * (c.z - a.z)};
}

double triangle_area(const P3& a, const P3& b, const P3& c) {
  const double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
  const double vx = c.x - a.x, vy = c.y - a.y, vz = c.z - a.z;
  const double cx = uy * vz - uz * vy;
  const double cy = uz * vx - ux * vz;
  const double cz = ux * vy - uy * vx;
  return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

P3 sample_disk(double r, double z, double cx, double cy, rng::Engine& rng) {
  const double rr = r * std::sqrt(rng.uniform());
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  return {cx + rr * std::cos(phi), cy + rr * std::sin(phi), z};
}

P3 sample_cyl_lateral(double r, double z0, double z1, double cx, double cy,
                      rng::Engine& rng) {
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  const double z = rng.uniform(z0, z1);
  return {cx + r * std::cos(phi), cy + r * std::sin(phi), z};
}

// Cone lateral surface: apex at z_apex, base circle radius r at z_base.
// Area density grows linearly from the apex, hence sqrt on the axial draw.
P3 sample_cone_lateral(double r, double z_base, double z_apex, rng::Engine& rng) {
  const double t = std::sqrt(rng.uniform());
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  const double rad = r * t;
  return {rad * std::cos(phi), rad * std::sin(phi), z_apex + t * (z_base - z_apex)};
}

P3 sample_torus(double major, double minor, rng::Engine& rng) {
  const double u = rng.uniform(0.0, 2.0 * kPi);
  double v;
  // outer rim carries more area: accept v with density (R + r cos v)/(R + r)
  for (;;) {
    v = rng.uniform(0.0, 2.0 * kPi);
    const double w = rng.uniform();
    if (w * (major + minor) <= major + minor * std::cos(v)) break;
  }
  const double ring = major + minor * std::cos(v);
  return {ring * std::cos(u), ring * std::sin(u), minor * std::sin(v)};
}

// table: rectangular top plus four cylindrical legs
constexpr double kTableTopZ = 0.35;
constexpr double kTableLegZ0 = -0.45;
constexpr double kTableHx = 0.65, kTableHy = 0.45;
constexpr double kTableLegR = 0.05;
constexpr double kTableLegX = 0.55, kTableLegY = 0.35;

// chair: seat, vertical back, four legs
constexpr double kChairHalf = 0.4;
constexpr double kChairSeatZ = 0.0;
constexpr double kChairBackTop = 0.8;
constexpr double kChairLegZ0 = -0.8;
constexpr double kChairLegR = 0.045;
constexpr double kChairLegXY = 0.35;

std::vector<double> sample_shape_points(ShapeKind kind, std::size_t n,
                                        rng::Engine& rng) {
  std::vector<double> pts;
  pts.reserve(n * 3);
  auto push = [&pts](const P3& p) {
    pts.push_back(p.x);
    pts.push_back(p.y);
    pts.push_back(p.z);
  };

  switch (kind) {
    case ShapeKind::kSphere: {
      for (std::size_t i = 0; i < n; ++i) push(sample_sphere(0.8, rng));
      break;
    }
    case ShapeKind::kCube: {
      const double h = 0.6;
      for (std::size_t i = 0; i < n; ++i) {
        const int face = static_cast<int>(rng.uniform_int(0, 5));
        const double u = rng.uniform(-h, h);
        const double v = rng.uniform(-h, h);
        switch (face) {
          case 0: push({+h, u, v}); break;
          case 1: push({-h, u, v}); break;
          case 2: push({u, +h, v}); break;
          case 3: push({u, -h, v}); break;
          case 4: push({u, v, +h}); break;
          default: push({u, v, -h}); break;
        }
      }
      break;
    }
    case ShapeKind::kCylinder: {
      const double r = 0.45, z0 = -0.7, z1 = 0.7;
      const double lateral = 2.0 * kPi * r * (z1 - z0);
      const double caps = 2.0 * kPi * r * r;
      for (std::size_t i = 0; i < n; ++i) {
        const double pick = rng.uniform(0.0, lateral + caps);
        if (pick < lateral) {
          push(sample_cyl_lateral(r, z0, z1, 0.0, 0.0, rng));
        } else {
          const bool top = rng.uniform() < 0.5;
          push(sample_disk(r, top ? z1 : z0, 0.0, 0.0, rng));
        }
      }
      break;
    }
    case ShapeKind::kCone: {
      const double r = 0.6, z_base = -0.5, z_apex = 0.7;
      const double h = z_apex - z_base;
      const double lateral = kPi * r * std::sqrt(r * r + h * h);
      const double base = kPi * r * r;
      for (std::size_t i = 0; i < n; ++i) {
        const double pick = rng.uniform(0.0, lateral + base);
        if (pick < lateral)
          push(sample_cone_lateral(r, z_base, z_apex, rng));
        else
          push(sample_disk(r, z_base, 0.0, 0.0, rng));
      }
      break;
    }
    case ShapeKind::kTorus: {
      for (std::size_t i = 0; i < n; ++i) push(sample_torus(0.65, 0.22, rng));
      break;
    }
    case ShapeKind::kPyramid: {
      const double h = 0.55;
      const P3 apex{0.0, 0.0, 0.75};
      const double zb = -0.45;
      const P3 b0{+h, +h, zb}, b1{-h, +h, zb}, b2{-h, -h, zb}, b3{+h, -h, zb};
      const std::array<std::array<P3, 3>, 6> tris = {{
          {b0, b1, b2},  // base
          {b0, b2, b3},  // base
          {b0, b1, apex},
          {b1, b2, apex},
          {b2, b3, apex},
          {b3, b0, apex},
      }};
      std::array<double, 6> cum{};
      double total = 0.0;
      for (std::size_t t = 0; t < tris.size(); ++t) {
        total += triangle_area(tris[t][0], tris[t][1], tris[t][2]);
        cum[t] = total;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double pick = rng.uniform(0.0, total);
        std::size_t t = 0;
        while (t + 1 < tris.size() && pick > cum[t]) ++t;
        push(sample_triangle(tris[t][0], tris[t][1], tris[t][2], rng));
      }
      break;
    }
    case ShapeKind::kTable: {
      const double top_area = (2.0 * kTableHx) * (2.0 * kTableHy);
      const double leg_area =
          4.0 * 2.0 * kPi * kTableLegR * (kTableTopZ - kTableLegZ0);
      for (std::size_t i = 0; i < n; ++i) {
        const double pick = rng.uniform(0.0, top_area + leg_area);
        if (pick < top_area) {
          push({rng.uniform(-kTableHx, kTableHx), rng.uniform(-kTableHy, kTableHy),
                kTableTopZ});
        } else {
          const int leg = static_cast<int>(rng.uniform_int(0, 3));
          const double cx = (leg & 1) ? kTableLegX : -kTableLegX;
          const double cy = (leg & 2) ? kTableLegY : -kTableLegY;
          push(sample_cyl_lateral(kTableLegR, kTableLegZ0, kTableTopZ, cx, cy, rng));
        }
      }
      break;
    }
    case ShapeKind::kChair: {
      const double seat_area = (2.0 * kChairHalf) * (2.0 * kChairHalf);
      const double back_area = (2.0 * kChairHalf) * (kChairBackTop - kChairSeatZ);
      const double leg_area =
          4.0 * 2.0 * kPi * kChairLegR * (kChairSeatZ - kChairLegZ0);
      const double total = seat_area + back_area + leg_area;
      for (std::size_t i = 0; i < n; ++i) {
        const double pick = rng.uniform(0.0, total);
        if (pick < seat_area) {
          push({rng.uniform(-kChairHalf, kChairHalf),
                rng.uniform(-kChairHalf, kChairHalf), kChairSeatZ});
        } else if (pick < seat_area + back_area) {
          push({rng.uniform(-kChairHalf, kChairHalf), -kChairHalf,
                rng.uniform(kChairSeatZ, kChairBackTop)});
        } else {
          const int leg = static_cast<int>(rng.uniform_int(0, 3));
          const double cx = (leg & 1) ? kChairLegXY : -kChairLegXY;
          const double cy = (leg & 2) ? kChairLegXY : -kChairLegXY;
          push(sample_cyl_lateral(kChairLegR, kChairLegZ0, kChairSeatZ, cx, cy, rng));
        }
      }
      break;
    }
  }
  return pts;
}

}  // namespace

const std::vector<std::string>& shape_names() {
  static const std::vector<std::string> names = {"sphere", "cube",    "cylinder",
                                                 "cone",   "torus",   "pyramid",
                                                 "table",  "chair"};
  return names;
}

ShapeKind shape_from_name(const std::string& name) {
  const auto& names = shape_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<ShapeKind>(i);
  throw DataError("unknown shape kind: " + name);
}

const std::string& shape_name(ShapeKind kind) {
  return shape_names()[static_cast<std::size_t>(kind)];
}

std::vector<double> sample_surface(ShapeKind kind, std::size_t n, rng::Engine& rng) {
  return sample_shape_points(kind, n, rng);
}

PointCloud generate_shape(ShapeKind kind, std::size_t n, rng::Engine& rng,
                          double sigma) {
  if (n < 8) throw DataError("generate_shape: need at least 8 points");
  PointCloud cloud;
  cloud.pts = sample_shape_points(kind, n, rng);
  if (sigma > 0.0)
    for (auto& v : cloud.pts) v += sigma * rng.normal();
  const double angle = rng.uniform(0.0, 2.0 * kPi);
  const double ca = std::cos(angle), sa = std::sin(angle);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = cloud.pts[3 * i], y = cloud.pts[3 * i + 1];
    cloud.pts[3 * i] = ca * x - sa * y;
    cloud.pts[3 * i + 1] = sa * x + ca * y;
  }
  return normalize(std::move(cloud));
}

}  // namespace hycore::data
