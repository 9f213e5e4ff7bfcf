#include "nfr/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace nfr {

double SdfPrimitive::distance(const Eigen::Vector3d& p) const {
  if (kind == Kind::kSphere) {
    return (p - center).norm() - radius;
  }
  // Exact box SDF: positive part from the outside corner distance, negative
  // part from the largest interior slab deficit.
  Eigen::Vector3d q = (p - center).cwiseAbs() - half_extents;
  double outside = q.cwiseMax(0.0).norm();
  double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

SdfPrimitive make_sphere(const Eigen::Vector3d& center, double radius,
                         const Eigen::Vector3d& albedo) {
  SdfPrimitive prim;
  prim.kind = SdfPrimitive::Kind::kSphere;
  prim.center = center;
  prim.radius = radius;
  prim.albedo = albedo;
  return prim;
}

SdfPrimitive make_box(const Eigen::Vector3d& center,
                      const Eigen::Vector3d& half_extents,
                      const Eigen::Vector3d& albedo) {
  SdfPrimitive prim;
  prim.kind = SdfPrimitive::Kind::kBox;
  prim.center = center;
  prim.half_extents = half_extents;
  prim.albedo = albedo;
  return prim;
}

SdfSample sdf_eval(const AnalyticScene& scene, const Eigen::Vector3d& p) {
  SdfSample best;
  best.distance = std::numeric_limits<double>::infinity();
  for (const auto& prim : scene.primitives) {
    double d = prim.distance(p);
    if (d < best.distance) {
      best.distance = d;
      best.albedo = prim.albedo;
    }
  }
  return best;
}

Eigen::Vector3d sdf_normal(const AnalyticScene& scene,
                           const Eigen::Vector3d& p) {
  const double eps = 1e-5;
  Eigen::Vector3d n;
  for (int axis = 0; axis < 3; ++axis) {
    Eigen::Vector3d dp = Eigen::Vector3d::Zero();
    dp(axis) = eps;
    n(axis) = sdf_eval(scene, p + dp).distance -
              sdf_eval(scene, p - dp).distance;
  }
  double len = n.norm();
  if (len < 1e-12) return Eigen::Vector3d(0.0, 0.0, 1.0);
  return n / len;
}

AnalyticScene shepard_metzler(int count, Rng& rng) {
  if (count < 2) throw UsageError("shepard_metzler: need at least 2 cubes");

  // Random walk on the integer grid: straight runs separated by up to two
  // perpendicular bends, no cell revisited.
  const Eigen::Vector3i axes[6] = {
      {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::vector<Eigen::Vector3i> cells;
  std::set<std::array<int, 3>> used;
  auto key = [](const Eigen::Vector3i& c) {
    return std::array<int, 3>{c.x(), c.y(), c.z()};
  };

  for (int attempt = 0; attempt < 64; ++attempt) {
    cells.clear();
    used.clear();
    Eigen::Vector3i pos(0, 0, 0);
    cells.push_back(pos);
    used.insert(key(pos));
    Eigen::Vector3i dir = axes[rng.below(6)];
    int bends = 0;
    // Pre-plan run lengths: split count-1 moves into at most three runs.
    while (static_cast<int>(cells.size()) < count) {
      int remaining = count - static_cast<int>(cells.size());
      int run = (bends < 2 && remaining > 1)
                    ? 1 + static_cast<int>(rng.below(
                              static_cast<std::uint64_t>(remaining)))
                    : remaining;
      bool stuck = false;
      for (int s = 0; s < run; ++s) {
        pos += dir;
        if (used.count(key(pos))) {
          stuck = true;
          break;
        }
        cells.push_back(pos);
        used.insert(key(pos));
      }
      if (stuck) break;
      if (static_cast<int>(cells.size()) < count) {
        // Bend into a perpendicular direction.
        Eigen::Vector3i next;
        do {
          next = axes[rng.below(6)];
        } while (next.dot(dir) != 0);
        dir = next;
        ++bends;
      }
    }
    if (static_cast<int>(cells.size()) == count) break;
  }
  if (static_cast<int>(cells.size()) != count) {
    throw UsageError("shepard_metzler: failed to build a chain");
  }

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& c : cells) centroid += c.cast<double>();
  centroid /= static_cast<double>(count);

  // Unit cubes: half extent 0.5 around each cell; bounding radius is the
  // farthest corner from the centroid.
  double max_corner = 0.0;
  for (const auto& c : cells) {
    Eigen::Vector3d d = (c.cast<double>() - centroid).cwiseAbs() +
                        Eigen::Vector3d::Constant(0.5);
    max_corner = std::max(max_corner, d.norm());
  }
  double scale = 1.0 / max_corner;

  AnalyticScene scene;
  scene.bounding_radius = 1.0;
  for (const auto& c : cells) {
    Eigen::Vector3d center = (c.cast<double>() - centroid) * scale;
    // Bright, saturated palette: one dominant channel per cube.
    Eigen::Vector3d albedo(0.15 + 0.8 * rng.uniform(),
                           0.15 + 0.8 * rng.uniform(),
                           0.15 + 0.8 * rng.uniform());
    albedo(rng.below(3)) = 0.95;
    scene.primitives.push_back(make_box(
        center, Eigen::Vector3d::Constant(0.5 * scale), albedo));
  }
  return scene;
}

}  // namespace nfr
