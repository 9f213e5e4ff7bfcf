#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nfr/errors.hpp"
#include "nfr/rng.hpp"

namespace nfr {

// Analytic scene built from exact signed-distance primitives, composed by
// union (min of distances). This is the verification oracle: geometry and
// appearance are known in closed form.
struct SdfPrimitive {
  enum class Kind { kSphere, kBox };
  Kind kind = Kind::kSphere;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();  // boxes
  double radius = 1.0;                                     // spheres
  Eigen::Vector3d albedo = Eigen::Vector3d::Ones();

  double distance(const Eigen::Vector3d& p) const;
};

struct AnalyticScene {
  std::vector<SdfPrimitive> primitives;
  double bounding_radius = 1.0;

  bool empty() const { return primitives.empty(); }
};

SdfPrimitive make_sphere(const Eigen::Vector3d& center, double radius,
                         const Eigen::Vector3d& albedo);
SdfPrimitive make_box(const Eigen::Vector3d& center,
                      const Eigen::Vector3d& half_extents,
                      const Eigen::Vector3d& albedo);

struct SdfSample {
  double distance = 0.0;
  Eigen::Vector3d albedo = Eigen::Vector3d::Zero();  // nearest primitive's
};

// Exact min-over-primitives signed distance plus the albedo of the nearest
// primitive. Empty scenes are all free space (+inf distance, black albedo).
SdfSample sdf_eval(const AnalyticScene& scene, const Eigen::Vector3d& p);

// Outward surface normal via central differences of the SDF (eps 1e-5, well
// below any tolerance this project asserts).
Eigen::Vector3d sdf_normal(const AnalyticScene& scene,
                           const Eigen::Vector3d& p);

// Chain of `count` unit cubes attached face to face with at most two bends,
// random bright per-cube colors, recentred and scaled to unit bounding
// radius. Deterministic per seed.
AnalyticScene shepard_metzler(int count, Rng& rng);

}  // namespace nfr
