#pragma once

#include "nfr/camera.hpp"
#include "nfr/image.hpp"
#include "nfr/sdf.hpp"

namespace nfr {

struct OracleShading {
  double ambient = 0.35;
  double diffuse = 0.65;
  Eigen::Vector3d background = Eigen::Vector3d::Ones();  // white
};

struct OracleRender {
  ImageRgb rgb;
  ScalarMap distance;  // Euclidean hit distance along the ray; -1 for misses
  ScalarMap depth;     // camera-frame z of the hit; -1 for misses
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> hit;
};

struct SphereTraceConfig {
  double start_distance = 0.0;
  double hit_epsilon = 1e-5;
  int max_steps = 200;
  double escape_distance = 50.0;
};

struct SphereTraceHit {
  bool hit = false;
  double distance = 0.0;  // along the unit ray direction
};

// Classic sphere tracing: step by the signed distance until |sdf| dips below
// hit_epsilon or the budget runs out.
SphereTraceHit sphere_trace(const AnalyticScene& scene,
                            const Eigen::Vector3d& origin,
                            const Eigen::Vector3d& direction,
                            const SphereTraceConfig& cfg = {});

// Ground-truth renderer: sphere-traces every pixel, shades hits with a
// Lambertian headlight plus constant ambient, fills misses with the
// background color. Requires the camera center outside the scene's bounding
// sphere.
OracleRender oracle_render(const AnalyticScene& scene, const CameraModel& cam,
                           const OracleShading& shading = {});

}  // namespace nfr
