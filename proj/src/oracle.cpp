#include "nfr/oracle.hpp"

#include <cmath>

namespace nfr {

SphereTraceHit sphere_trace(const AnalyticScene& scene,
                            const Eigen::Vector3d& origin,
                            const Eigen::Vector3d& direction,
                            const SphereTraceConfig& cfg) {
  if (scene.empty()) return {};
  double t = cfg.start_distance;
  for (int i = 0; i < cfg.max_steps; ++i) {
    double d = sdf_eval(scene, origin + t * direction).distance;
    if (std::abs(d) < cfg.hit_epsilon) return {true, t};
    t += d;
    if (t > cfg.escape_distance) return {};
  }
  // Ran out of budget; count it as a hit only if we are already close.
  double d = sdf_eval(scene, origin + t * direction).distance;
  return {std::abs(d) < 1e-3, t};
}

OracleRender oracle_render(const AnalyticScene& scene, const CameraModel& cam,
                           const OracleShading& shading) {
  cam.validate();
  if (!scene.empty() &&
      cam.center().norm() <= scene.bounding_radius) {
    throw UsageError("oracle_render: camera inside the scene bounds");
  }
  OracleRender out;
  out.rgb = ImageRgb(cam.width, cam.height);
  out.distance = ScalarMap::Constant(cam.height, cam.width, -1.0f);
  out.depth = ScalarMap::Constant(cam.height, cam.width, -1.0f);
  out.hit.setConstant(cam.height, cam.width, false);

  const Eigen::Vector3d origin = cam.center();
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      Eigen::Vector3d dir = ray_direction(cam, u + 0.5, v + 0.5);
      SphereTraceHit hit = sphere_trace(scene, origin, dir);
      if (!hit.hit) {
        out.rgb.set_pixel(u, v,
                          static_cast<float>(shading.background.x()),
                          static_cast<float>(shading.background.y()),
                          static_cast<float>(shading.background.z()));
        continue;
      }
      Eigen::Vector3d p = origin + hit.distance * dir;
      SdfSample sample = sdf_eval(scene, p);
      Eigen::Vector3d n = sdf_normal(scene, p);
      // Headlight: light arrives along the viewing ray.
      double lambert = std::max(0.0, n.dot(-dir));
      Eigen::Vector3d color =
          sample.albedo * (shading.ambient + shading.diffuse * lambert);
      out.rgb.set_pixel(u, v, static_cast<float>(color.x()),
                        static_cast<float>(color.y()),
                        static_cast<float>(color.z()));
      out.distance(v, u) = static_cast<float>(hit.distance);
      Eigen::Vector3d pc = cam.rotation * p + cam.translation;
      out.depth(v, u) = static_cast<float>(pc.z());
      out.hit(v, u) = true;
    }
  }
  out.rgb = out.rgb.clamped();
  return out;
}

}  // namespace nfr
