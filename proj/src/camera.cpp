#include "nfr/camera.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace nfr {

void CameraModel::validate() const {
  if (width < 1 || height < 1) {
    throw ConfigError("CameraModel: image size must be positive");
  }
  if (!(fx() > 0.0) || !(fy() > 0.0)) {
    throw ConfigError("CameraModel: focal lengths must be positive");
  }
  if (cx() < 0.0 || cx() >= width || cy() < 0.0 || cy() >= height) {
    throw ConfigError("CameraModel: principal point outside the image");
  }
  Eigen::Matrix3d should_be_identity =
      rotation * rotation.transpose() - Eigen::Matrix3d::Identity();
  if (should_be_identity.norm() > 1e-5) {
    throw ConfigError("CameraModel: rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > 1e-5) {
    throw ConfigError("CameraModel: rotation determinant is not +1");
  }
}

CameraModel make_camera(int width, int height, double focal_px,
                        const Eigen::Matrix3d& rotation,
                        const Eigen::Vector3d& translation) {
  CameraModel cam;
  cam.width = width;
  cam.height = height;
  cam.intrinsics = Eigen::Matrix3d::Identity();
  cam.intrinsics(0, 0) = focal_px;
  cam.intrinsics(1, 1) = focal_px;
  cam.intrinsics(0, 2) = 0.5 * width;
  cam.intrinsics(1, 2) = 0.5 * height;
  cam.rotation = rotation;
  cam.translation = translation;
  cam.validate();
  return cam;
}

void look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
             Eigen::Matrix3d& rotation, Eigen::Vector3d& translation) {
  Eigen::Vector3d forward = target - eye;
  double n = forward.norm();
  if (n < 1e-12) throw UsageError("look_at: eye coincides with target");
  forward /= n;
  Eigen::Vector3d up(0.0, 1.0, 0.0);
  Eigen::Vector3d right = forward.cross(up);
  if (right.norm() < 1e-6) {  // looking straight along +-y
    up = Eigen::Vector3d(1.0, 0.0, 0.0);
    right = forward.cross(up);
  }
  right.normalize();
  Eigen::Vector3d down = forward.cross(right);
  rotation.row(0) = right.transpose();
  rotation.row(1) = down.transpose();
  rotation.row(2) = forward.transpose();
  translation = -rotation * eye;
}

Eigen::Vector3d ray_direction(const CameraModel& cam, double u, double v) {
  if (std::isnan(u) || std::isnan(v)) {
    throw UsageError("ray_direction: NaN pixel coordinates");
  }
  Eigen::Vector3d dir_cam((u - cam.cx()) / cam.fx(), (v - cam.cy()) / cam.fy(),
                          1.0);
  dir_cam.normalize();
  return cam.rotation.transpose() * dir_cam;
}

Eigen::Vector3d point_along_ray(const CameraModel& cam, double u, double v,
                                double d) {
  if (std::isnan(d)) throw UsageError("point_along_ray: NaN distance");
  return cam.center() + d * ray_direction(cam, u, v);
}

Eigen::Vector3d project(const CameraModel& cam, const Eigen::Vector3d& p) {
  Eigen::Vector3d pc = cam.rotation * p + cam.translation;
  double u = cam.fx() * pc.x() / pc.z() + cam.cx();
  double v = cam.fy() * pc.y() / pc.z() + cam.cy();
  return {u, v, pc.z()};
}

RayBundle generate_rays(const CameraModel& cam,
                        const std::vector<Eigen::Vector2i>& pixels) {
  cam.validate();
  RayBundle rays;
  const Eigen::Index n = static_cast<Eigen::Index>(pixels.size());
  rays.origins.resize(n, 3);
  rays.directions.resize(n, 3);
  rays.pixels.resize(n, 2);
  Eigen::Vector3d c = cam.center();
  for (Eigen::Index i = 0; i < n; ++i) {
    int u = pixels[i].x(), v = pixels[i].y();
    if (u < 0 || u >= cam.width || v < 0 || v >= cam.height) {
      throw UsageError("generate_rays: pixel (" + std::to_string(u) + ", " +
                       std::to_string(v) + ") outside " +
                       std::to_string(cam.width) + "x" +
                       std::to_string(cam.height));
    }
    rays.origins.row(i) = c.transpose();
    rays.directions.row(i) =
        ray_direction(cam, u + 0.5, v + 0.5).transpose();
    rays.pixels(i, 0) = u;
    rays.pixels(i, 1) = v;
  }
  return rays;
}

RayBundle generate_rays(const CameraModel& cam) {
  std::vector<Eigen::Vector2i> pixels;
  pixels.reserve(static_cast<std::size_t>(cam.width) * cam.height);
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      pixels.emplace_back(u, v);
    }
  }
  return generate_rays(cam, pixels);
}

std::vector<CameraModel> sample_sphere_poses(int count, double radius,
                                             const Eigen::Vector3d& center,
                                             Rng& rng, int width, int height,
                                             double focal_px) {
  if (radius <= 0.0) throw UsageError("sample_sphere_poses: radius <= 0");
  std::vector<CameraModel> poses;
  poses.reserve(count);
  for (int i = 0; i < count; ++i) {
    double z = rng.uniform(-1.0, 1.0);
    double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    Eigen::Vector3d dir(s * std::cos(phi), z, s * std::sin(phi));
    Eigen::Vector3d eye = center + radius * dir;
    Eigen::Matrix3d rot;
    Eigen::Vector3d trans;
    look_at(eye, center, rot, trans);
    poses.push_back(make_camera(width, height, focal_px, rot, trans));
  }
  return poses;
}

std::vector<CameraModel> archimedean_spiral_poses(int count, double radius,
                                                  double turns, int width,
                                                  int height,
                                                  double focal_px) {
  if (count < 2) throw UsageError("archimedean_spiral_poses: count < 2");
  std::vector<CameraModel> poses;
  poses.reserve(count);
  const double theta0 = 0.1 * std::numbers::pi;
  const double theta1 = 0.9 * std::numbers::pi;
  for (int i = 0; i < count; ++i) {
    double s = static_cast<double>(i) / (count - 1);
    double theta = theta0 + (theta1 - theta0) * s;  // polar, from +y
    double phi = 2.0 * std::numbers::pi * turns * s;
    Eigen::Vector3d eye(radius * std::sin(theta) * std::cos(phi),
                        radius * std::cos(theta),
                        radius * std::sin(theta) * std::sin(phi));
    Eigen::Matrix3d rot;
    Eigen::Vector3d trans;
    look_at(eye, Eigen::Vector3d::Zero(), rot, trans);
    poses.push_back(make_camera(width, height, focal_px, rot, trans));
  }
  return poses;
}

}  // namespace nfr
