#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nfr/errors.hpp"
#include "nfr/rng.hpp"

namespace nfr {

// Pinhole camera: zero-skew intrinsics and world-to-camera extrinsics
// [R | t]; the camera looks down +z. Pixel (u, v) indexes column u, row v;
// continuous pixel coordinates place integer-pixel centers at (u+0.5, v+0.5).
struct CameraModel {
  Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();   // world -> camera
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  int width = 0;
  int height = 0;

  double fx() const { return intrinsics(0, 0); }
  double fy() const { return intrinsics(1, 1); }
  double cx() const { return intrinsics(0, 2); }
  double cy() const { return intrinsics(1, 2); }

  Eigen::Vector3d center() const {
    return -rotation.transpose() * translation;
  }

  void validate() const;
};

// Simple symmetric camera: focal in pixels, principal point at the image
// center.
CameraModel make_camera(int width, int height, double focal_px,
                        const Eigen::Matrix3d& rotation,
                        const Eigen::Vector3d& translation);

// World-to-camera pose looking from `eye` toward `target`; up defaults to
// +y with a +x fallback when the view direction is (anti)parallel to it.
void look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
             Eigen::Matrix3d& rotation, Eigen::Vector3d& translation);

// World point at Euclidean distance d along the ray through continuous pixel
// coordinates (u, v): center + d * direction, with the direction the
// unit-normalized unprojection of (u, v, 1). d <= 0 is allowed (marching may
// propose it); NaN inputs are not.
Eigen::Vector3d point_along_ray(const CameraModel& cam, double u, double v,
                                double d);

// Unit ray direction in world coordinates for continuous pixel (u, v).
Eigen::Vector3d ray_direction(const CameraModel& cam, double u, double v);

// Projects a world point: returns (u, v, z_cam) with continuous pixel
// coordinates; z_cam <= 0 means behind the camera.
Eigen::Vector3d project(const CameraModel& cam, const Eigen::Vector3d& p);

// One ray per selected pixel, through the pixel center.
struct RayBundle {
  Eigen::MatrixXd origins;     // B x 3
  Eigen::MatrixXd directions;  // B x 3, unit norm
  Eigen::Matrix<int, Eigen::Dynamic, 2> pixels;  // B x (u, v)

  Eigen::Index count() const { return origins.rows(); }
};

RayBundle generate_rays(const CameraModel& cam,
                        const std::vector<Eigen::Vector2i>& pixels);
RayBundle generate_rays(const CameraModel& cam);  // all pixels, row-major

// Camera centers uniform on a sphere around `center`, all looking at it.
std::vector<CameraModel> sample_sphere_poses(int count, double radius,
                                             const Eigen::Vector3d& center,
                                             Rng& rng, int width, int height,
                                             double focal_px);

// Deterministic evaluation trajectory: polar angle linear in the sequence
// index over [0.1 pi, 0.9 pi], azimuth winding `turns` times, all cameras
// looking at the origin-centered object.
std::vector<CameraModel> archimedean_spiral_poses(int count, double radius,
                                                  double turns, int width,
                                                  int height,
                                                  double focal_px);

}  // namespace nfr
