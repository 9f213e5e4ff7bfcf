#include <doctest.h>

#include <algorithm>

#include "nfr/camera.hpp"
#include "nfr/rng.hpp"

using namespace nfr;

namespace {

CameraModel axis_camera(const Eigen::Vector3d& translation) {
  // Unit-focal camera, 2x2 image, principal point at (0,0): pixel
  // coordinate (0,0) unprojects to the optical axis.
  CameraModel cam;
  cam.width = 2;
  cam.height = 2;
  cam.intrinsics = Eigen::Matrix3d::Identity();
  cam.rotation = Eigen::Matrix3d::Identity();
  cam.translation = translation;
  return cam;
}

CameraModel random_pose(Rng& rng, int size = 32, double focal = 40.0) {
  Eigen::Vector3d eye(rng.normal(), rng.normal(), rng.normal());
  eye.normalize();
  eye *= 2.0 + rng.uniform();
  Eigen::Matrix3d rot;
  Eigen::Vector3d trans;
  look_at(eye, Eigen::Vector3d::Zero(), rot, trans);
  return make_camera(size, size, focal, rot, trans);
}

}  // namespace

TEST_CASE("principal ray: identity pose, unit distance") {
  CameraModel cam = axis_camera(Eigen::Vector3d::Zero());
  Eigen::Vector3d p = point_along_ray(cam, 0.0, 0.0, 1.0);
  CHECK((p - Eigen::Vector3d(0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("translation composes into the camera center") {
  CameraModel cam = axis_camera(Eigen::Vector3d(0, 0, -2));
  CHECK((cam.center() - Eigen::Vector3d(0, 0, 2)).norm() < 1e-12);
  Eigen::Vector3d p = point_along_ray(cam, 0.0, 0.0, 2.0);
  CHECK((p - Eigen::Vector3d(0, 0, 4)).norm() < 1e-12);
}

TEST_CASE("distance-to-camera identity on random poses") {
  Rng rng(51);
  for (int it = 0; it < 200; ++it) {
    CameraModel cam = random_pose(rng);
    double u = rng.uniform(0.0, cam.width);
    double v = rng.uniform(0.0, cam.height);
    double d = rng.uniform(0.1, 10.0);
    Eigen::Vector3d p = point_along_ray(cam, u, v, d);
    CHECK(std::abs((p - cam.center()).norm() - d) < 1e-5);
  }
}

TEST_CASE("point_along_ray is linear in distance") {
  Rng rng(52);
  CameraModel cam = random_pose(rng);
  double u = 11.3, v = 7.9;
  for (double d : {0.3, 1.0, 4.2}) {
    Eigen::Vector3d a =
        point_along_ray(cam, u, v, 2 * d) - point_along_ray(cam, u, v, d);
    Eigen::Vector3d b =
        point_along_ray(cam, u, v, 3 * d) - point_along_ray(cam, u, v, 2 * d);
    CHECK((a - b).norm() < 1e-6);
  }
}

TEST_CASE("negative distances are allowed, NaN is not") {
  Rng rng(53);
  CameraModel cam = random_pose(rng);
  CHECK_NOTHROW(point_along_ray(cam, 1.0, 1.0, -0.5));
  CHECK_THROWS_AS(point_along_ray(cam, 1.0, 1.0, std::nan("")), UsageError);
}

TEST_CASE("full 2x2 bundle has unit directions") {
  CameraModel cam = axis_camera(Eigen::Vector3d::Zero());
  RayBundle rays = generate_rays(cam);
  REQUIRE(rays.count() == 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(std::abs(rays.directions.row(i).norm() - 1.0) < 1e-6);
  }
}

TEST_CASE("center pixel of an odd image maps to the optical axis") {
  CameraModel cam = make_camera(5, 5, 3.0, Eigen::Matrix3d::Identity(),
                                Eigen::Vector3d::Zero());
  RayBundle rays = generate_rays(cam, {{2, 2}});
  CHECK((rays.directions.row(0).transpose() - Eigen::Vector3d(0, 0, 1))
            .norm() < 1e-12);
}

TEST_CASE("out-of-bounds pixels are usage errors") {
  CameraModel cam = make_camera(4, 4, 3.0, Eigen::Matrix3d::Identity(),
                                Eigen::Vector3d::Zero());
  CHECK_THROWS_AS(generate_rays(cam, {{4, 0}}), UsageError);
  CHECK_THROWS_AS(generate_rays(cam, {{0, -1}}), UsageError);
}

TEST_CASE("project / unproject round trip") {
  Rng rng(54);
  for (int it = 0; it < 50; ++it) {
    CameraModel cam = random_pose(rng);
    RayBundle rays = generate_rays(cam);
    for (Eigen::Index i = 0; i < rays.count(); i += 97) {
      double d = rng.uniform(0.5, 6.0);
      Eigen::Vector3d p =
          rays.origins.row(i).transpose() + d * rays.directions.row(i).transpose();
      Eigen::Vector3d uvz = project(cam, p);
      CHECK(uvz.z() > 0.0);
      CHECK(std::abs(uvz.x() - (rays.pixels(i, 0) + 0.5)) < 1e-4);
      CHECK(std::abs(uvz.y() - (rays.pixels(i, 1) + 0.5)) < 1e-4);
    }
  }
}

TEST_CASE("sphere pose sampler") {
  Eigen::Vector3d center(0.2, -0.4, 0.8);

  SUBCASE("deterministic per seed, exact radius") {
    Rng rng_a(55), rng_b(55);
    auto a = sample_sphere_poses(1, 2.5, center, rng_a, 16, 16, 20.0);
    auto b = sample_sphere_poses(1, 2.5, center, rng_b, 16, 16, 20.0);
    REQUIRE(a.size() == 1);
    CHECK((a[0].rotation - b[0].rotation).norm() == 0.0);
    CHECK((a[0].translation - b[0].translation).norm() == 0.0);
    CHECK(std::abs((a[0].center() - center).norm() - 2.5) < 1e-6);
  }

  SUBCASE("look-at: the target projects to the principal point") {
    Rng rng(56);
    auto poses = sample_sphere_poses(64, 3.0, center, rng, 33, 33, 40.0);
    for (const auto& cam : poses) {
      Eigen::Vector3d uvz = project(cam, center);
      CHECK(uvz.z() > 0.0);
      CHECK(std::abs(uvz.x() - cam.cx()) < 1e-3);
      CHECK(std::abs(uvz.y() - cam.cy()) < 1e-3);
    }
  }

  SUBCASE("centers distribute uniformly") {
    Rng rng(57);
    auto poses = sample_sphere_poses(10000, 1.0, center, rng, 8, 8, 10.0);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& cam : poses) mean += cam.center();
    mean /= static_cast<double>(poses.size());
    CHECK((mean - center).norm() < 0.05);
  }

  SUBCASE("rotations are orthonormal") {
    Rng rng(58);
    auto poses = sample_sphere_poses(100, 2.0, center, rng, 8, 8, 10.0);
    for (const auto& cam : poses) {
      Eigen::Matrix3d err =
          cam.rotation * cam.rotation.transpose() - Eigen::Matrix3d::Identity();
      CHECK(err.norm() < 1e-5);
      CHECK(std::abs(cam.rotation.determinant() - 1.0) < 1e-5);
    }
  }
}

TEST_CASE("archimedean spiral trajectory") {
  auto poses = archimedean_spiral_poses(250, 2.0, 5.0, 16, 16, 20.0);
  REQUIRE(poses.size() == 250);

  SUBCASE("all centers at the configured radius") {
    for (const auto& cam : poses) {
      CHECK(std::abs(cam.center().norm() - 2.0) < 1e-6);
    }
  }

  SUBCASE("consecutive spacing is smooth") {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < poses.size(); ++i) {
      gaps.push_back((poses[i].center() - poses[i - 1].center()).norm());
    }
    std::vector<double> sorted = gaps;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    CHECK(*std::max_element(gaps.begin(), gaps.end()) < 3.0 * median);
  }

  SUBCASE("endpoints span the polar range") {
    // Polar angle from +y: first near the top pole, last near the bottom.
    double cos_first = poses.front().center().normalized().y();
    double cos_last = poses.back().center().normalized().y();
    CHECK(cos_first > 0.9);
    CHECK(cos_last < -0.9);
  }

  CHECK_THROWS_AS(archimedean_spiral_poses(1, 2.0, 5.0, 16, 16, 20.0),
                  UsageError);
}
