#pragma once

#include <filesystem>

#include <Eigen/Dense>

namespace gvv {

// Pinhole camera, OpenCV axes (x right, y down, z forward). Pixel centers
// sit at integer coordinates.
struct Camera {
  Eigen::Matrix4d view = Eigen::Matrix4d::Identity();  // world -> camera
  double fx = 500.0;
  double fy = 500.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;
  double near_plane = 0.01;
  double far_plane = 1000.0;

  Eigen::Vector3d center() const;
  void validate() const;
};

// Camera at `eye` looking at `target`; fov_y in degrees. `up` points toward
// the top of the image.
Camera look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
               const Eigen::Vector3d& up, double fov_y_deg, int width, int height);

// Text camera file, one `key value...` per line, `#` comments:
//   width W / height H            image size (required)
//   fx F / fy F / cx C / cy C     intrinsics, or `fov_y_deg D` (cx, cy default to center)
//   near N / far F                clip planes (optional)
//   view m00 m01 ... m33          16 numbers, row-major world->camera
//   eye x y z / target x y z / up x y z   alternative to `view`
Camera read_camera(const std::filesystem::path& path);
void write_camera(const std::filesystem::path& path, const Camera& camera);

}  // namespace gvv
