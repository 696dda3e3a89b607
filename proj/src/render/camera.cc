#include "gvv/render/camera.h"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "gvv/error.h"

namespace gvv {

Eigen::Vector3d Camera::center() const {
  const Eigen::Matrix3d r = view.topLeftCorner<3, 3>();
  return -r.transpose() * view.topRightCorner<3, 1>();
}

void Camera::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "camera focal lengths must be positive");
  }
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::kInvalidArgument, "camera image size must be at least 1x1");
  }
  if (!(near_plane > 0.0) || !(far_plane > near_plane)) {
    throw Error(ErrorKind::kInvalidArgument, "camera requires 0 < near < far");
  }
}

Camera look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
               const Eigen::Vector3d& up, double fov_y_deg, int width, int height) {
  const Eigen::Vector3d z = (target - eye).normalized();
  Eigen::Vector3d up_orth = up - up.dot(z) * z;
  if (up_orth.norm() < 1e-12) {
    throw Error(ErrorKind::kInvalidArgument, "look_at: up is parallel to view direction");
  }
  const Eigen::Vector3d y = -up_orth.normalized();
  const Eigen::Vector3d x = y.cross(z);

  Camera cam;
  Eigen::Matrix3d r;
  r.row(0) = x;
  r.row(1) = y;
  r.row(2) = z;
  cam.view.setIdentity();
  cam.view.topLeftCorner<3, 3>() = r;
  cam.view.topRightCorner<3, 1>() = -r * eye;
  cam.width = width;
  cam.height = height;
  const double f = 0.5 * height / std::tan(0.5 * fov_y_deg * std::numbers::pi / 180.0);
  cam.fx = cam.fy = f;
  cam.cx = 0.5 * (width - 1);
  cam.cy = 0.5 * (height - 1);
  return cam;
}

Camera read_camera(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "unable to open camera file " + path.string());

  Camera cam;
  bool have_w = false, have_h = false, have_f = false, have_view = false;
  bool have_cx = false, have_cy = false;
  double fov = 0.0;
  Eigen::Vector3d eye(0, 0, -5), target(0, 0, 0), up(0, 1, 0);
  bool have_eye = false;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto bad = [&] {
      return Error(ErrorKind::kCorruptData,
                   path.string() + ":" + std::to_string(lineno) + ": bad value for " + key);
    };
    auto read3 = [&](Eigen::Vector3d& v) {
      if (!(ls >> v.x() >> v.y() >> v.z())) throw bad();
    };
    if (key == "width") {
      if (!(ls >> cam.width)) throw bad();
      have_w = true;
    } else if (key == "height") {
      if (!(ls >> cam.height)) throw bad();
      have_h = true;
    } else if (key == "fx") {
      if (!(ls >> cam.fx)) throw bad();
      have_f = true;
    } else if (key == "fy") {
      if (!(ls >> cam.fy)) throw bad();
      have_f = true;
    } else if (key == "cx") {
      if (!(ls >> cam.cx)) throw bad();
      have_cx = true;
    } else if (key == "cy") {
      if (!(ls >> cam.cy)) throw bad();
      have_cy = true;
    } else if (key == "fov_y_deg") {
      if (!(ls >> fov)) throw bad();
    } else if (key == "near") {
      if (!(ls >> cam.near_plane)) throw bad();
    } else if (key == "far") {
      if (!(ls >> cam.far_plane)) throw bad();
    } else if (key == "view") {
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          if (!(ls >> cam.view(r, c))) throw bad();
      have_view = true;
    } else if (key == "eye") {
      read3(eye);
      have_eye = true;
    } else if (key == "target") {
      read3(target);
    } else if (key == "up") {
      read3(up);
    } else {
      throw Error(ErrorKind::kCorruptData, path.string() + ": unknown camera key " + key);
    }
  }
  if (!have_w || !have_h) {
    throw Error(ErrorKind::kCorruptData, path.string() + ": width and height are required");
  }
  if (have_eye && !have_view) {
    const Camera la = look_at(eye, target, up, fov > 0 ? fov : 60.0, cam.width, cam.height);
    cam.view = la.view;
    if (!have_f) cam.fx = cam.fy = la.fx;
  } else if (!have_f && fov > 0) {
    cam.fx = cam.fy = 0.5 * cam.height / std::tan(0.5 * fov * std::numbers::pi / 180.0);
  }
  if (!have_cx) cam.cx = 0.5 * (cam.width - 1);
  if (!have_cy) cam.cy = 0.5 * (cam.height - 1);
  cam.validate();
  return cam;
}

void write_camera(const std::filesystem::path& path, const Camera& camera) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "unable to write " + path.string());
  out.precision(17);
  out << "width " << camera.width << "\nheight " << camera.height << "\n";
  out << "fx " << camera.fx << "\nfy " << camera.fy << "\n";
  out << "cx " << camera.cx << "\ncy " << camera.cy << "\n";
  out << "near " << camera.near_plane << "\nfar " << camera.far_plane << "\nview";
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out << " " << camera.view(r, c);
  out << "\n";
}

}  // namespace gvv
