#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gvv/core/types.h"
#include "gvv/render/camera.h"

namespace gvv {

struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<float> rgb;    // width * height * 3, row-major
  std::vector<float> alpha;  // width * height, accumulated coverage

  ImageBuffer() = default;
  ImageBuffer(int w, int h)
      : width(w), height(h), rgb(std::size_t(w) * h * 3, 0.f), alpha(std::size_t(w) * h, 0.f) {}

  float* pixel(int x, int y) { return &rgb[(std::size_t(y) * width + x) * 3]; }
  const float* pixel(int x, int y) const { return &rgb[(std::size_t(y) * width + x) * 3]; }
};

// 2D covariance floor added in pixel units before inversion.
inline constexpr double kCovarianceFloor = 0.3;
// Splat footprint is the bounding box of its 3-sigma ellipse.
inline constexpr double kExtentSigmas = 3.0;
inline constexpr float kMinAlpha = 1.f / 255.f;
inline constexpr float kMinTransmittance = 1.f / 255.f;

Eigen::Matrix3d rotation_matrix(const std::array<float, 4>& wxyz);

// Sigma = R S S^T R^T with S = diag(scales).
Eigen::Matrix3d covariance_3d(const std::array<float, 4>& rotation, const Vec3f& scales);

struct ProjectedSplat {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;  // includes kCovarianceFloor
  double depth = 0.0;   // camera-space z
};

// Returns nullopt when the splat is not in front of the near plane or
// beyond the far plane.
std::optional<ProjectedSplat> project_splat(const GaussianSplat& splat, const Camera& camera);

// View-dependent color from DC + SH up to `degree` (clamped below at 0).
Vec3f splat_rgb(const GaussianSplat& splat, int degree, const Eigen::Vector3d& camera_center);

struct RenderOptions {
  int sh_degree = 0;  // evaluation degree, capped at the frame's degree
  int threads = 1;    // tiles are distributed across threads; output is identical
};

struct RenderStats {
  std::size_t culled = 0;
  std::size_t singular = 0;
  std::size_t drawn = 0;
};

// Front-to-back alpha compositing over a black background.
ImageBuffer render(const GaussianFrame& frame, const Camera& camera,
                   const RenderOptions& options = {}, RenderStats* stats = nullptr);

inline constexpr double kPsnrIdentical = 100.0;

// 10 log10(1 / MSE) over RGB; identical images return kPsnrIdentical.
double psnr(const ImageBuffer& a, const ImageBuffer& b);
// PSNR of the pooled MSE over several image pairs.
double psnr_pooled(const std::vector<ImageBuffer>& a, const std::vector<ImageBuffer>& b);

// Running squared error for pooled PSNR without keeping the images.
struct MseAccumulator {
  double sse = 0.0;
  std::size_t samples = 0;

  void add(const ImageBuffer& a, const ImageBuffer& b);
  double psnr() const;
};

void write_png(const std::filesystem::path& path, const ImageBuffer& image);

}  // namespace gvv
