#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace gvv {

using Vec3f = std::array<float, 3>;

// Number of higher-order SH coefficients per color channel for a degree.
constexpr int sh_coeffs_per_channel(int sh_degree) {
  return (sh_degree + 1) * (sh_degree + 1) - 1;
}

// One Gaussian primitive, stored in the raw parameterization used by
// 3DGS training code:
//   - rotation is (w, x, y, z), unit norm;
//   - log_scale is the natural log of the per-axis standard deviation;
//   - opacity_logit is the pre-sigmoid opacity;
//   - color holds the DC spherical-harmonic coefficients;
//   - sh holds 3 * sh_coeffs_per_channel(degree) coefficients, channel-major
//     (all red coefficients first, then green, then blue).
struct GaussianSplat {
  Vec3f position{0.f, 0.f, 0.f};
  std::array<float, 4> rotation{1.f, 0.f, 0.f, 0.f};
  Vec3f log_scale{0.f, 0.f, 0.f};
  float opacity_logit = 0.f;
  Vec3f color{0.f, 0.f, 0.f};
  std::vector<float> sh;

  float opacity() const;
  Vec3f scale() const;
  void normalize_rotation();
};

float sigmoid(float x);
float logit(float p);

struct BoundingBox {
  Vec3f min{0.f, 0.f, 0.f};
  Vec3f max{0.f, 0.f, 0.f};

  bool contains(const Vec3f& p) const;
  float diagonal() const;
};

struct GaussianFrame {
  std::vector<GaussianSplat> splats;
  int frame_index = 0;
  int sh_degree = 0;
  BoundingBox bbox;

  std::size_t size() const { return splats.size(); }
  // Recomputes bbox from splat positions.
  void update_bbox();
};

// Builds a frame and its bounding box; throws on an empty splat list or an
// SH vector whose length does not match `sh_degree`.
GaussianFrame make_frame(std::vector<GaussianSplat> splats, int frame_index,
                         int sh_degree = 0);

}  // namespace gvv
