#include "gvv/core/types.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gvv/error.h"

namespace gvv {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kOutOfRange: return "out of range";
    case ErrorKind::kMismatch: return "mismatch";
    case ErrorKind::kCorruptData: return "corrupt data";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kNotFound: return "not found";
    case ErrorKind::kVersion: return "version";
    case ErrorKind::kBackend: return "backend";
    case ErrorKind::kDiverged: return "diverged";
    case ErrorKind::kNetwork: return "network";
  }
  return "unknown";
}

float sigmoid(float x) { return 1.f / (1.f + std::exp(-x)); }

float logit(float p) { return std::log(p / (1.f - p)); }

float GaussianSplat::opacity() const { return sigmoid(opacity_logit); }

Vec3f GaussianSplat::scale() const {
  return {std::exp(log_scale[0]), std::exp(log_scale[1]), std::exp(log_scale[2])};
}

void GaussianSplat::normalize_rotation() {
  double n2 = 0.0;
  for (float v : rotation) n2 += double(v) * v;
  if (n2 <= 0.0 || !std::isfinite(n2)) {
    rotation = {1.f, 0.f, 0.f, 0.f};
    return;
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (float& v : rotation) v = static_cast<float>(v * inv);
}

bool BoundingBox::contains(const Vec3f& p) const {
  for (int i = 0; i < 3; ++i) {
    if (p[i] < min[i] || p[i] > max[i]) return false;
  }
  return true;
}

float BoundingBox::diagonal() const {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double e = double(max[i]) - min[i];
    d2 += e * e;
  }
  return static_cast<float>(std::sqrt(d2));
}

void GaussianFrame::update_bbox() {
  if (splats.empty()) {
    bbox = {};
    return;
  }
  bbox.min = bbox.max = splats.front().position;
  for (const auto& s : splats) {
    for (int i = 0; i < 3; ++i) {
      bbox.min[i] = std::min(bbox.min[i], s.position[i]);
      bbox.max[i] = std::max(bbox.max[i], s.position[i]);
    }
  }
}

GaussianFrame make_frame(std::vector<GaussianSplat> splats, int frame_index, int sh_degree) {
  if (splats.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "frame must contain at least one splat");
  }
  if (sh_degree < 0 || sh_degree > 3) {
    throw Error(ErrorKind::kOutOfRange, "sh_degree must be in [0, 3]");
  }
  const std::size_t k = 3 * sh_coeffs_per_channel(sh_degree);
  for (const auto& s : splats) {
    if (s.sh.size() != k) {
      throw Error(ErrorKind::kMismatch,
                  "splat has " + std::to_string(s.sh.size()) + " SH coefficients, expected " +
                      std::to_string(k));
    }
  }
  GaussianFrame frame;
  frame.splats = std::move(splats);
  frame.frame_index = frame_index;
  frame.sh_degree = sh_degree;
  frame.update_bbox();
  return frame;
}

}  // namespace gvv
