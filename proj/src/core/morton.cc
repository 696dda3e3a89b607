#include "gvv/core/morton.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gvv/core/quantize.h"
#include "gvv/error.h"

namespace gvv {

std::uint64_t morton_code(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz) {
  if (ix > kMortonMax || iy > kMortonMax || iz > kMortonMax) {
    throw Error(ErrorKind::kOutOfRange, "morton coordinate exceeds 21 bits");
  }
  return spread_bits_3d(ix) | (spread_bits_3d(iy) << 1) | (spread_bits_3d(iz) << 2);
}

std::array<std::uint32_t, 3> morton_lattice(const Vec3f& p, const BoundingBox& bbox) {
  std::array<std::uint32_t, 3> out{};
  for (int a = 0; a < 3; ++a) {
    const double extent = double(bbox.max[a]) - bbox.min[a];
    if (!(extent > 0.0)) continue;
    double t = (double(p[a]) - bbox.min[a]) / extent;
    t = std::clamp(t, 0.0, 1.0);
    out[a] = static_cast<std::uint32_t>(round_half_away(t * kMortonMax));
  }
  return out;
}

std::vector<std::uint32_t> sort_splats_morton(const GaussianFrame& frame) {
  if (frame.splats.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot sort an empty frame");
  }
  const std::size_t n = frame.splats.size();
  std::vector<std::uint64_t> codes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = morton_lattice(frame.splats[i].position, frame.bbox);
    codes[i] = morton_code(c[0], c[1], c[2]);
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return codes[a] < codes[b]; });
  return order;
}

}  // namespace gvv
