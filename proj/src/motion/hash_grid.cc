#include "gvv/motion/hash_grid.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gvv/error.h"

namespace gvv {

double HashGridConfig::growth() const {
  if (levels == 1) return 1.0;
  return std::exp((std::log(double(max_resolution)) - std::log(double(min_resolution))) /
                  (levels - 1));
}

int HashGridConfig::resolution(int level) const {
  // The small epsilon keeps the top level at exactly max_resolution despite
  // rounding in exp/log.
  return static_cast<int>(std::floor(min_resolution * std::pow(growth(), level) + 1e-9));
}

void HashGridConfig::validate() const {
  if (levels < 1 || features < 1) {
    throw Error(ErrorKind::kInvalidArgument, "hash grid needs at least one level and feature");
  }
  if (log2_table_size < 1 || log2_table_size > 30) {
    throw Error(ErrorKind::kOutOfRange, "hash table size must be 2^1 .. 2^30");
  }
  if (min_resolution < 1 || max_resolution < min_resolution) {
    throw Error(ErrorKind::kInvalidArgument, "hash grid resolutions must satisfy 1 <= min <= max");
  }
  for (int l = 1; l < levels; ++l) {
    if (resolution(l) <= resolution(l - 1)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "hash grid resolutions are not strictly increasing at level " +
                      std::to_string(l));
    }
  }
}

CornerSet level_corners(const HashGridConfig& cfg, int level, const std::array<double, 3>& x) {
  return corners_at_resolution(cfg.resolution(level), cfg.table_size(), x);
}

CornerSet corners_at_resolution(double n, std::uint32_t table_size,
                                const std::array<double, 3>& x) {
  std::array<std::uint32_t, 3> cell;
  std::array<double, 3> frac;
  for (int a = 0; a < 3; ++a) {
    const double p = std::clamp(std::isfinite(x[a]) ? x[a] : 0.0, 0.0, 1.0) * n;
    const double f = std::floor(p);
    cell[a] = static_cast<std::uint32_t>(f);
    frac[a] = p - f;
  }
  CornerSet out;
  for (int c = 0; c < 8; ++c) {
    const std::uint32_t dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
    out.index[c] = hash_corner(cell[0] + dx, cell[1] + dy, cell[2] + dz, table_size);
    out.weight[c] = (dx ? frac[0] : 1.0 - frac[0]) * (dy ? frac[1] : 1.0 - frac[1]) *
                    (dz ? frac[2] : 1.0 - frac[2]);
  }
  return out;
}

template <typename Scalar>
void hash_encode(const HashGridConfig& cfg, std::span<const Scalar> tables,
                 const std::array<double, 3>& x, std::span<Scalar> out) {
  const std::size_t T = cfg.table_size(), F = cfg.features;
  if (tables.size() != cfg.levels * T * F || out.size() != cfg.levels * F) {
    throw Error(ErrorKind::kMismatch, "hash_encode: buffer sizes do not match the config");
  }
  for (int l = 0; l < cfg.levels; ++l) {
    const CornerSet cs = corners_at_resolution(cfg.resolution(l), cfg.table_size(), x);
    const Scalar* level = tables.data() + l * T * F;
    Scalar* dst = out.data() + l * F;
    std::fill(dst, dst + F, Scalar(0));
    for (int c = 0; c < 8; ++c) {
      const Scalar w = static_cast<Scalar>(cs.weight[c]);
      const Scalar* row = level + cs.index[c] * F;
      for (std::size_t f = 0; f < F; ++f) dst[f] += w * row[f];
    }
  }
}

template void hash_encode<float>(const HashGridConfig&, std::span<const float>,
                                 const std::array<double, 3>&, std::span<float>);
template void hash_encode<double>(const HashGridConfig&, std::span<const double>,
                                  const std::array<double, 3>&, std::span<double>);

}  // namespace gvv
