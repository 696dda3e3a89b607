#pragma once

#include <cstdint>
#include <vector>

#include "gvv/core/types.h"

namespace gvv {

inline constexpr int kMortonBits = 21;
inline constexpr std::uint32_t kMortonMax = (1u << kMortonBits) - 1u;

// Spreads the low 21 bits of v so that bit i lands at bit 3i.
constexpr std::uint64_t spread_bits_3d(std::uint32_t v) {
  std::uint64_t x = v & 0x1fffffu;
  x = (x | (x << 32)) & 0x1f00000000ffffULL;
  x = (x | (x << 16)) & 0x1f0000ff0000ffULL;
  x = (x | (x << 8)) & 0x100f00f00f00f00fULL;
  x = (x | (x << 4)) & 0x10c30c30c30c30c3ULL;
  x = (x | (x << 2)) & 0x1249249249249249ULL;
  return x;
}

// Interleaves three 21-bit coordinates; ix occupies bits 0,3,6,...
// Throws gvv::Error(kOutOfRange) when a coordinate needs more than 21 bits.
std::uint64_t morton_code(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz);

// Grid coordinate of p on the 2^21 lattice spanning bbox. Degenerate axes
// map to 0.
std::array<std::uint32_t, 3> morton_lattice(const Vec3f& p, const BoundingBox& bbox);

// Splat order by ascending Morton code of bbox-normalized positions; ties
// keep original index order. result[k] is the index of the k-th splat.
std::vector<std::uint32_t> sort_splats_morton(const GaussianFrame& frame);

}  // namespace gvv
