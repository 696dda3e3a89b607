#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace gvv {

struct HashGridConfig {
  int levels = 16;
  int features = 4;
  int log2_table_size = 19;
  int min_resolution = 16;
  int max_resolution = 512;

  std::uint32_t table_size() const { return 1u << log2_table_size; }
  int feature_dims() const { return levels * features; }
  // Geometric per-level growth exp((ln max - ln min) / (levels - 1)).
  double growth() const;
  int resolution(int level) const;
  void validate() const;
};

// Spatial hash primes (as in Instant-NGP).
inline constexpr std::array<std::uint32_t, 3> kHashPrimes = {1u, 2654435761u, 805459861u};

// (x*p1 xor y*p2 xor z*p3) mod T in 32-bit unsigned arithmetic; T is a power
// of two.
constexpr std::uint32_t hash_corner(std::uint32_t x, std::uint32_t y, std::uint32_t z,
                                    std::uint32_t table_size) {
  return ((x * kHashPrimes[0]) ^ (y * kHashPrimes[1]) ^ (z * kHashPrimes[2])) & (table_size - 1);
}

// The 8 corners touched by a point at one level: table row index and
// trilinear weight. Corner c has offset (c & 1, (c >> 1) & 1, (c >> 2) & 1).
struct CornerSet {
  std::array<std::uint32_t, 8> index;
  std::array<double, 8> weight;
};

// x is clamped into [0, 1]^3 first.
CornerSet level_corners(const HashGridConfig& cfg, int level, const std::array<double, 3>& x);
// Same, for a precomputed level resolution.
CornerSet corners_at_resolution(double resolution, std::uint32_t table_size,
                                const std::array<double, 3>& x);

// Concatenated per-level trilinear features, coarse to fine. tables holds
// levels * table_size * features values, row-major by (level, entry).
template <typename Scalar>
void hash_encode(const HashGridConfig& cfg, std::span<const Scalar> tables,
                 const std::array<double, 3>& x, std::span<Scalar> out);

}  // namespace gvv
