#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gvv {

// Per-channel affine quantization range. Values are kept in double so that
// a range survives a JSON round trip and the degenerate-range widening below
// is representable.
struct QuantRange {
  std::vector<double> min;
  std::vector<double> max;
  int bits = 8;

  std::size_t channels() const { return min.size(); }
  std::uint32_t levels() const { return (1u << bits) - 1u; }
  // Largest |dequantize(quantize(v)) - v| for channel c.
  double error_bound(std::size_t c) const;

  bool operator==(const QuantRange&) const = default;
};

inline constexpr double kDegenerateRangeEpsilon = 1e-6;

// Builds a range from observed per-channel extrema; channels with
// max == min are widened to max = min + kDegenerateRangeEpsilon.
QuantRange make_range(std::vector<double> min, std::vector<double> max,
                      int bits);

// Ties round away from zero.
double round_half_away(double x);

std::vector<std::uint16_t> quantize_channel(std::span<const float> values,
                                            const QuantRange& range,
                                            std::size_t channel = 0);
std::vector<float> dequantize_channel(std::span<const std::uint16_t> q,
                                      const QuantRange& range,
                                      std::size_t channel = 0);

std::uint16_t quantize_value(double v, double min, double max, int bits);
double dequantize_value(std::uint32_t q, double min, double max, int bits);

struct SplitU16 {
  std::uint8_t hi;
  std::uint8_t lo;
};

constexpr SplitU16 split_u16(std::uint16_t q) {
  return {static_cast<std::uint8_t>(q >> 8), static_cast<std::uint8_t>(q & 0xff)};
}

constexpr std::uint16_t merge_u16(std::uint8_t hi, std::uint8_t lo) {
  return static_cast<std::uint16_t>((hi << 8) | lo);
}

}  // namespace gvv
