#include "gvv/core/quantize.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gvv/error.h"

namespace gvv {

namespace {

void check_bits(int bits) {
  if (bits != 8 && bits != 16) {
    throw Error(ErrorKind::kInvalidArgument, "quantization bits must be 8 or 16");
  }
}

void check_channel(const QuantRange& range, std::size_t channel) {
  check_bits(range.bits);
  if (channel >= range.min.size() || range.min.size() != range.max.size()) {
    throw Error(ErrorKind::kOutOfRange, "quantization channel out of range");
  }
  if (!(range.max[channel] > range.min[channel])) {
    throw Error(ErrorKind::kInvalidArgument, "quantization range requires max > min");
  }
}

}  // namespace

double QuantRange::error_bound(std::size_t c) const {
  return (max[c] - min[c]) / (2.0 * levels());
}

QuantRange make_range(std::vector<double> min, std::vector<double> max, int bits) {
  check_bits(bits);
  if (min.size() != max.size()) {
    throw Error(ErrorKind::kMismatch, "range min/max channel counts differ");
  }
  for (std::size_t c = 0; c < min.size(); ++c) {
    if (!std::isfinite(min[c]) || !std::isfinite(max[c]) || max[c] < min[c]) {
      throw Error(ErrorKind::kInvalidArgument, "range bounds must be finite and ordered");
    }
    if (max[c] == min[c]) max[c] = min[c] + kDegenerateRangeEpsilon;
  }
  return QuantRange{std::move(min), std::move(max), bits};
}

double round_half_away(double x) { return std::round(x); }

std::uint16_t quantize_value(double v, double min, double max, int bits) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::kInvalidArgument, "cannot quantize a non-finite value");
  }
  const double levels = double((1u << bits) - 1u);
  const double q = round_half_away((v - min) / (max - min) * levels);
  return static_cast<std::uint16_t>(std::clamp(q, 0.0, levels));
}

double dequantize_value(std::uint32_t q, double min, double max, int bits) {
  const std::uint32_t levels = (1u << bits) - 1u;
  if (q > levels) {
    throw Error(ErrorKind::kOutOfRange,
                "quantized value " + std::to_string(q) + " exceeds " + std::to_string(levels));
  }
  return min + double(q) / double(levels) * (max - min);
}

std::vector<std::uint16_t> quantize_channel(std::span<const float> values,
                                            const QuantRange& range, std::size_t channel) {
  check_channel(range, channel);
  std::vector<std::uint16_t> out;
  out.reserve(values.size());
  for (float v : values) {
    out.push_back(quantize_value(v, range.min[channel], range.max[channel], range.bits));
  }
  return out;
}

std::vector<float> dequantize_channel(std::span<const std::uint16_t> q, const QuantRange& range,
                                      std::size_t channel) {
  check_channel(range, channel);
  std::vector<float> out;
  out.reserve(q.size());
  for (std::uint16_t v : q) {
    out.push_back(static_cast<float>(
        dequantize_value(v, range.min[channel], range.max[channel], range.bits)));
  }
  return out;
}

}  // namespace gvv
