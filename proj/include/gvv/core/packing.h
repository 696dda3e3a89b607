#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gvv/core/layout.h"
#include "gvv/core/quantize.h"
#include "gvv/core/types.h"

namespace gvv {

// Smallest multiple of 8 whose square holds splat_count pixels.
int plane_side(std::size_t splat_count);

// One attribute channel of one frame laid out as a side x side image,
// row-major. Position channels hold 16-bit values, everything else 8-bit.
struct Plane {
  int side = 0;
  std::vector<std::uint16_t> pixels;

  bool operator==(const Plane&) const = default;
};

struct FramePlanes {
  // One plane per layout channel, in layout order.
  std::vector<Plane> channels;

  bool operator==(const FramePlanes&) const = default;
};

// A frame group baked into integer planes. Pixel k (row-major) of every
// plane in a frame describes the same splat.
struct PlaneStack {
  int side = 0;
  std::size_t splat_count = 0;
  int start_frame = 0;
  AttributeLayout layout;
  // One range per layout entry, shared by every frame of the group.
  std::vector<QuantRange> quant;
  // permutation[k] = input splat index stored at pixel k.
  std::vector<std::uint32_t> permutation;
  std::vector<FramePlanes> frames;

  std::size_t num_frames() const { return frames.size(); }
  const QuantRange& range(Attribute a) const;
};

inline constexpr float kOpacityLogitClamp = 10.f;

// Raw value of channel c of attribute a in the quantization domain (log
// scale, clamped opacity logit).
double attribute_value(const GaussianSplat& s, Attribute a, int c);

// Quantizes and lays out every frame of a group. The permutation defaults to
// the Morton order of the first frame. All frames must share splat count and
// SH degree.
PlaneStack pack_group(std::span<const GaussianFrame> frames,
                      const AttributeLayout& layout,
                      std::optional<std::vector<std::uint32_t>> permutation = std::nullopt);

// Rebuilds frame t in pixel-scan order. Quaternions are re-normalized unless
// normalize_rotation is false, which exposes the raw dequantized lattice
// values for precision checks.
GaussianFrame unpack_frame(const PlaneStack& stack, std::size_t t,
                           bool normalize_rotation = true);

// Checks plane dimensions and counts; throws gvv::Error on inconsistency.
void validate_stack(const PlaneStack& stack);

}  // namespace gvv
