#include "gvv/core/packing.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gvv/core/morton.h"
#include "gvv/error.h"

namespace gvv {

namespace {

void set_attribute_value(GaussianSplat& s, Attribute a, int c, float v) {
  switch (a) {
    case Attribute::kPosition: s.position[c] = v; break;
    case Attribute::kRotation: s.rotation[c] = v; break;
    case Attribute::kScale: s.log_scale[c] = v; break;
    case Attribute::kOpacity: s.opacity_logit = v; break;
    case Attribute::kColor: s.color[c] = v; break;
    case Attribute::kSh: s.sh[c] = v; break;
  }
}

void check_permutation(const std::vector<std::uint32_t>& perm, std::size_t n) {
  if (perm.size() != n) {
    throw Error(ErrorKind::kMismatch, "permutation length differs from splat count");
  }
  std::vector<bool> seen(n, false);
  for (std::uint32_t i : perm) {
    if (i >= n || seen[i]) {
      throw Error(ErrorKind::kInvalidArgument, "permutation is not a bijection");
    }
    seen[i] = true;
  }
}

}  // namespace

int plane_side(std::size_t splat_count) {
  if (splat_count == 0) {
    throw Error(ErrorKind::kInvalidArgument, "plane_side requires at least one splat");
  }
  std::size_t side = 8;
  while (side * side < splat_count) side += 8;
  return static_cast<int>(side);
}

const QuantRange& PlaneStack::range(Attribute a) const {
  for (std::size_t i = 0; i < layout.entries.size(); ++i) {
    if (layout.entries[i].attribute == a) return quant.at(i);
  }
  throw Error(ErrorKind::kInvalidArgument, "stack has no attribute " +
                                               std::string(attribute_name(a)));
}

double attribute_value(const GaussianSplat& s, Attribute a, int c) {
  switch (a) {
    case Attribute::kPosition: return s.position[c];
    case Attribute::kRotation: return s.rotation[c];
    case Attribute::kScale: return s.log_scale[c];
    case Attribute::kOpacity:
      return std::clamp(s.opacity_logit, -kOpacityLogitClamp, kOpacityLogitClamp);
    case Attribute::kColor: return s.color[c];
    case Attribute::kSh: return s.sh[c];
  }
  return 0.0;
}

PlaneStack pack_group(std::span<const GaussianFrame> frames, const AttributeLayout& layout,
                      std::optional<std::vector<std::uint32_t>> permutation) {
  if (frames.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "pack_group needs at least one frame");
  }
  const std::size_t n = frames.front().splats.size();
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "cannot pack an empty frame");
  for (const auto& f : frames) {
    if (f.splats.size() != n) {
      throw Error(ErrorKind::kMismatch,
                  "frame " + std::to_string(f.frame_index) + " has " +
                      std::to_string(f.splats.size()) + " splats, group expects " +
                      std::to_string(n));
    }
    if (f.sh_degree != layout.sh_degree) {
      throw Error(ErrorKind::kMismatch, "frame SH degree differs from layout");
    }
  }

  PlaneStack stack;
  stack.layout = layout;
  stack.splat_count = n;
  stack.side = plane_side(n);
  stack.start_frame = frames.front().frame_index;
  stack.permutation = permutation ? std::move(*permutation) : sort_splats_morton(frames.front());
  check_permutation(stack.permutation, n);

  for (const auto& e : layout.entries) {
    std::vector<double> lo(e.channels, std::numeric_limits<double>::infinity());
    std::vector<double> hi(e.channels, -std::numeric_limits<double>::infinity());
    for (const auto& f : frames) {
      for (const auto& s : f.splats) {
        for (int c = 0; c < e.channels; ++c) {
          const double v = attribute_value(s, e.attribute, c);
          if (!std::isfinite(v)) {
            throw Error(ErrorKind::kInvalidArgument,
                        "non-finite " + std::string(attribute_name(e.attribute)) + " value");
          }
          lo[c] = std::min(lo[c], v);
          hi[c] = std::max(hi[c], v);
        }
      }
    }
    stack.quant.push_back(make_range(std::move(lo), std::move(hi), e.bits));
  }

  const std::size_t pixels = std::size_t(stack.side) * stack.side;
  stack.frames.reserve(frames.size());
  for (const auto& f : frames) {
    FramePlanes fp;
    fp.channels.reserve(layout.total_dims);
    for (std::size_t ei = 0; ei < layout.entries.size(); ++ei) {
      const auto& e = layout.entries[ei];
      const auto& r = stack.quant[ei];
      for (int c = 0; c < e.channels; ++c) {
        Plane plane{stack.side, std::vector<std::uint16_t>(pixels, 0)};
        for (std::size_t k = 0; k < n; ++k) {
          const auto& s = f.splats[stack.permutation[k]];
          plane.pixels[k] =
              quantize_value(attribute_value(s, e.attribute, c), r.min[c], r.max[c], r.bits);
        }
        fp.channels.push_back(std::move(plane));
      }
    }
    stack.frames.push_back(std::move(fp));
  }
  return stack;
}

void validate_stack(const PlaneStack& stack) {
  if (stack.side <= 0 || stack.side % 8 != 0) {
    throw Error(ErrorKind::kMismatch, "plane side must be a positive multiple of 8");
  }
  if (stack.splat_count > std::size_t(stack.side) * stack.side) {
    throw Error(ErrorKind::kMismatch, "splat count exceeds plane capacity");
  }
  if (stack.quant.size() != stack.layout.entries.size()) {
    throw Error(ErrorKind::kMismatch, "one quantization range per attribute required");
  }
  for (std::size_t i = 0; i < stack.quant.size(); ++i) {
    if (stack.quant[i].channels() != std::size_t(stack.layout.entries[i].channels) ||
        stack.quant[i].bits != stack.layout.entries[i].bits) {
      throw Error(ErrorKind::kMismatch, "quantization range does not match layout");
    }
  }
  const std::size_t pixels = std::size_t(stack.side) * stack.side;
  for (const auto& f : stack.frames) {
    if (f.channels.size() != std::size_t(stack.layout.total_dims)) {
      throw Error(ErrorKind::kMismatch, "frame has wrong number of channel planes");
    }
    for (const auto& p : f.channels) {
      if (p.side != stack.side || p.pixels.size() != pixels) {
        throw Error(ErrorKind::kMismatch, "plane dimensions inconsistent with stack side");
      }
    }
  }
}

GaussianFrame unpack_frame(const PlaneStack& stack, std::size_t t, bool normalize_rotation) {
  if (t >= stack.frames.size()) {
    throw Error(ErrorKind::kOutOfRange, "frame " + std::to_string(t) + " outside group of " +
                                            std::to_string(stack.frames.size()));
  }
  if (stack.splat_count == 0) {
    throw Error(ErrorKind::kInvalidArgument, "stack holds no splats");
  }
  validate_stack(stack);

  const auto& layout = stack.layout;
  const std::size_t n = stack.splat_count;
  const auto& planes = stack.frames[t].channels;
  const std::size_t sh_len = 3 * sh_coeffs_per_channel(layout.sh_degree);

  std::vector<GaussianSplat> splats(n);
  for (auto& s : splats) s.sh.assign(sh_len, 0.f);
  for (std::size_t ei = 0; ei < layout.entries.size(); ++ei) {
    const auto& e = layout.entries[ei];
    const auto& r = stack.quant[ei];
    for (int c = 0; c < e.channels; ++c) {
      const auto& px = planes[e.first_channel + c].pixels;
      const double lo = r.min[c];
      const double span = r.max[c] - r.min[c];
      const double levels = double(r.levels());
      for (std::size_t k = 0; k < n; ++k) {
        if (px[k] > r.levels()) {
          throw Error(ErrorKind::kOutOfRange, "plane value exceeds quantization levels");
        }
        const double v = lo + px[k] / levels * span;
        set_attribute_value(splats[k], e.attribute, c, static_cast<float>(v));
      }
    }
  }
  if (normalize_rotation) {
    for (auto& s : splats) s.normalize_rotation();
  }
  return make_frame(std::move(splats), stack.start_frame + static_cast<int>(t),
                    layout.sh_degree);
}

}  // namespace gvv
