#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace gvv {

enum class Attribute { kPosition, kRotation, kScale, kOpacity, kColor, kSh };

inline constexpr std::array<Attribute, 6> kAllAttributes = {
    Attribute::kPosition, Attribute::kRotation, Attribute::kScale,
    Attribute::kOpacity,  Attribute::kColor,    Attribute::kSh};

std::string_view attribute_name(Attribute a);
Attribute attribute_from_name(std::string_view name);

struct LayoutEntry {
  Attribute attribute;
  int channels;
  int bits;
  // Index of this entry's first channel in the flattened channel list.
  int first_channel;
};

// Per-splat attribute dimensions. The entry order is fixed:
// position(3x16) rotation(4x8) scale(3x8) opacity(1x8) color(3x8) sh(kx8).
struct AttributeLayout {
  int sh_degree = 0;
  std::vector<LayoutEntry> entries;
  int total_dims = 0;

  const LayoutEntry& entry(Attribute a) const;
};

AttributeLayout attribute_layout(int sh_degree);

}  // namespace gvv
