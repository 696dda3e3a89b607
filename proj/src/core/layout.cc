#include "gvv/core/layout.h"

#include <string>

#include "gvv/core/types.h"
#include "gvv/error.h"

namespace gvv {

std::string_view attribute_name(Attribute a) {
  switch (a) {
    case Attribute::kPosition: return "position";
    case Attribute::kRotation: return "rotation";
    case Attribute::kScale: return "scale";
    case Attribute::kOpacity: return "opacity";
    case Attribute::kColor: return "color";
    case Attribute::kSh: return "sh";
  }
  return "?";
}

Attribute attribute_from_name(std::string_view name) {
  for (Attribute a : kAllAttributes) {
    if (attribute_name(a) == name) return a;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown attribute '" + std::string(name) + "'");
}

const LayoutEntry& AttributeLayout::entry(Attribute a) const {
  for (const auto& e : entries) {
    if (e.attribute == a) return e;
  }
  throw Error(ErrorKind::kInvalidArgument,
              "layout has no entry " + std::string(attribute_name(a)));
}

AttributeLayout attribute_layout(int sh_degree) {
  if (sh_degree < 0 || sh_degree > 3) {
    throw Error(ErrorKind::kOutOfRange,
                "sh_degree " + std::to_string(sh_degree) + " outside [0, 3]");
  }
  AttributeLayout layout;
  layout.sh_degree = sh_degree;
  const int k = 3 * sh_coeffs_per_channel(sh_degree);
  const std::pair<Attribute, int> dims[] = {
      {Attribute::kPosition, 3}, {Attribute::kRotation, 4}, {Attribute::kScale, 3},
      {Attribute::kOpacity, 1},  {Attribute::kColor, 3},    {Attribute::kSh, k},
  };
  int first = 0;
  for (const auto& [attr, channels] : dims) {
    const int bits = attr == Attribute::kPosition ? 16 : 8;
    layout.entries.push_back({attr, channels, bits, first});
    first += channels;
  }
  layout.total_dims = first;
  return layout;
}

}  // namespace gvv
