#include "gvv/codec/qp_policy.h"

#include <string>

#include "gvv/error.h"

namespace gvv {

std::string_view stream_name(Stream s) {
  switch (s) {
    case Stream::kPosHi: return "pos_hi";
    case Stream::kPosLo: return "pos_lo";
    case Stream::kRotation: return "rotation";
    case Stream::kScale: return "scale";
    case Stream::kOpacity: return "opacity";
    case Stream::kColor: return "color";
    case Stream::kSh: return "sh";
  }
  return "?";
}

std::optional<Stream> stream_from_name(std::string_view name) {
  for (Stream s : kAllStreams) {
    if (stream_name(s) == name) return s;
  }
  return std::nullopt;
}

QpAssignment qp_policy(int base_qp) {
  if (base_qp < 0 || base_qp > kMaxQp) {
    throw Error(ErrorKind::kOutOfRange, "base QP " + std::to_string(base_qp) + " outside [0, 51]");
  }
  QpAssignment out;
  for (Stream s : kAllStreams) {
    const bool sensitive =
        s == Stream::kColor || s == Stream::kScale || s == Stream::kRotation;
    out[s].qp = (sensitive && base_qp > kSensitiveQpCap) ? kSensitiveQpCap : base_qp;
  }
  out[Stream::kPosHi] = {0, true};
  return out;
}

}  // namespace gvv
