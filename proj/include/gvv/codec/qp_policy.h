#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace gvv {

// One monochrome video stream family per attribute; position is split into
// its high and low bytes.
enum class Stream { kPosHi, kPosLo, kRotation, kScale, kOpacity, kColor, kSh };

inline constexpr std::array<Stream, 7> kAllStreams = {
    Stream::kPosHi, Stream::kPosLo, Stream::kRotation, Stream::kScale,
    Stream::kOpacity, Stream::kColor, Stream::kSh};

std::string_view stream_name(Stream s);
std::optional<Stream> stream_from_name(std::string_view name);

struct QpSetting {
  int qp = 0;
  bool lossless = false;

  bool operator==(const QpSetting&) const = default;
};

// Above this QP color, scale and rotation stop following the base QP.
inline constexpr int kSensitiveQpCap = 22;
inline constexpr int kMaxQp = 51;

struct QpAssignment {
  std::array<QpSetting, kAllStreams.size()> settings{};

  const QpSetting& operator[](Stream s) const { return settings[static_cast<int>(s)]; }
  QpSetting& operator[](Stream s) { return settings[static_cast<int>(s)]; }
  bool operator==(const QpAssignment&) const = default;
};

// Per-stream QP for a base QP in [0, 51]. At or below the cap every stream
// uses the base QP; above it color, scale and rotation are pinned to the
// cap. The position high byte is always lossless.
QpAssignment qp_policy(int base_qp);

}  // namespace gvv
