#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gvv {

enum class Backend { kLosslessInternal, kH264External };

std::string_view backend_name(Backend b);
std::optional<Backend> backend_from_name(std::string_view name);

// num_frames consecutive side x side 8-bit images, frame-major.
struct PlaneSequence {
  int side = 0;
  int num_frames = 0;
  std::vector<std::uint8_t> data;

  std::size_t frame_bytes() const { return static_cast<std::size_t>(side) * side; }
  std::uint8_t* frame(int t) { return data.data() + t * frame_bytes(); }
  const std::uint8_t* frame(int t) const { return data.data() + t * frame_bytes(); }
  bool operator==(const PlaneSequence&) const = default;
};

// A codec is an (encode, decode) pair over 8-bit plane sequences. The
// bitstream carries no framing; the caller supplies side and frame count.
class PlaneCodec {
 public:
  virtual ~PlaneCodec() = default;
  virtual Backend id() const = 0;
  virtual std::vector<std::uint8_t> encode(const PlaneSequence& seq, int qp,
                                           bool lossless) const = 0;
  virtual PlaneSequence decode(std::span<const std::uint8_t> bits, int side,
                               int num_frames) const = 0;
};

// zlib deflate over frame 0 followed by mod-256 frame differences.
class LosslessCodec final : public PlaneCodec {
 public:
  explicit LosslessCodec(int level = 6);
  Backend id() const override { return Backend::kLosslessInternal; }
  std::vector<std::uint8_t> encode(const PlaneSequence& seq, int qp,
                                   bool lossless) const override;
  PlaneSequence decode(std::span<const std::uint8_t> bits, int side,
                       int num_frames) const override;

 private:
  int level_;
};

struct H264Options {
  std::filesystem::path ffmpeg;
  std::string preset = "medium";
  // Keyframe interval; 0 puts a single IDR at the start of the stream.
  int gop = 0;
};

// Runs an external ffmpeg/libx264 process on raw gray frames and returns
// the Annex B elementary stream. QP 0 selects x264's lossless mode.
class H264Codec final : public PlaneCodec {
 public:
  explicit H264Codec(H264Options options);
  Backend id() const override { return Backend::kH264External; }
  std::vector<std::uint8_t> encode(const PlaneSequence& seq, int qp,
                                   bool lossless) const override;
  PlaneSequence decode(std::span<const std::uint8_t> bits, int side,
                       int num_frames) const override;

 private:
  H264Options options_;
};

inline constexpr const char* kEncoderEnvVar = "GVV_FFMPEG";

// Resolves the encoder binary: an explicit path if given, else the
// GVV_FFMPEG environment variable, else `ffmpeg` on PATH.
std::optional<std::filesystem::path> find_encoder(const std::filesystem::path& hint = {});

}  // namespace gvv
