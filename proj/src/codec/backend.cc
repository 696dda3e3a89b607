#include "gvv/codec/backend.h"

#include <unistd.h>
#include <zlib.h>

#include <cstdlib>
#include <sstream>

#include "gvv/error.h"
#include "subprocess.h"

namespace gvv {

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kLosslessInternal: return "lossless-internal";
    case Backend::kH264External: return "h264-external";
  }
  return "?";
}

std::optional<Backend> backend_from_name(std::string_view name) {
  if (name == "lossless-internal" || name == "lossless") return Backend::kLosslessInternal;
  if (name == "h264-external" || name == "h264") return Backend::kH264External;
  return std::nullopt;
}

namespace {

void check_sequence(const PlaneSequence& seq) {
  if (seq.side <= 0 || seq.num_frames <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "plane sequence must be non-empty");
  }
  if (seq.data.size() != seq.frame_bytes() * seq.num_frames) {
    throw Error(ErrorKind::kMismatch, "plane sequence size does not match side and frame count");
  }
}

}  // namespace

LosslessCodec::LosslessCodec(int level) : level_(level) {
  if (level < 0 || level > 9) {
    throw Error(ErrorKind::kOutOfRange, "deflate level must be in [0, 9]");
  }
}

std::vector<std::uint8_t> LosslessCodec::encode(const PlaneSequence& seq, int, bool) const {
  check_sequence(seq);
  const std::size_t n = seq.frame_bytes();
  std::vector<std::uint8_t> delta(seq.data.size());
  std::copy_n(seq.data.begin(), n, delta.begin());
  for (std::size_t i = n; i < seq.data.size(); ++i) {
    delta[i] = static_cast<std::uint8_t>(seq.data[i] - seq.data[i - n]);
  }
  uLongf out_len = compressBound(static_cast<uLong>(delta.size()));
  std::vector<std::uint8_t> out(out_len);
  const int rc = compress2(out.data(), &out_len, delta.data(), static_cast<uLong>(delta.size()), level_);
  if (rc != Z_OK) throw Error(ErrorKind::kBackend, "deflate failed with code " + std::to_string(rc));
  out.resize(out_len);
  return out;
}

PlaneSequence LosslessCodec::decode(std::span<const std::uint8_t> bits, int side,
                                    int num_frames) const {
  PlaneSequence seq{side, num_frames, {}};
  if (side <= 0 || num_frames <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "plane sequence must be non-empty");
  }
  const std::size_t expect = seq.frame_bytes() * num_frames;
  seq.data.resize(expect);
  uLongf got = static_cast<uLongf>(expect);
  uLong src_len = static_cast<uLong>(bits.size());
  const int rc = uncompress2(seq.data.data(), &got, bits.data(), &src_len);
  if (rc != Z_OK || got != expect || src_len != bits.size()) {
    throw Error(ErrorKind::kCorruptData, "lossless stream is truncated or corrupt (zlib code " +
                                             std::to_string(rc) + ")");
  }
  const std::size_t n = seq.frame_bytes();
  for (std::size_t i = n; i < expect; ++i) {
    seq.data[i] = static_cast<std::uint8_t>(seq.data[i] + seq.data[i - n]);
  }
  return seq;
}

H264Codec::H264Codec(H264Options options) : options_(std::move(options)) {
  if (options_.ffmpeg.empty()) {
    throw Error(ErrorKind::kBackend, "no external encoder configured");
  }
  if (options_.gop < 0) throw Error(ErrorKind::kOutOfRange, "gop must be >= 0");
}

namespace {

std::string tail(const std::string& s, std::size_t n = 2000) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

}  // namespace

std::vector<std::uint8_t> H264Codec::encode(const PlaneSequence& seq, int qp,
                                            bool lossless) const {
  check_sequence(seq);
  if (qp < 0 || qp > 51) throw Error(ErrorKind::kOutOfRange, "qp outside [0, 51]");
  detail::TempDir dir;
  const auto in = dir.path() / "in.gray";
  const auto out = dir.path() / "out.h264";
  detail::write_file_bytes(in, seq.data.data(), seq.data.size());

  const int gop = options_.gop > 0 ? options_.gop : seq.num_frames;
  const std::string size = std::to_string(seq.side) + "x" + std::to_string(seq.side);
  // Closed GOPs without B-frames or scene-cut keyframes keep every group
  // independently decodable starting at its first frame.
  const std::vector<std::string> argv = {
      options_.ffmpeg.string(), "-hide_banner", "-loglevel", "error", "-nostdin", "-y",
      "-f", "rawvideo", "-pix_fmt", "gray", "-s", size, "-r", "30", "-i", in.string(),
      "-c:v", "libx264", "-preset", options_.preset, "-qp", std::to_string(lossless ? 0 : qp),
      "-g", std::to_string(gop), "-keyint_min", std::to_string(gop), "-sc_threshold", "0",
      "-bf", "0", "-threads", "1", "-x264-params", "open-gop=0",
      "-pix_fmt", "gray", "-f", "h264", out.string()};
  const auto r = detail::run_process(argv);
  if (r.exit_code != 0) {
    throw Error(ErrorKind::kBackend, "encoder exited with status " + std::to_string(r.exit_code) +
                                         ": " + tail(r.output));
  }
  return detail::read_file_bytes(out);
}

PlaneSequence H264Codec::decode(std::span<const std::uint8_t> bits, int side,
                                int num_frames) const {
  if (side <= 0 || num_frames <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "plane sequence must be non-empty");
  }
  detail::TempDir dir;
  const auto in = dir.path() / "in.h264";
  const auto out = dir.path() / "out.gray";
  detail::write_file_bytes(in, bits.data(), bits.size());
  const std::vector<std::string> argv = {
      options_.ffmpeg.string(), "-hide_banner", "-loglevel", "error", "-nostdin", "-y",
      "-f", "h264", "-i", in.string(), "-f", "rawvideo", "-pix_fmt", "gray", out.string()};
  const auto r = detail::run_process(argv);
  if (r.exit_code != 0) {
    throw Error(ErrorKind::kCorruptData, "decoder exited with status " +
                                             std::to_string(r.exit_code) + ": " + tail(r.output));
  }
  PlaneSequence seq{side, num_frames, detail::read_file_bytes(out)};
  if (seq.data.size() != seq.frame_bytes() * num_frames) {
    std::ostringstream msg;
    msg << "decoded " << seq.data.size() << " bytes, expected " << num_frames << " frames of "
        << side << "x" << side;
    throw Error(ErrorKind::kCorruptData, msg.str());
  }
  return seq;
}

std::optional<std::filesystem::path> find_encoder(const std::filesystem::path& hint) {
  auto executable = [](const std::filesystem::path& p) {
    return !p.empty() && ::access(p.c_str(), X_OK) == 0 && !std::filesystem::is_directory(p);
  };
  if (!hint.empty()) {
    if (executable(hint)) return hint;
    return std::nullopt;
  }
  if (const char* env = std::getenv(kEncoderEnvVar); env != nullptr && *env != '\0') {
    if (executable(env)) return std::filesystem::path(env);
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  if (path == nullptr) return std::nullopt;
  std::stringstream dirs(path);
  for (std::string d; std::getline(dirs, d, ':');) {
    if (d.empty()) continue;
    const auto candidate = std::filesystem::path(d) / "ffmpeg";
    if (executable(candidate)) return candidate;
  }
  return std::nullopt;
}

}  // namespace gvv
