#include "gvv/codec/codec.h"

#include <cstring>
#include <numeric>
#include <string>

#include "gvv/error.h"
#include "subprocess.h"

namespace gvv {

namespace {

constexpr char kSegmentMagic[4] = {'G', 'V', 'S', 'G'};
constexpr std::uint16_t kSegmentVersion = 1;
constexpr std::size_t kSegmentFixedBytes = 20;

struct SegmentInfo {
  Backend codec = Backend::kLosslessInternal;
  bool lossless = false;
  int qp = 0;
  Stream stream = Stream::kPosHi;
  int channels = 0;
  int num_frames = 0;
  int side = 0;
  // Offsets into the segment bytes of each channel bitstream.
  std::vector<std::pair<std::size_t, std::size_t>> spans;
};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
  }
}

template <typename T>
T get_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return static_cast<T>(v);
}

std::vector<std::uint8_t> write_segment(const SegmentInfo& info,
                                        const std::vector<std::vector<std::uint8_t>>& channels) {
  std::vector<std::uint8_t> out(kSegmentMagic, kSegmentMagic + 4);
  put_le<std::uint16_t>(out, kSegmentVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(info.codec));
  put_le<std::uint8_t>(out, info.lossless ? 1 : 0);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(info.qp));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(info.stream));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(channels.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(info.num_frames));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(info.side));
  for (const auto& c : channels) put_le<std::uint64_t>(out, c.size());
  for (const auto& c : channels) out.insert(out.end(), c.begin(), c.end());
  return out;
}

SegmentInfo parse_segment(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSegmentFixedBytes || std::memcmp(bytes.data(), kSegmentMagic, 4) != 0) {
    throw Error(ErrorKind::kCorruptData, "segment header is missing or truncated");
  }
  const std::uint8_t* p = bytes.data();
  if (get_le<std::uint16_t>(p + 4) != kSegmentVersion) {
    throw Error(ErrorKind::kVersion, "unsupported segment version " +
                                         std::to_string(get_le<std::uint16_t>(p + 4)));
  }
  SegmentInfo info;
  if (p[6] > static_cast<int>(Backend::kH264External)) {
    throw Error(ErrorKind::kCorruptData, "unknown codec id in segment");
  }
  if (p[9] >= kAllStreams.size()) throw Error(ErrorKind::kCorruptData, "unknown stream id");
  info.codec = static_cast<Backend>(p[6]);
  info.lossless = (p[7] & 1) != 0;
  info.qp = p[8];
  info.stream = static_cast<Stream>(p[9]);
  info.channels = get_le<std::uint16_t>(p + 10);
  info.num_frames = static_cast<int>(get_le<std::uint32_t>(p + 12));
  info.side = static_cast<int>(get_le<std::uint32_t>(p + 16));
  std::size_t offset = kSegmentFixedBytes + 8 * static_cast<std::size_t>(info.channels);
  if (bytes.size() < offset) throw Error(ErrorKind::kCorruptData, "segment table truncated");
  for (int c = 0; c < info.channels; ++c) {
    const auto len = get_le<std::uint64_t>(p + kSegmentFixedBytes + 8 * c);
    if (len > bytes.size() - offset) {
      throw Error(ErrorKind::kCorruptData, "segment bitstream truncated");
    }
    info.spans.emplace_back(offset, static_cast<std::size_t>(len));
    offset += len;
  }
  if (offset != bytes.size()) {
    throw Error(ErrorKind::kCorruptData, "trailing bytes after segment bitstreams");
  }
  return info;
}

Attribute stream_attribute(Stream s) {
  switch (s) {
    case Stream::kPosHi:
    case Stream::kPosLo: return Attribute::kPosition;
    case Stream::kRotation: return Attribute::kRotation;
    case Stream::kScale: return Attribute::kScale;
    case Stream::kOpacity: return Attribute::kOpacity;
    case Stream::kColor: return Attribute::kColor;
    case Stream::kSh: return Attribute::kSh;
  }
  return Attribute::kPosition;
}

std::size_t entry_index(const AttributeLayout& layout, Attribute a) {
  for (std::size_t i = 0; i < layout.entries.size(); ++i) {
    if (layout.entries[i].attribute == a) return i;
  }
  throw Error(ErrorKind::kInvalidArgument, "layout has no attribute");
}

std::uint8_t plane_byte(Stream s, std::uint16_t px) {
  if (s == Stream::kPosHi) return split_u16(px).hi;
  if (s == Stream::kPosLo) return split_u16(px).lo;
  return static_cast<std::uint8_t>(px);
}

}  // namespace

void CodecConfig::validate() const {
  if (base_qp < 0 || base_qp > kMaxQp) {
    throw Error(ErrorKind::kOutOfRange, "base_qp " + std::to_string(base_qp) + " outside [0, 51]");
  }
  if (gop < 0) throw Error(ErrorKind::kOutOfRange, "gop must be >= 1 (or 0 for the group length)");
  if (deflate_level < 0 || deflate_level > 9) {
    throw Error(ErrorKind::kOutOfRange, "deflate level outside [0, 9]");
  }
}

const EncodedStream* EncodedGroup::find(Stream s) const {
  for (const auto& e : streams) {
    if (e.stream == s) return &e;
  }
  return nullptr;
}

std::uint64_t EncodedGroup::total_bytes() const {
  std::uint64_t n = 0;
  for (const auto& e : streams) n += e.bytes.size();
  return n;
}

std::vector<Stream> streams_for(int sh_degree) {
  std::vector<Stream> out;
  for (Stream s : kAllStreams) {
    if (s == Stream::kSh && sh_degree == 0) continue;
    out.push_back(s);
  }
  return out;
}

std::unique_ptr<PlaneCodec> make_plane_codec(Backend backend, const CodecConfig& cfg) {
  if (backend == Backend::kLosslessInternal) return std::make_unique<LosslessCodec>(cfg.deflate_level);
  const auto ffmpeg = find_encoder(cfg.encoder);
  if (!ffmpeg) {
    throw Error(ErrorKind::kBackend,
                "external H.264 encoder not found (set " + std::string(kEncoderEnvVar) +
                    " or put ffmpeg on PATH)");
  }
  return std::make_unique<H264Codec>(H264Options{*ffmpeg, cfg.preset, cfg.gop});
}

EncodedGroup encode_group(const PlaneStack& stack, const CodecConfig& cfg, int group_index) {
  cfg.validate();
  validate_stack(stack);
  if (stack.frames.empty()) throw Error(ErrorKind::kInvalidArgument, "stack has no frames");
  const auto codec = make_plane_codec(cfg.backend, cfg);

  EncodedGroup out;
  out.header = {group_index, stack.start_frame, static_cast<int>(stack.num_frames()),
                stack.splat_count, stack.side, stack.layout.sh_degree};
  out.quant = stack.quant;

  const bool all_lossless = cfg.backend == Backend::kLosslessInternal;
  const QpAssignment qps = qp_policy(cfg.base_qp);
  const int frames = static_cast<int>(stack.num_frames());

  for (Stream s : streams_for(stack.layout.sh_degree)) {
    const auto& e = stack.layout.entry(stream_attribute(s));
    QpSetting setting = all_lossless ? QpSetting{0, true} : qps[s];
    std::vector<std::vector<std::uint8_t>> channel_bits;
    for (int c = 0; c < e.channels; ++c) {
      PlaneSequence seq{stack.side, frames, {}};
      seq.data.resize(seq.frame_bytes() * frames);
      for (int t = 0; t < frames; ++t) {
        const auto& px = stack.frames[t].channels[e.first_channel + c].pixels;
        std::uint8_t* dst = seq.frame(t);
        for (std::size_t i = 0; i < px.size(); ++i) dst[i] = plane_byte(s, px[i]);
      }
      channel_bits.push_back(codec->encode(seq, setting.qp, setting.lossless));
    }
    SegmentInfo info;
    info.codec = cfg.backend;
    info.lossless = setting.lossless;
    info.qp = setting.qp;
    info.stream = s;
    info.num_frames = frames;
    info.side = stack.side;
    out.streams.push_back({s, cfg.backend, setting.qp, setting.lossless, e.channels,
                           write_segment(info, channel_bits)});
  }
  return out;
}

std::vector<std::pair<int, int>> group_bounds(int frame_count, int group_size) {
  if (frame_count <= 0) throw Error(ErrorKind::kInvalidArgument, "no frames to group");
  if (group_size <= 0) throw Error(ErrorKind::kOutOfRange, "group size must be >= 1");
  std::vector<std::pair<int, int>> out;
  for (int start = 0; start < frame_count; start += group_size) {
    out.emplace_back(start, std::min(group_size, frame_count - start));
  }
  return out;
}

std::vector<EncodedGroup> encode_sequence(std::span<const GaussianFrame> frames, int group_size,
                                          const CodecConfig& cfg) {
  std::vector<EncodedGroup> out;
  const auto bounds = group_bounds(static_cast<int>(frames.size()), group_size);
  for (std::size_t g = 0; g < bounds.size(); ++g) {
    const auto [start, length] = bounds[g];
    auto stack = pack_group(frames.subspan(start, length),
                            attribute_layout(frames[start].sh_degree));
    stack.start_frame = start;
    out.push_back(encode_group(stack, cfg, static_cast<int>(g)));
  }
  return out;
}

PlaneStack decode_group(const EncodedGroup& enc, const GroupEntry& entry, const CodecConfig& cfg) {
  if (entry.side != enc.header.side) {
    throw Error(ErrorKind::kMismatch, "segment side " + std::to_string(enc.header.side) +
                                          " differs from manifest side " +
                                          std::to_string(entry.side));
  }
  if (entry.length != enc.header.num_frames || entry.splat_count != enc.header.splat_count) {
    throw Error(ErrorKind::kMismatch, "group header differs from manifest entry");
  }
  if (entry.splat_count == 0 || entry.length <= 0 ||
      static_cast<std::uint64_t>(entry.side) * entry.side < entry.splat_count) {
    throw Error(ErrorKind::kCorruptData, "manifest entry has inconsistent dimensions");
  }

  PlaneStack stack;
  stack.side = entry.side;
  stack.splat_count = entry.splat_count;
  stack.start_frame = entry.start_frame;
  stack.layout = attribute_layout(entry.sh_degree);
  stack.quant.resize(stack.layout.entries.size());
  for (std::size_t i = 0; i < stack.layout.entries.size(); ++i) {
    stack.quant[i].bits = stack.layout.entries[i].bits;
  }
  stack.frames.assign(entry.length, FramePlanes{});
  for (auto& f : stack.frames) {
    f.channels.assign(stack.layout.total_dims,
                      Plane{entry.side, std::vector<std::uint16_t>(
                                            static_cast<std::size_t>(entry.side) * entry.side, 0)});
  }

  std::unique_ptr<PlaneCodec> codecs[2];
  for (Stream s : streams_for(entry.sh_degree)) {
    const std::string name(stream_name(s));
    const AttributeEntry* attr = entry.find(name);
    const EncodedStream* es = enc.find(s);
    if (attr == nullptr || es == nullptr) {
      throw Error(ErrorKind::kNotFound, "group " + std::to_string(entry.index) +
                                            " is missing stream " + name);
    }
    const SegmentInfo info = parse_segment(es->bytes);
    const auto expected_codec = backend_from_name(attr->codec);
    if (!expected_codec || *expected_codec != info.codec || info.stream != s) {
      throw Error(ErrorKind::kMismatch, "segment " + name + " does not match its manifest entry");
    }
    if (info.side != entry.side) {
      throw Error(ErrorKind::kMismatch, "segment " + name + " side " + std::to_string(info.side) +
                                            " differs from manifest side " +
                                            std::to_string(entry.side));
    }
    if (info.num_frames != entry.length || info.channels != attr->channels) {
      throw Error(ErrorKind::kMismatch, "segment " + name + " frame or channel count mismatch");
    }
    const std::size_t ei = entry_index(stack.layout, stream_attribute(s));
    const auto& le = stack.layout.entries[ei];
    if (le.channels != attr->channels ||
        attr->quant_min.size() != static_cast<std::size_t>(le.channels) ||
        attr->quant_max.size() != static_cast<std::size_t>(le.channels)) {
      throw Error(ErrorKind::kMismatch, "stream " + name + " channel count differs from layout");
    }
    if (s != Stream::kPosLo) {
      stack.quant[ei].min = attr->quant_min;
      stack.quant[ei].max = attr->quant_max;
    }

    auto& codec = codecs[static_cast<int>(info.codec)];
    if (!codec) codec = make_plane_codec(info.codec, cfg);
    for (int c = 0; c < info.channels; ++c) {
      const auto [off, len] = info.spans[c];
      const PlaneSequence seq =
          codec->decode(std::span(es->bytes).subspan(off, len), entry.side, entry.length);
      for (int t = 0; t < entry.length; ++t) {
        auto& px = stack.frames[t].channels[le.first_channel + c].pixels;
        const std::uint8_t* src = seq.frame(t);
        if (s == Stream::kPosHi) {
          for (std::size_t i = 0; i < px.size(); ++i) px[i] = merge_u16(src[i], split_u16(px[i]).lo);
        } else if (s == Stream::kPosLo) {
          for (std::size_t i = 0; i < px.size(); ++i) px[i] = merge_u16(split_u16(px[i]).hi, src[i]);
        } else {
          std::copy(src, src + px.size(), px.begin());
        }
      }
    }
  }
  return stack;
}

GroupEntry make_group_entry(const EncodedGroup& enc) {
  GroupEntry g;
  g.index = enc.header.index;
  g.start_frame = enc.header.start_frame;
  g.length = enc.header.num_frames;
  g.splat_count = enc.header.splat_count;
  g.side = enc.header.side;
  g.sh_degree = enc.header.sh_degree;
  const auto layout = attribute_layout(g.sh_degree);
  if (enc.quant.size() != layout.entries.size()) {
    throw Error(ErrorKind::kMismatch, "encoded group carries the wrong number of ranges");
  }
  for (const auto& es : enc.streams) {
    const std::string name(stream_name(es.stream));
    const auto& q = enc.quant[entry_index(layout, stream_attribute(es.stream))];
    AttributeEntry a;
    a.name = name;
    a.channels = es.channels;
    a.bits = q.bits;
    a.quant_min = q.min;
    a.quant_max = q.max;
    a.codec = std::string(backend_name(es.codec));
    a.qp = es.qp;
    a.lossless = es.lossless;
    a.segment = segment_path(g.index, name);
    a.url = segment_url(g.index, name);
    a.byte_length = es.bytes.size();
    g.attributes.push_back(std::move(a));
  }
  return g;
}

Manifest write_container(std::span<const EncodedGroup> groups, const std::filesystem::path& dir,
                         double fps) {
  if (groups.empty()) throw Error(ErrorKind::kInvalidArgument, "no groups to write");
  Manifest m;
  m.fps = fps;
  m.sh_degree = groups.front().header.sh_degree;
  for (const auto& g : groups) {
    m.groups.push_back(make_group_entry(g));
    m.frame_count += g.header.num_frames;
  }
  validate_manifest(m);

  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& entry = m.groups[i];
    for (std::size_t k = 0; k < entry.attributes.size(); ++k) {
      const auto path = dir / entry.attributes[k].segment;
      std::filesystem::create_directories(path.parent_path());
      const auto& bytes = groups[i].streams[k].bytes;
      detail::write_file_bytes(path, bytes.data(), bytes.size());
    }
  }
  write_manifest(m, dir / kManifestFile);
  return m;
}

EncodedGroup assemble_group(const GroupEntry& entry,
                            std::vector<std::vector<std::uint8_t>> segments) {
  if (segments.size() != entry.attributes.size()) {
    throw Error(ErrorKind::kMismatch, "segment count differs from manifest entry");
  }
  EncodedGroup enc;
  enc.header = {entry.index, entry.start_frame, entry.length, entry.splat_count, entry.side,
                entry.sh_degree};
  const auto layout = attribute_layout(entry.sh_degree);
  enc.quant.resize(layout.entries.size());
  for (std::size_t i = 0; i < layout.entries.size(); ++i) enc.quant[i].bits = layout.entries[i].bits;

  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& attr = entry.attributes[k];
    if (segments[k].size() != attr.byte_length) {
      throw Error(ErrorKind::kCorruptData,
                  "segment " + attr.segment + " has " + std::to_string(segments[k].size()) +
                      " bytes, manifest says " + std::to_string(attr.byte_length));
    }
    const auto s = stream_from_name(attr.name);
    const auto codec = backend_from_name(attr.codec);
    if (!s || !codec) throw Error(ErrorKind::kCorruptData, "unknown stream or codec in manifest");
    const std::size_t ei = entry_index(layout, stream_attribute(*s));
    enc.quant[ei].min = attr.quant_min;
    enc.quant[ei].max = attr.quant_max;
    enc.streams.push_back(
        {*s, *codec, attr.qp, attr.lossless, attr.channels, std::move(segments[k])});
  }
  return enc;
}

EncodedGroup load_group(const std::filesystem::path& dir, const GroupEntry& entry) {
  std::vector<std::vector<std::uint8_t>> segments;
  for (const auto& attr : entry.attributes) {
    const auto path = dir / attr.segment;
    if (!std::filesystem::is_regular_file(path)) {
      throw Error(ErrorKind::kNotFound, "missing segment " + path.string());
    }
    segments.push_back(detail::read_file_bytes(path));
  }
  return assemble_group(entry, std::move(segments));
}

}  // namespace gvv
