#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gvv/codec/backend.h"
#include "gvv/codec/manifest.h"
#include "gvv/codec/qp_policy.h"
#include "gvv/core/packing.h"

namespace gvv {

struct CodecConfig {
  Backend backend = Backend::kLosslessInternal;
  int base_qp = 22;
  // Keyframe interval passed to the external encoder; 0 means one closed
  // GOP per frame group.
  int gop = 0;
  // Empty: resolve through find_encoder().
  std::filesystem::path encoder;
  std::string preset = "medium";
  int deflate_level = 6;

  void validate() const;
};

struct GroupHeader {
  int index = 0;
  int start_frame = 0;
  int num_frames = 0;
  std::uint64_t splat_count = 0;
  int side = 0;
  int sh_degree = 0;

  bool operator==(const GroupHeader&) const = default;
};

struct EncodedStream {
  Stream stream = Stream::kPosHi;
  Backend codec = Backend::kLosslessInternal;
  int qp = 0;
  bool lossless = false;
  int channels = 0;
  // Complete segment file contents (header plus per-channel bitstreams).
  std::vector<std::uint8_t> bytes;

  bool operator==(const EncodedStream&) const = default;
};

struct EncodedGroup {
  GroupHeader header;
  // One range per layout entry, as in PlaneStack::quant.
  std::vector<QuantRange> quant;
  std::vector<EncodedStream> streams;

  const EncodedStream* find(Stream s) const;
  std::uint64_t total_bytes() const;
};

// Streams present for a given SH degree (sh is omitted at degree 0).
std::vector<Stream> streams_for(int sh_degree);

// (start, length) of each group when frame_count frames are cut every
// group_size frames; the last group may be shorter.
std::vector<std::pair<int, int>> group_bounds(int frame_count, int group_size);

// Packs and encodes a whole sequence; group i covers group_bounds()[i].
std::vector<EncodedGroup> encode_sequence(std::span<const GaussianFrame> frames, int group_size,
                                          const CodecConfig& cfg);

// Builds the codec used for a backend; throws kBackend if the external
// encoder cannot be located.
std::unique_ptr<PlaneCodec> make_plane_codec(Backend backend, const CodecConfig& cfg);

EncodedGroup encode_group(const PlaneStack& stack, const CodecConfig& cfg, int group_index = 0);

// Rebuilds the planes of one group from its own segments and manifest entry.
PlaneStack decode_group(const EncodedGroup& enc, const GroupEntry& entry,
                        const CodecConfig& cfg = {});

GroupEntry make_group_entry(const EncodedGroup& enc);

// Writes group_NNNN/<stream>.bin files and manifest.json into dir.
Manifest write_container(std::span<const EncodedGroup> groups, const std::filesystem::path& dir,
                         double fps = 30.0);

// Rebuilds an EncodedGroup from segment bytes ordered like entry.attributes.
EncodedGroup assemble_group(const GroupEntry& entry,
                            std::vector<std::vector<std::uint8_t>> segments);

// Reads one group's segments from a container directory.
EncodedGroup load_group(const std::filesystem::path& dir, const GroupEntry& entry);

}  // namespace gvv
