#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gvv {

inline constexpr int kManifestVersion = 1;
inline constexpr const char* kManifestFormat = "gvv-manifest";
inline constexpr const char* kManifestFile = "manifest.json";

// One segment file: every channel of one stream for one group.
struct AttributeEntry {
  std::string name;
  int channels = 0;
  // Quantization bits of the underlying attribute; pos_hi and pos_lo both
  // report 16 and share the position range.
  int bits = 8;
  std::vector<double> quant_min;
  std::vector<double> quant_max;
  std::string codec;
  int qp = 0;
  bool lossless = false;
  // Path relative to the container directory, e.g. group_0003/color.bin.
  std::string segment;
  // Path served over HTTP, e.g. groups/3/color.bin.
  std::string url;
  std::uint64_t byte_length = 0;

  bool operator==(const AttributeEntry&) const = default;
};

struct GroupEntry {
  int index = 0;
  int start_frame = 0;
  int length = 0;
  std::uint64_t splat_count = 0;
  int side = 0;
  int sh_degree = 0;
  std::vector<AttributeEntry> attributes;

  const AttributeEntry* find(const std::string& name) const;
  bool operator==(const GroupEntry&) const = default;
};

struct Manifest {
  int version = kManifestVersion;
  int frame_count = 0;
  double fps = 30.0;
  int sh_degree = 0;
  std::vector<GroupEntry> groups;

  // Index of the group holding frame t.
  std::size_t group_of(int frame) const;
  std::uint64_t total_bytes() const;
  bool operator==(const Manifest&) const = default;
};

std::string segment_path(int group_index, const std::string& stream);
std::string segment_url(int group_index, const std::string& stream);

// Throws unless groups tile [0, frame_count) in order without gaps.
void validate_manifest(const Manifest& m);

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& m, const std::filesystem::path& path);

}  // namespace gvv
