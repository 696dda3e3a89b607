#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "gvv/codec/codec.h"
#include "gvv/core/types.h"

namespace gvv {

struct BakeOptions {
  int group_size = 20;
  // Output SH degree; unset keeps the input degree. Lower degrees drop the
  // higher bands, higher ones are rejected.
  std::optional<int> sh_degree;
  // Keyframe pruning; the keyframe's survivors are kept in every frame of
  // the group. A ratio of 0 disables pruning.
  double prune_ratio = 0.3;
  std::size_t target_count = 100000;
  CodecConfig codec;
  double fps = 30.0;
};

struct GroupBakeStats {
  int index = 0;
  int start_frame = 0;
  int length = 0;
  std::size_t input_splats = 0;
  std::size_t output_splats = 0;
  int prune_rounds = 0;
  std::uint64_t bytes = 0;
  double seconds = 0.0;
};

struct BakeReport {
  Manifest manifest;
  std::vector<GroupBakeStats> groups;
  // Wall time split by phase; bake_seconds covers prune, pack and encode.
  double read_seconds = 0.0;
  double bake_seconds = 0.0;
  double write_seconds = 0.0;

  int frame_count() const { return manifest.frame_count; }
  double seconds_per_frame() const;
  double bytes_per_frame() const;
};

// Frames loaded on demand, so that only one group is resident at a time.
struct FrameSource {
  int count = 0;
  std::function<GaussianFrame(int index)> load;
};

FrameSource frames_in_directory(const std::filesystem::path& dir);
FrameSource frames_in_memory(std::span<const GaussianFrame> frames);

// Cuts the sequence into groups, prunes each keyframe, Morton-sorts,
// quantizes, encodes and writes the container into output_dir. Splat counts
// must be constant within a group (kMismatch otherwise) and may change at
// group boundaries.
BakeReport bake(const FrameSource& source, const std::filesystem::path& output_dir,
                const BakeOptions& options = {});

struct GroupSweepRow {
  int group_size = 0;
  int groups = 0;
  double bytes_per_frame = 0.0;

  double kb_per_frame() const { return bytes_per_frame / 1000.0; }
};

// Encodes the whole sequence once per group size and reports the mean
// encoded size per frame.
std::vector<GroupSweepRow> group_size_sweep(std::span<const GaussianFrame> frames,
                                            std::span<const int> group_sizes,
                                            const CodecConfig& codec = {});
// Columns: group_size, groups, kb_per_frame.
std::string group_sweep_csv(std::span<const GroupSweepRow> rows);

// Drops SH bands above `degree`.
GaussianFrame truncate_sh(const GaussianFrame& frame, int degree);

}  // namespace gvv
