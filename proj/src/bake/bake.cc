#include "gvv/bake/bake.h"

#include <chrono>
#include <cstdio>
#include <string>

#include "gvv/core/layout.h"
#include "gvv/core/packing.h"
#include "gvv/core/splat_io.h"
#include "gvv/error.h"
#include "gvv/motion/prune.h"

namespace gvv {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

void validate(const BakeOptions& o) {
  if (o.group_size < 1) throw Error(ErrorKind::kOutOfRange, "group size must be >= 1");
  if (o.sh_degree && (*o.sh_degree < 0 || *o.sh_degree > 3)) {
    throw Error(ErrorKind::kOutOfRange, "SH degree must be in [0, 3]");
  }
  if (!(o.prune_ratio >= 0.0 && o.prune_ratio < 1.0)) {
    throw Error(ErrorKind::kOutOfRange, "prune ratio must be in [0, 1)");
  }
  if (o.target_count < 1) throw Error(ErrorKind::kOutOfRange, "target count must be >= 1");
  if (!(o.fps > 0.0)) throw Error(ErrorKind::kOutOfRange, "fps must be positive");
  o.codec.validate();
}

}  // namespace

double BakeReport::seconds_per_frame() const {
  const int n = frame_count();
  return n > 0 ? (read_seconds + bake_seconds + write_seconds) / n : 0.0;
}

double BakeReport::bytes_per_frame() const {
  const int n = frame_count();
  return n > 0 ? static_cast<double>(manifest.total_bytes()) / n : 0.0;
}

FrameSource frames_in_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::kNotFound, dir.string() + " is not a directory");
  }
  auto files = list_frame_files(dir);
  if (files.empty()) throw Error(ErrorKind::kNotFound, "no .ply or .txt frames in " + dir.string());
  FrameSource src;
  src.count = static_cast<int>(files.size());
  src.load = [files = std::move(files)](int i) { return read_splats(files.at(i), i); };
  return src;
}

FrameSource frames_in_memory(std::span<const GaussianFrame> frames) {
  FrameSource src;
  src.count = static_cast<int>(frames.size());
  src.load = [frames](int i) {
    GaussianFrame f = frames[i];
    f.frame_index = i;
    return f;
  };
  return src;
}

GaussianFrame truncate_sh(const GaussianFrame& frame, int degree) {
  if (degree == frame.sh_degree) return frame;
  if (degree > frame.sh_degree) {
    throw Error(ErrorKind::kInvalidArgument, "cannot raise SH degree from " +
                                                 std::to_string(frame.sh_degree) + " to " +
                                                 std::to_string(degree));
  }
  const int from = sh_coeffs_per_channel(frame.sh_degree);
  const int to = sh_coeffs_per_channel(degree);
  GaussianFrame out = frame;
  out.sh_degree = degree;
  for (auto& s : out.splats) {
    std::vector<float> sh(3 * to);
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < to; ++k) sh[c * to + k] = s.sh[c * from + k];
    }
    s.sh = std::move(sh);
  }
  return out;
}

BakeReport bake(const FrameSource& source, const std::filesystem::path& output_dir,
                const BakeOptions& options) {
  validate(options);
  if (source.count <= 0 || !source.load) {
    throw Error(ErrorKind::kInvalidArgument, "no frames to bake");
  }

  BakeReport report;
  std::vector<EncodedGroup> encoded;
  std::optional<int> degree = options.sh_degree;

  const auto bounds = group_bounds(source.count, options.group_size);
  for (std::size_t g = 0; g < bounds.size(); ++g) {
    const auto [start, length] = bounds[g];

    auto t = Clock::now();
    std::vector<GaussianFrame> frames;
    frames.reserve(length);
    for (int i = start; i < start + length; ++i) {
      GaussianFrame f = source.load(i);
      f.frame_index = i;
      if (!degree) degree = f.sh_degree;
      if (f.sh_degree != *degree) f = truncate_sh(f, *degree);
      if (!frames.empty() && f.size() != frames.front().size()) {
        throw Error(ErrorKind::kMismatch,
                    "frame " + std::to_string(i) + " has " + std::to_string(f.size()) +
                        " splats but its group keyframe " + std::to_string(start) + " has " +
                        std::to_string(frames.front().size()) +
                        "; counts may only change at group boundaries");
      }
      frames.push_back(std::move(f));
    }
    report.read_seconds += since(t);

    t = Clock::now();
    GroupBakeStats stats;
    stats.index = static_cast<int>(g);
    stats.start_frame = start;
    stats.length = length;
    stats.input_splats = frames.front().size();
    if (options.prune_ratio > 0.0 && frames.front().size() > options.target_count) {
      PruneOptions po;
      po.ratio = options.prune_ratio;
      po.target_count = options.target_count;
      auto pruned = prune_keyframe(frames.front(), po);
      stats.prune_rounds = pruned.rounds;
      for (std::size_t k = 1; k < frames.size(); ++k) {
        frames[k] = apply_keep_mask(frames[k], pruned.kept);
      }
      frames.front() = std::move(pruned.frame);
    }
    stats.output_splats = frames.front().size();

    PlaneStack stack = pack_group(frames, attribute_layout(*degree));
    stack.start_frame = start;
    frames.clear();
    encoded.push_back(encode_group(stack, options.codec, static_cast<int>(g)));
    stats.bytes = encoded.back().total_bytes();
    stats.seconds = since(t);
    report.bake_seconds += stats.seconds;
    report.groups.push_back(stats);
  }

  const auto t = Clock::now();
  report.manifest = write_container(encoded, output_dir, options.fps);
  report.write_seconds = since(t);
  return report;
}

std::vector<GroupSweepRow> group_size_sweep(std::span<const GaussianFrame> frames,
                                            std::span<const int> group_sizes,
                                            const CodecConfig& codec) {
  if (frames.empty()) throw Error(ErrorKind::kInvalidArgument, "no frames to sweep");
  std::vector<GroupSweepRow> rows;
  for (const int size : group_sizes) {
    const auto groups = encode_sequence(frames, size, codec);
    std::uint64_t bytes = 0;
    for (const auto& g : groups) bytes += g.total_bytes();
    rows.push_back({size, static_cast<int>(groups.size()),
                    static_cast<double>(bytes) / static_cast<double>(frames.size())});
  }
  return rows;
}

std::string group_sweep_csv(std::span<const GroupSweepRow> rows) {
  std::string out = "group_size,groups,kb_per_frame\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.3f\n", r.group_size, r.groups, r.kb_per_frame());
    out += buf;
  }
  return out;
}

}  // namespace gvv
