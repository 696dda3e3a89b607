#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "gvv/codec/codec.h"
#include "gvv/core/types.h"
#include "gvv/player/source.h"

namespace gvv {

struct PlayerOptions {
  // Queue capacities: fetched groups, decoded groups, reconstructed frames.
  std::size_t fetch_capacity = 3;
  std::size_t decode_capacity = 2;
  std::size_t frame_capacity = 4;
  CodecConfig codec;
  // Extra work injected into each stage, mainly for tests: called once per
  // group by the fetch and decode workers and once per frame by the
  // reconstruct worker.
  std::function<void(int group)> fetch_hook;
  std::function<void(int group)> decode_hook;
  std::function<void(int frame)> reconstruct_hook;
};

enum class PlayState { kPaused, kPlaying, kSeeking };

struct StageStats {
  std::uint64_t items = 0;
  double total_seconds = 0.0;
  double max_seconds = 0.0;

  double mean_seconds() const { return items ? total_seconds / items : 0.0; }
};

struct PlayerStats {
  // download, decode and reconstruct timings; items are groups, groups and
  // frames respectively.
  StageStats fetch, decode, reconstruct;
  std::uint64_t bytes_fetched = 0;
  std::uint64_t frames_delivered = 0;
  // Frames decoded but dropped while fast-forwarding to a seek target.
  std::uint64_t frames_skipped = 0;
  std::uint64_t stalls = 0;
  std::size_t fetch_queue_peak = 0;
  std::size_t decode_queue_peak = 0;
  std::size_t frame_queue_peak = 0;
};

enum class FrameStatus { kFrame, kStall, kEndOfStream };

struct FrameEvent {
  FrameStatus status = FrameStatus::kStall;
  // The delivered frame, or on a stall the last delivered frame (null if
  // none yet).
  std::shared_ptr<const GaussianFrame> frame;
  int index = -1;
};

// Three-stage streaming pipeline (fetch -> decode -> reconstruct) over one
// container. next_frame() and the control methods are meant to be called
// from a single consumer thread.
class PlaySession {
 public:
  // Opens an http:// URL or a container directory. Throws kNetwork,
  // kNotFound or kVersion if the manifest cannot be used.
  static std::unique_ptr<PlaySession> open(const std::string& location, PlayerOptions options = {});
  static std::unique_ptr<PlaySession> open(std::unique_ptr<SegmentSource> source,
                                           PlayerOptions options = {});
  ~PlaySession();
  PlaySession(const PlaySession&) = delete;
  PlaySession& operator=(const PlaySession&) = delete;

  const Manifest& manifest() const;
  int frame_count() const;
  // Index of the next frame next_frame() will deliver.
  int cursor() const;
  PlayState state() const;
  void play();
  void pause();

  // Restarts the pipeline at the group holding `frame`, drops everything in
  // flight and delivers `frame` next. Returns the target.
  int seek(int frame);

  // Waits up to `timeout` for the next frame. A timeout is reported as a
  // stall; a finished stream as kEndOfStream. Rethrows worker errors.
  FrameEvent next_frame(std::chrono::milliseconds timeout);
  FrameEvent poll_frame() { return next_frame(std::chrono::milliseconds(0)); }

  PlayerStats stats() const;
  std::size_t fetched_groups() const;
  std::size_t decoded_groups() const;
  std::size_t ready_frames() const;

 private:
  struct Impl;
  explicit PlaySession(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace gvv
