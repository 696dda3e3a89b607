#include "gvv/player/session.h"

#include <algorithm>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include "gvv/error.h"
#include "gvv/player/bounded_queue.h"

namespace gvv {

namespace {

using Clock = std::chrono::steady_clock;

struct FetchedGroup {
  std::uint64_t gen = 0;
  int group = 0;
  int target = 0;
  EncodedGroup encoded;
};

struct DecodedGroup {
  std::uint64_t gen = 0;
  int group = 0;
  int target = 0;
  std::shared_ptr<const PlaneStack> stack;
};

struct ReadyFrame {
  std::uint64_t gen = 0;
  int index = 0;
  std::shared_ptr<const GaussianFrame> frame;
};

void record(StageStats& s, Clock::time_point start) {
  const double dt = std::chrono::duration<double>(Clock::now() - start).count();
  ++s.items;
  s.total_seconds += dt;
  s.max_seconds = std::max(s.max_seconds, dt);
}

}  // namespace

struct PlaySession::Impl {
  std::unique_ptr<SegmentSource> source;
  PlayerOptions options;
  Manifest manifest;

  BoundedQueue<FetchedGroup> fetch_q;
  BoundedQueue<DecodedGroup> decode_q;
  BoundedQueue<ReadyFrame> frame_q;

  mutable std::mutex mu;
  std::condition_variable fetch_cv;
  std::uint64_t gen = 0;
  int next_group = 0;
  int target = 0;
  bool stopping = false;
  std::exception_ptr error;
  std::uint64_t error_gen = 0;
  // First frame the failure affects; earlier frames still get delivered.
  int error_frame = 0;

  // Consumer-side state; only touched by the consumer thread.
  int cursor = 0;
  bool playing = false;
  bool seeking = false;
  std::shared_ptr<const GaussianFrame> last;
  int last_index = -1;

  mutable std::mutex stats_mu;
  PlayerStats stats;

  std::thread fetcher, decoder, reconstructor;

  Impl(std::unique_ptr<SegmentSource> src, PlayerOptions opts)
      : source(std::move(src)),
        options(std::move(opts)),
        fetch_q(options.fetch_capacity),
        decode_q(options.decode_capacity),
        frame_q(options.frame_capacity) {}

  std::uint64_t current_gen() const {
    std::lock_guard lk(mu);
    return gen;
  }

  void fail(std::uint64_t g, int frame) {
    std::lock_guard lk(mu);
    if (g == gen && !(error && error_gen == gen)) {
      error = std::current_exception();
      error_gen = g;
      error_frame = frame;
    }
  }

  void fetch_loop() {
    for (;;) {
      int group = 0, tgt = 0;
      std::uint64_t g = 0;
      {
        std::unique_lock lk(mu);
        fetch_cv.wait(lk, [&] {
          return stopping ||
                 (next_group < static_cast<int>(manifest.groups.size()) && !(error && error_gen == gen));
        });
        if (stopping) return;
        group = next_group;
        g = gen;
        tgt = target;
      }
      try {
        const auto start = Clock::now();
        const GroupEntry& entry = manifest.groups[group];
        std::vector<std::vector<std::uint8_t>> segments;
        std::uint64_t bytes = 0;
        bool stale = false;
        for (const auto& attr : entry.attributes) {
          if (current_gen() != g) {
            stale = true;
            break;
          }
          segments.push_back(source->fetch_segment(attr));
          bytes += segments.back().size();
        }
        if (stale) continue;
        EncodedGroup enc = assemble_group(entry, std::move(segments));
        if (options.fetch_hook) options.fetch_hook(group);
        {
          std::lock_guard lk(stats_mu);
          record(stats.fetch, start);
          stats.bytes_fetched += bytes;
        }
        if (current_gen() != g) continue;
        if (!fetch_q.push({g, group, tgt, std::move(enc)})) continue;
        std::lock_guard lk(mu);
        if (gen == g && next_group == group) ++next_group;
      } catch (...) {
        fail(g, manifest.groups[group].start_frame);
      }
    }
  }

  void decode_loop() {
    while (auto item = fetch_q.pop()) {
      if (item->gen != current_gen()) continue;
      try {
        const auto start = Clock::now();
        auto stack = std::make_shared<const PlaneStack>(
            decode_group(item->encoded, manifest.groups[item->group], options.codec));
        if (options.decode_hook) options.decode_hook(item->group);
        {
          std::lock_guard lk(stats_mu);
          record(stats.decode, start);
        }
        if (item->gen != current_gen()) continue;
        decode_q.push({item->gen, item->group, item->target, std::move(stack)});
      } catch (...) {
        fail(item->gen, manifest.groups[item->group].start_frame);
      }
    }
  }

  void reconstruct_loop() {
    while (auto item = decode_q.pop()) {
      const PlaneStack& stack = *item->stack;
      const int first = manifest.groups[item->group].start_frame;
      int index = first;
      try {
        for (std::size_t t = 0; t < stack.num_frames(); ++t) {
          index = first + static_cast<int>(t);
          if (item->gen != current_gen()) break;
          if (index < item->target) {
            std::lock_guard lk(stats_mu);
            ++stats.frames_skipped;
            continue;
          }
          const auto start = Clock::now();
          GaussianFrame f = unpack_frame(stack, t);
          f.frame_index = index;
          if (options.reconstruct_hook) options.reconstruct_hook(index);
          {
            std::lock_guard lk(stats_mu);
            record(stats.reconstruct, start);
          }
          if (!frame_q.push({item->gen, index, std::make_shared<const GaussianFrame>(std::move(f))})) {
            break;
          }
        }
      } catch (...) {
        fail(item->gen, index);
      }
    }
  }

  void start() {
    fetcher = std::thread([this] { fetch_loop(); });
    decoder = std::thread([this] { decode_loop(); });
    reconstructor = std::thread([this] { reconstruct_loop(); });
  }

  void shutdown() {
    {
      std::lock_guard lk(mu);
      stopping = true;
      ++gen;
    }
    fetch_cv.notify_all();
    fetch_q.close();
    decode_q.close();
    frame_q.close();
    for (auto* t : {&fetcher, &decoder, &reconstructor}) {
      if (t->joinable()) t->join();
    }
  }

  void rethrow_if_failed() {
    std::exception_ptr e;
    {
      std::lock_guard lk(mu);
      if (error && error_gen == gen && cursor >= error_frame) e = error;
    }
    if (e) std::rethrow_exception(e);
  }
};

PlaySession::PlaySession(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

PlaySession::~PlaySession() {
  if (impl_) impl_->shutdown();
}

std::unique_ptr<PlaySession> PlaySession::open(const std::string& location,
                                               PlayerOptions options) {
  return open(open_source(location), std::move(options));
}

std::unique_ptr<PlaySession> PlaySession::open(std::unique_ptr<SegmentSource> source,
                                               PlayerOptions options) {
  if (!source) throw Error(ErrorKind::kInvalidArgument, "no segment source");
  auto impl = std::make_unique<Impl>(std::move(source), std::move(options));
  impl->manifest = impl->source->fetch_manifest();
  validate_manifest(impl->manifest);
  impl->options.codec.validate();
  std::unique_ptr<PlaySession> session(new PlaySession(std::move(impl)));
  session->impl_->start();
  return session;
}

const Manifest& PlaySession::manifest() const { return impl_->manifest; }

int PlaySession::frame_count() const { return impl_->manifest.frame_count; }

int PlaySession::cursor() const { return impl_->cursor; }

PlayState PlaySession::state() const {
  if (impl_->seeking) return PlayState::kSeeking;
  return impl_->playing ? PlayState::kPlaying : PlayState::kPaused;
}

void PlaySession::play() { impl_->playing = true; }

void PlaySession::pause() { impl_->playing = false; }

int PlaySession::seek(int frame) {
  auto& s = *impl_;
  if (frame < 0 || frame >= s.manifest.frame_count) {
    throw Error(ErrorKind::kOutOfRange, "seek target " + std::to_string(frame) + " outside [0, " +
                                            std::to_string(s.manifest.frame_count) + ")");
  }
  {
    std::lock_guard lk(s.mu);
    ++s.gen;
    s.next_group = static_cast<int>(s.manifest.group_of(frame));
    s.target = frame;
  }
  s.fetch_q.flush();
  s.decode_q.flush();
  s.frame_q.flush();
  s.fetch_cv.notify_all();
  s.cursor = frame;
  s.seeking = true;
  return frame;
}

FrameEvent PlaySession::next_frame(std::chrono::milliseconds timeout) {
  auto& s = *impl_;
  if (s.cursor >= s.manifest.frame_count) {
    return {FrameStatus::kEndOfStream, s.last, s.last_index};
  }
  const auto deadline = Clock::now() + timeout;
  const std::uint64_t gen = s.current_gen();
  for (;;) {
    s.rethrow_if_failed();
    const auto slice = std::min(deadline, Clock::now() + std::chrono::milliseconds(20));
    auto item = s.frame_q.pop_until(slice);
    if (!item) {
      if (Clock::now() < deadline) continue;
      s.rethrow_if_failed();
      std::lock_guard lk(s.stats_mu);
      ++s.stats.stalls;
      return {FrameStatus::kStall, s.last, s.last_index};
    }
    if (item->gen != gen || item->index < s.cursor) continue;
    if (item->index != s.cursor) {
      throw Error(ErrorKind::kMismatch, "pipeline delivered frame " + std::to_string(item->index) +
                                            " while expecting " + std::to_string(s.cursor));
    }
    ++s.cursor;
    s.seeking = false;
    s.last = item->frame;
    s.last_index = item->index;
    {
      std::lock_guard lk(s.stats_mu);
      ++s.stats.frames_delivered;
    }
    return {FrameStatus::kFrame, s.last, s.last_index};
  }
}

PlayerStats PlaySession::stats() const {
  PlayerStats out;
  {
    std::lock_guard lk(impl_->stats_mu);
    out = impl_->stats;
  }
  out.fetch_queue_peak = impl_->fetch_q.peak();
  out.decode_queue_peak = impl_->decode_q.peak();
  out.frame_queue_peak = impl_->frame_q.peak();
  return out;
}

std::size_t PlaySession::fetched_groups() const { return impl_->fetch_q.size(); }
std::size_t PlaySession::decoded_groups() const { return impl_->decode_q.size(); }
std::size_t PlaySession::ready_frames() const { return impl_->frame_q.size(); }

}  // namespace gvv
