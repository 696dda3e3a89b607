#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <thread>

#include "commands.h"
#include "gvv/error.h"
#include "gvv/player/session.h"
#include "gvv/render/render.h"

namespace gvv::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct PlayArgs {
  std::string location;
  CameraFlags camera;
  double fps = 0.0;
  std::string offline_out;
  int start = 0;
  int frames = 0;
  bool no_render = false;
  int threads = 1;
  double timeout = 30.0;
  std::string encoder;
};

void print_timings(std::ostream& out, const PlayerStats& s, double render_seconds,
                   std::uint64_t rendered, double wall) {
  const double n = static_cast<double>(std::max<std::uint64_t>(s.frames_delivered, 1));
  char line[160];
  out << "stage        unit   items   ms/item   max_ms  ms/frame\n";
  const auto row = [&](const char* name, const char* unit, const StageStats& st) {
    std::snprintf(line, sizeof(line), "%-11s  %-5s  %6llu  %8.2f  %7.2f  %8.2f\n", name, unit,
                  static_cast<unsigned long long>(st.items), 1e3 * st.mean_seconds(),
                  1e3 * st.max_seconds, 1e3 * st.total_seconds / n);
    out << line;
  };
  row("download", "group", s.fetch);
  row("decode", "group", s.decode);
  row("reconstruct", "frame", s.reconstruct);
  if (rendered > 0) {
    std::snprintf(line, sizeof(line), "render: %.2f ms/frame over %llu frames\n",
                  1e3 * render_seconds / rendered, static_cast<unsigned long long>(rendered));
    out << line;
  }
  std::snprintf(line, sizeof(line),
                "frames %llu, skipped %llu, stalls %llu, %.1f KB fetched, %.3f s wall, %.1f fps\n",
                static_cast<unsigned long long>(s.frames_delivered),
                static_cast<unsigned long long>(s.frames_skipped),
                static_cast<unsigned long long>(s.stalls), s.bytes_fetched / 1000.0, wall,
                wall > 0 ? s.frames_delivered / wall : 0.0);
  out << line;
}

std::filesystem::path frame_png(const std::filesystem::path& dir, int index) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%05d.png", index);
  return dir / name;
}

}  // namespace

Action add_play(CLI::App& app, Context& ctx) {
  auto a = std::make_shared<PlayArgs>();
  auto* sub = app.add_subcommand(
      "play", "Stream a container (http:// URL or directory) through the player pipeline");
  sub->add_option("location", a->location, "Server base URL or container directory")->required();
  a->camera.add(*sub);
  sub->add_option("--fps", a->fps,
                  "Presentation rate; 0 takes frames as fast as they arrive (default: manifest "
                  "rate when interactive, unpaced offline)");
  sub->add_option("--offline-out", a->offline_out, "Write one PNG per frame into this directory");
  sub->add_option("--start", a->start, "First frame (seeks before playing)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--frames", a->frames, "Number of frames to play, 0 for all")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--no-render", a->no_render, "Only run the streaming pipeline");
  sub->add_option("--threads", a->threads, "Render threads")->check(CLI::PositiveNumber);
  sub->add_option("--timeout", a->timeout, "Seconds to wait for a frame before giving up offline")
      ->check(CLI::PositiveNumber);
  sub->add_option("--encoder", a->encoder, "ffmpeg binary for h264 segments");

  return [a, sub, &ctx] {
    PlayerOptions po;
    po.codec.encoder = a->encoder;
    auto session = PlaySession::open(a->location, po);
    const bool offline = !a->offline_out.empty();
    const bool render_frames = offline || !a->no_render;
    if (offline && a->no_render) {
      throw Error(ErrorKind::kInvalidArgument, "--offline-out needs rendering; drop --no-render");
    }
    double fps = a->fps;
    if (sub->count("--fps") == 0 && !offline) fps = session->manifest().fps;

    if (a->start >= session->frame_count()) {
      throw Error(ErrorKind::kOutOfRange, "--start is past the last frame");
    }
    if (a->start > 0) session->seek(a->start);
    const int end = a->frames > 0 ? std::min(session->frame_count(), a->start + a->frames)
                                  : session->frame_count();
    if (offline) std::filesystem::create_directories(a->offline_out);
    session->play();

    RenderOptions ro;
    ro.sh_degree = session->manifest().sh_degree;
    ro.threads = a->threads;
    std::optional<Camera> camera;
    double render_seconds = 0.0;
    std::uint64_t rendered = 0;

    const auto interval = fps > 0 ? std::chrono::duration<double>(1.0 / fps)
                                  : std::chrono::duration<double>(0);
    const auto wait = offline || fps <= 0
                          ? std::chrono::milliseconds(static_cast<long>(a->timeout * 1000))
                          : std::chrono::duration_cast<std::chrono::milliseconds>(interval);
    const auto t0 = Clock::now();
    auto next_tick = t0;
    while (session->cursor() < end && !ctx.stop_requested()) {
      const FrameEvent ev = session->next_frame(wait);
      if (ev.status == FrameStatus::kEndOfStream) break;
      if (ev.status == FrameStatus::kStall) {
        if (offline || fps <= 0) {
          throw Error(ErrorKind::kNetwork, "no frame after " + std::to_string(a->timeout) + " s");
        }
        continue;
      }
      if (render_frames) {
        if (!camera) camera = a->camera.resolve(ev.frame->bbox);
        const auto r0 = Clock::now();
        const ImageBuffer img = render(*ev.frame, *camera, ro);
        render_seconds += std::chrono::duration<double>(Clock::now() - r0).count();
        ++rendered;
        if (offline) write_png(frame_png(a->offline_out, ev.index), img);
      }
      if (fps > 0 && !offline) {
        next_tick += std::chrono::duration_cast<Clock::duration>(interval);
        std::this_thread::sleep_until(next_tick);
      }
    }
    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    print_timings(ctx.out, session->stats(), render_seconds, rendered, wall);
  };
}

}  // namespace gvv::cli
