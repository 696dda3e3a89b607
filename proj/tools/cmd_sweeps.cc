#include <fstream>
#include <memory>
#include <ostream>

#include "commands.h"
#include "gvv/bake/bake.h"
#include "gvv/codec/rd_sweep.h"
#include "gvv/core/synthetic.h"
#include "gvv/error.h"

namespace gvv::cli {

namespace {

void emit(Context& ctx, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    ctx.out << text;
    return;
  }
  std::ofstream f(path);
  f << text;
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path);
  ctx.out << "wrote " << path << "\n";
}

struct RdArgs {
  std::string input;
  std::vector<int> qps{15, 25, 35};
  std::vector<std::string> cameras;
  int width = 160;
  int height = 120;
  int group_size = 20;
  std::string encoder;
  std::string preset = "medium";
  std::string out;
};

struct GroupSweepArgs {
  std::string input;
  std::vector<int> sizes{10, 15, 20, 25, 30};
  std::size_t count = 2000;
  int frames = 300;
  std::uint64_t seed = 1;
  float amplitude = 0.02f;
  float period = 40.f;
  CodecFlags codec;
  std::string out;
};

}  // namespace

Action add_rd_sweep(CLI::App& app, Context& ctx) {
  auto a = std::make_shared<RdArgs>();
  auto* sub = app.add_subcommand(
      "rd-sweep", "Rate-distortion table over h264 QPs plus a lossless reference row");
  sub->add_option("input", a->input, "Directory of per-frame splat files")->required();
  sub->add_option("--qps", a->qps, "Base QPs for the h264 rows")
      ->delimiter(',')
      ->check(CLI::Range(0, 51))
      ->capture_default_str();
  sub->add_option("--camera", a->cameras, "Camera file; repeat for several views "
                                          "(default: two orbit views of the first frame)");
  sub->add_option("--width", a->width, "Default view width")->check(CLI::PositiveNumber);
  sub->add_option("--height", a->height, "Default view height")->check(CLI::PositiveNumber);
  sub->add_option("--group-size", a->group_size, "Frames per group")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--encoder", a->encoder, "ffmpeg binary (default: $GVV_FFMPEG, then PATH)");
  sub->add_option("--preset", a->preset, "x264 preset")->capture_default_str();
  sub->add_option("--out", a->out, "CSV path, '-' for stdout")->capture_default_str();

  return [a, &ctx] {
    const auto frames = load_frames(a->input);
    std::vector<Camera> cams;
    for (const auto& f : a->cameras) cams.push_back(read_camera(f));
    if (cams.empty()) {
      for (double az : {0.0, 90.0}) {
        cams.push_back(framing_camera(frames.front().bbox, a->width, a->height, az));
      }
    }
    std::vector<std::optional<int>> qps{std::nullopt};
    for (int q : a->qps) qps.push_back(q);
    RdOptions opt;
    opt.group_size = a->group_size;
    opt.codec.encoder = a->encoder;
    opt.codec.preset = a->preset;
    const auto rows = rate_distortion_sweep(frames, qps, cams, opt);
    emit(ctx, a->out, rd_csv(rows));
  };
}

Action add_group_sweep(CLI::App& app, Context& ctx) {
  auto a = std::make_shared<GroupSweepArgs>();
  auto* sub = app.add_subcommand(
      "group-sweep", "Encoded size per frame across group sizes (synthetic motion by default)");
  sub->add_option("input", a->input, "Directory of per-frame splat files; omit for synthetic");
  sub->add_option("--sizes", a->sizes, "Group sizes")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--count", a->count, "Synthetic splat count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--frames", a->frames, "Synthetic frame count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--seed", a->seed, "Synthetic scene seed")->capture_default_str();
  sub->add_option("--amplitude", a->amplitude, "Synthetic motion amplitude")
      ->capture_default_str();
  sub->add_option("--period", a->period, "Synthetic motion period in frames")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  a->codec.add(*sub);
  sub->add_option("--out", a->out, "CSV path, '-' for stdout");

  return [a, &ctx] {
    std::vector<GaussianFrame> frames =
        a->input.empty() ? smooth_sequence(a->count, a->frames, a->seed,
                                           SmoothMotion{a->amplitude, a->period})
                         : load_frames(a->input);
    const auto rows = group_size_sweep(frames, a->sizes, a->codec.config());
    emit(ctx, a->out, group_sweep_csv(rows));
  };
}

}  // namespace gvv::cli
