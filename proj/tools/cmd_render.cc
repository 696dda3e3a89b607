#include <cstdio>
#include <filesystem>
#include <memory>
#include <ostream>

#include "commands.h"
#include "gvv/core/splat_io.h"
#include "gvv/core/synthetic.h"
#include "gvv/render/render.h"

namespace gvv::cli {

namespace {

struct RenderArgs {
  std::string input;
  std::string out;
  CameraFlags camera;
  int sh_degree = -1;
  int threads = 1;
};

struct SynthArgs {
  std::string output;
  std::string kind = "smooth";
  std::size_t count = 2000;
  int frames = 20;
  std::uint64_t seed = 1;
  int sh_degree = 0;
  float amplitude = 0.02f;
  float period = 40.f;
  std::string format = "ply";
};

}  // namespace

Action add_render(CLI::App& app, Context& ctx) {
  auto a = std::make_shared<RenderArgs>();
  auto* sub = app.add_subcommand("render", "Render one splat file to a PNG");
  sub->add_option("input", a->input, "Splat file (.ply or .txt)")->required();
  sub->add_option("--out", a->out, "PNG to write")->required();
  a->camera.add(*sub);
  sub->add_option("--sh-degree", a->sh_degree, "SH evaluation degree (default: the file's)")
      ->check(CLI::Range(0, 3));
  sub->add_option("--threads", a->threads, "Render threads")->check(CLI::PositiveNumber);

  return [a, &ctx] {
    const auto frame = read_splats(a->input);
    RenderOptions ro;
    ro.sh_degree = a->sh_degree >= 0 ? a->sh_degree : frame.sh_degree;
    ro.threads = a->threads;
    RenderStats stats;
    const auto img = render(frame, a->camera.resolve(frame.bbox), ro, &stats);
    write_png(a->out, img);
    ctx.out << "wrote " << a->out << " (" << img.width << "x" << img.height << ", " << stats.drawn
            << " drawn, " << stats.culled << " culled)\n";
  };
}

Action add_synth(CLI::App& app, Context& ctx) {
  auto a = std::make_shared<SynthArgs>();
  auto* sub = app.add_subcommand("synth", "Write a seeded synthetic frame sequence");
  sub->add_option("output", a->output, "Directory to fill with frame files")->required();
  sub->add_option("--kind", a->kind,
                  "smooth: one cloud in wave motion; random: independent clouds; still: one "
                  "cloud repeated")
      ->check(CLI::IsMember({"smooth", "random", "still"}))
      ->capture_default_str();
  sub->add_option("--count", a->count, "Splats per frame")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--frames", a->frames, "Frame count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--seed", a->seed, "Generator seed")->capture_default_str();
  sub->add_option("--sh-degree", a->sh_degree, "SH degree")
      ->check(CLI::Range(0, 3))
      ->capture_default_str();
  sub->add_option("--amplitude", a->amplitude, "Wave amplitude (smooth)")->capture_default_str();
  sub->add_option("--period", a->period, "Wave period in frames (smooth)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--format", a->format, "File format")
      ->check(CLI::IsMember({"ply", "txt"}))
      ->capture_default_str();

  return [a, &ctx] {
    std::vector<GaussianFrame> frames;
    if (a->kind == "smooth") {
      frames = smooth_sequence(a->count, a->frames, a->seed, {a->amplitude, a->period},
                               a->sh_degree);
    } else {
      for (int i = 0; i < a->frames; ++i) {
        const std::uint64_t seed = a->kind == "random" ? a->seed + i : a->seed;
        frames.push_back(random_frame(a->count, seed, a->sh_degree, i));
      }
    }
    std::filesystem::create_directories(a->output);
    char name[32];
    for (std::size_t i = 0; i < frames.size(); ++i) {
      std::snprintf(name, sizeof(name), "frame_%05zu.%s", i, a->format.c_str());
      write_splats(std::filesystem::path(a->output) / name, frames[i]);
    }
    ctx.out << "wrote " << frames.size() << " frames of " << a->count << " splats to "
            << a->output << "\n";
  };
}

}  // namespace gvv::cli
