#include <cstdio>
#include <memory>
#include <ostream>

#include "commands.h"
#include "gvv/bake/bake.h"

namespace gvv::cli {

namespace {

struct BakeArgs {
  std::string input;
  std::string output;
  int group_size = 20;
  int sh_degree = -1;
  double prune_ratio = 0.3;
  std::size_t target_count = 100000;
  double fps = 30.0;
  CodecFlags codec;
};

void print_report(std::ostream& out, const BakeReport& r) {
  char line[160];
  out << "group  frames      splats_in  splats_out  rounds       bytes  seconds\n";
  for (const auto& g : r.groups) {
    std::snprintf(line, sizeof(line), "%5d  %3d-%-5d  %9zu  %10zu  %6d  %10llu  %7.3f\n", g.index,
                  g.start_frame, g.start_frame + g.length - 1, g.input_splats, g.output_splats,
                  g.prune_rounds, static_cast<unsigned long long>(g.bytes), g.seconds);
    out << line;
  }
  std::snprintf(line, sizeof(line),
                "%d frames in %zu groups, %.1f KB/frame\n"
                "time: read %.3f s, bake %.3f s, write %.3f s; %.3f s/frame\n",
                r.frame_count(), r.groups.size(), r.bytes_per_frame() / 1000.0, r.read_seconds,
                r.bake_seconds, r.write_seconds, r.seconds_per_frame());
  out << line;
}

}  // namespace

Action add_bake(CLI::App& app, Context& ctx) {
  auto a = std::make_shared<BakeArgs>();
  auto* sub = app.add_subcommand("bake", "Bake a directory of per-frame splat files into a container");
  sub->add_option("input", a->input, "Directory of .ply/.txt frames, ordered by file name")
      ->required();
  sub->add_option("output", a->output, "Container directory to write")->required();
  sub->add_option("--group-size", a->group_size, "Frames per group")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--sh-degree", a->sh_degree, "Output SH degree (default: input degree)")
      ->check(CLI::Range(0, 3));
  sub->add_option("--prune-ratio", a->prune_ratio, "Share of splats dropped per keyframe round, 0 disables")
      ->check(CLI::Range(0.0, 0.999999))
      ->capture_default_str();
  sub->add_option("--target-count", a->target_count, "Keyframe splat budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--fps", a->fps, "Playback rate recorded in the manifest")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  a->codec.add(*sub);

  return [a, &ctx] {
    BakeOptions opt;
    opt.group_size = a->group_size;
    if (a->sh_degree >= 0) opt.sh_degree = a->sh_degree;
    opt.prune_ratio = a->prune_ratio;
    opt.target_count = a->target_count;
    opt.fps = a->fps;
    opt.codec = a->codec.config();
    const auto report = bake(frames_in_directory(a->input), a->output, opt);
    print_report(ctx.out, report);
  };
}

}  // namespace gvv::cli
