#include "cli.h"

#include <cmath>
#include <iostream>
#include <numbers>
#include <utility>

#include "commands.h"
#include "gvv/bake/bake.h"
#include "gvv/codec/backend.h"
#include "gvv/error.h"

namespace gvv::cli {

void CodecFlags::add(CLI::App& sub) {
  sub.add_option("--codec", backend, "Plane codec")
      ->check(CLI::IsMember({"lossless", "h264"}))
      ->capture_default_str();
  sub.add_option("--qp", qp, "Base QP for the h264 codec (position high bytes stay lossless)")
      ->check(CLI::Range(0, 51))
      ->capture_default_str();
  sub.add_option("--gop", gop, "h264 keyframe interval, 0 for one closed GOP per group")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub.add_option("--encoder", encoder, "ffmpeg binary (default: $GVV_FFMPEG, then PATH)");
  sub.add_option("--preset", preset, "x264 preset")->capture_default_str();
  sub.add_option("--deflate-level", deflate_level, "zlib level for the lossless codec")
      ->check(CLI::Range(0, 9))
      ->capture_default_str();
}

CodecConfig CodecFlags::config() const {
  CodecConfig cfg;
  cfg.backend = *backend_from_name(backend == "h264" ? "h264" : "lossless");
  cfg.base_qp = qp;
  cfg.gop = gop;
  cfg.encoder = encoder;
  cfg.preset = preset;
  cfg.deflate_level = deflate_level;
  cfg.validate();
  return cfg;
}

void CameraFlags::add(CLI::App& sub) {
  sub.add_option("--camera", file, "Camera text file; overrides the default framing view");
  sub.add_option("--width", width, "Image width for the default view")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub.add_option("--height", height, "Image height for the default view")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub.add_option("--azimuth", azimuth_deg, "Orbit angle of the default view, degrees")
      ->capture_default_str();
}

Camera CameraFlags::resolve(const BoundingBox& content) const {
  if (!file.empty()) return read_camera(file);
  return framing_camera(content, width, height, azimuth_deg);
}

Camera framing_camera(const BoundingBox& box, int width, int height, double azimuth_deg) {
  const Eigen::Vector3d lo(box.min[0], box.min[1], box.min[2]);
  const Eigen::Vector3d hi(box.max[0], box.max[1], box.max[2]);
  const Eigen::Vector3d center = 0.5 * (lo + hi);
  const double radius = std::max(0.5 * (hi - lo).norm(), 1e-3);
  constexpr double kFov = 45.0;
  const double dist = 1.1 * radius / std::sin(0.5 * kFov * std::numbers::pi / 180.0);
  const double az = azimuth_deg * std::numbers::pi / 180.0;
  const Eigen::Vector3d dir(std::sin(az), 0.15, -std::cos(az));
  return look_at(center + dist * dir.normalized(), center, {0, 1, 0}, kFov, width, height);
}

std::vector<GaussianFrame> load_frames(const std::string& dir) {
  const auto src = frames_in_directory(dir);
  std::vector<GaussianFrame> frames;
  frames.reserve(src.count);
  for (int i = 0; i < src.count; ++i) frames.push_back(src.load(i));
  return frames;
}

int run(const std::vector<std::string>& args, Context& ctx) {
  CLI::App app{"Gaussian volumetric video tools: bake, stream, play and analyse splat sequences",
               "gvv"};
  app.set_config("--config", "",
                 "TOML/INI file of option values; flags given on the command line win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough(false);

  std::vector<std::pair<CLI::App*, Action>> commands;
  for (auto add : {add_bake, add_play, add_serve, add_render, add_rd_sweep, add_group_sweep,
                   add_fit_motion, add_losses, add_synth}) {
    Action action = add(app, ctx);
    commands.emplace_back(app.get_subcommands([](CLI::App*) { return true; }).back(),
                          std::move(action));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, ctx.out, ctx.err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, ctx.out, ctx.err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, ctx.out, ctx.err);
  } catch (const CLI::ParseError& e) {
    ctx.err << "gvv: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  for (auto& [sub, action] : commands) {
    if (!sub->parsed()) continue;
    try {
      action();
      return kExitOk;
    } catch (const Error& e) {
      ctx.err << "gvv " << sub->get_name() << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
      ctx.err << "gvv " << sub->get_name() << ": " << e.what() << "\n";
    }
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace gvv::cli
