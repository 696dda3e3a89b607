#pragma once

#include <CLI11.hpp>

#include <functional>
#include <optional>
#include <string>

#include "cli.h"
#include "gvv/codec/codec.h"
#include "gvv/core/types.h"
#include "gvv/render/camera.h"

namespace gvv::cli {

using Action = std::function<void()>;

// Each registers its subcommand on `app` and returns the work to run when
// that subcommand is selected.
Action add_bake(CLI::App& app, Context& ctx);
Action add_play(CLI::App& app, Context& ctx);
Action add_serve(CLI::App& app, Context& ctx);
Action add_render(CLI::App& app, Context& ctx);
Action add_rd_sweep(CLI::App& app, Context& ctx);
Action add_group_sweep(CLI::App& app, Context& ctx);
Action add_fit_motion(CLI::App& app, Context& ctx);
Action add_losses(CLI::App& app, Context& ctx);
Action add_synth(CLI::App& app, Context& ctx);

// Codec flags shared by the encoding subcommands.
struct CodecFlags {
  std::string backend = "lossless";
  int qp = 22;
  int gop = 0;
  std::string encoder;
  std::string preset = "medium";
  int deflate_level = 6;

  void add(CLI::App& sub);
  CodecConfig config() const;
};

// Either a camera file or a default view framing the content.
struct CameraFlags {
  std::string file;
  int width = 640;
  int height = 480;
  double azimuth_deg = 0.0;

  void add(CLI::App& sub);
  Camera resolve(const BoundingBox& content) const;
};

// Looks at the box centre from far enough away that the whole box fits a
// 45 degree vertical field of view.
Camera framing_camera(const BoundingBox& box, int width, int height, double azimuth_deg = 0.0);

std::vector<GaussianFrame> load_frames(const std::string& dir);

}  // namespace gvv::cli
