#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gvv/codec/codec.h"
#include "gvv/render/render.h"

namespace gvv {

using FrameRenderer = std::function<ImageBuffer(const GaussianFrame&, const Camera&)>;

struct RdOptions {
  int group_size = 20;
  // Encoder location and preset; backend and base_qp are set per row.
  CodecConfig codec;
  // Defaults to render() at the frames' SH degree.
  FrameRenderer renderer;
};

struct RdRow {
  // Empty for the lossless-internal row.
  std::optional<int> qp;
  double bytes_per_frame = 0.0;
  double psnr_db = 0.0;

  std::string label() const;
  double kb_per_frame() const { return bytes_per_frame / 1000.0; }
};

// Bakes, encodes, decodes and renders the sequence once per QP point. PSNR
// is pooled over every frame and camera against renders of the input
// frames. An empty qp entry runs the lossless-internal backend.
std::vector<RdRow> rate_distortion_sweep(std::span<const GaussianFrame> frames,
                                         std::span<const std::optional<int>> qps,
                                         std::span<const Camera> cameras,
                                         const RdOptions& options = {});

// Columns: qp, kb_per_frame, psnr_db.
std::string rd_csv(std::span<const RdRow> rows);

}  // namespace gvv
