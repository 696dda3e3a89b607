#pragma once

#include <vector>

#include "gvv/core/layout.h"
#include "gvv/core/types.h"

namespace gvv {

// Float-valued attribute images of one frame: every channel is a
// width x height row-major array.
struct FloatPlanes {
  int width = 0;
  int height = 0;
  std::vector<std::vector<double>> channels;
};

// Lays out the non-position attributes (rotation, scale, opacity, color,
// SH) with splat k at pixel k of a plane_side() square. Values are in the
// quantization domain; tail pixels are zero.
FloatPlanes appearance_planes(const GaussianFrame& frame);

struct TemporalResult {
  double value = 0.0;
  // d value / d planes_t, same shape as the input channels.
  std::vector<std::vector<double>> gradient;
};

// (1 / (W*H)) * sum over channels and pixels of |y_t - y_prev|. The
// subgradient at zero difference is 0.
TemporalResult temporal_loss(const FloatPlanes& planes_t, const FloatPlanes& planes_prev);

struct LossWeights {
  double lambda = 0.2;
  double lambda_entropy = 1e-4;
  double lambda_temporal = 1e-3;
};

// (1 - lambda) * photometric + lambda * dssim + lambda_e * entropy +
// lambda_t * temporal. Photometric and D-SSIM come from an external
// training loop.
double combine_losses(double photometric, double dssim, double entropy, double temporal,
                      const LossWeights& weights = {});

}  // namespace gvv
