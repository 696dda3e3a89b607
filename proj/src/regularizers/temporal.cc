#include "gvv/regularizers/temporal.h"

#include <cmath>

#include "gvv/core/packing.h"
#include "gvv/error.h"

namespace gvv {

FloatPlanes appearance_planes(const GaussianFrame& frame) {
  if (frame.splats.empty()) throw Error(ErrorKind::kInvalidArgument, "frame has no splats");
  const int side = plane_side(frame.splats.size());
  const auto layout = attribute_layout(frame.sh_degree);
  FloatPlanes out{side, side, {}};
  for (const auto& e : layout.entries) {
    if (e.attribute == Attribute::kPosition) continue;
    for (int c = 0; c < e.channels; ++c) {
      std::vector<double> plane(static_cast<std::size_t>(side) * side, 0.0);
      for (std::size_t k = 0; k < frame.splats.size(); ++k) {
        plane[k] = attribute_value(frame.splats[k], e.attribute, c);
      }
      out.channels.push_back(std::move(plane));
    }
  }
  return out;
}

TemporalResult temporal_loss(const FloatPlanes& planes_t, const FloatPlanes& planes_prev) {
  if (planes_t.width != planes_prev.width || planes_t.height != planes_prev.height ||
      planes_t.channels.size() != planes_prev.channels.size()) {
    throw Error(ErrorKind::kMismatch, "temporal_loss: plane sets differ in shape");
  }
  const std::size_t pixels = static_cast<std::size_t>(planes_t.width) * planes_t.height;
  if (pixels == 0) throw Error(ErrorKind::kInvalidArgument, "temporal_loss: empty planes");
  const double inv = 1.0 / static_cast<double>(pixels);

  TemporalResult r;
  r.gradient.resize(planes_t.channels.size());
  for (std::size_t c = 0; c < planes_t.channels.size(); ++c) {
    const auto& a = planes_t.channels[c];
    const auto& b = planes_prev.channels[c];
    if (a.size() != pixels || b.size() != pixels) {
      throw Error(ErrorKind::kMismatch, "temporal_loss: channel size differs from width*height");
    }
    auto& g = r.gradient[c];
    g.resize(pixels);
    double sum = 0.0;
    for (std::size_t i = 0; i < pixels; ++i) {
      const double d = a[i] - b[i];
      sum += std::abs(d);
      g[i] = d > 0 ? inv : (d < 0 ? -inv : 0.0);
    }
    r.value += sum * inv;
  }
  return r;
}

double combine_losses(double photometric, double dssim, double entropy, double temporal,
                      const LossWeights& w) {
  for (double v : {photometric, dssim, entropy, temporal}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "loss terms must be finite");
  }
  return (1.0 - w.lambda) * photometric + w.lambda * dssim + w.lambda_entropy * entropy +
         w.lambda_temporal * temporal;
}

}  // namespace gvv
