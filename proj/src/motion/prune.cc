#include "gvv/motion/prune.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gvv/error.h"

namespace gvv {

PruneResult prune_keyframe(const GaussianFrame& frame, const PruneOptions& options) {
  if (!(options.ratio > 0.0 && options.ratio < 1.0)) {
    throw Error(ErrorKind::kOutOfRange, "prune ratio must be in (0, 1)");
  }
  if (options.target_count < 1) throw Error(ErrorKind::kOutOfRange, "target count must be >= 1");

  PruneResult r;
  r.frame = frame;
  r.kept.resize(frame.splats.size());
  std::iota(r.kept.begin(), r.kept.end(), 0u);

  while (r.frame.splats.size() > options.target_count) {
    const std::size_t n = r.frame.splats.size();
    const auto remove = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * options.ratio)), 1, n - 1);

    // Logits order the same way as opacities and do not saturate.
    std::vector<std::uint32_t> by_opacity(n);
    std::iota(by_opacity.begin(), by_opacity.end(), 0u);
    const auto& s = r.frame.splats;
    std::stable_sort(by_opacity.begin(), by_opacity.end(), [&](std::uint32_t a, std::uint32_t b) {
      return s[a].opacity_logit < s[b].opacity_logit;
    });
    std::vector<bool> drop(n, false);
    for (std::size_t k = 0; k < remove; ++k) drop[by_opacity[k]] = true;

    GaussianFrame next = r.frame;
    next.splats.clear();
    std::vector<std::uint32_t> kept;
    for (std::size_t i = 0; i < n; ++i) {
      if (drop[i]) continue;
      next.splats.push_back(s[i]);
      kept.push_back(r.kept[i]);
    }
    r.frame = std::move(next);
    r.kept = std::move(kept);
    ++r.rounds;
    if (options.finetune) {
      options.finetune(r.frame);
      if (r.frame.splats.size() != r.kept.size()) {
        throw Error(ErrorKind::kMismatch, "finetune hook changed the splat count");
      }
    }
  }
  if (r.rounds > 0) r.frame.update_bbox();
  return r;
}

GaussianFrame apply_keep_mask(const GaussianFrame& frame, const std::vector<std::uint32_t>& kept) {
  GaussianFrame out = frame;
  out.splats.clear();
  out.splats.reserve(kept.size());
  for (std::uint32_t i : kept) {
    if (i >= frame.splats.size()) {
      throw Error(ErrorKind::kOutOfRange, "keep mask index " + std::to_string(i) +
                                              " beyond splat count");
    }
    out.splats.push_back(frame.splats[i]);
  }
  if (!out.splats.empty()) out.update_bbox();
  return out;
}

}  // namespace gvv
