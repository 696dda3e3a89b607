#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gvv/core/types.h"

namespace gvv {

struct PruneOptions {
  double ratio = 0.3;
  std::size_t target_count = 100000;
  // Runs after every round, e.g. a fine-tuning pass. It may edit attributes
  // but must not change the splat count.
  std::function<void(GaussianFrame&)> finetune;
};

struct PruneResult {
  GaussianFrame frame;
  int rounds = 0;
  // Original indices of the surviving splats, ascending.
  std::vector<std::uint32_t> kept;
};

// Repeatedly drops round(count * ratio) splats (at least one) with the
// lowest opacity, ties broken by lower index first, until count <=
// target_count. Survivors keep their order and attributes.
PruneResult prune_keyframe(const GaussianFrame& frame, const PruneOptions& options = {});

// Keeps the listed splats of another frame of the same group.
GaussianFrame apply_keep_mask(const GaussianFrame& frame, const std::vector<std::uint32_t>& kept);

}  // namespace gvv
