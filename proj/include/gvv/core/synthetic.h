#pragma once

#include <cstdint>
#include <vector>

#include "gvv/core/types.h"

namespace gvv {

// Seeded generators for test scenes and demo assets.

// Independent random splats in [-1, 1]^3 with small scales.
GaussianFrame random_frame(std::size_t count, std::uint64_t seed, int sh_degree = 0,
                           int frame_index = 0);

struct SmoothMotion {
  float amplitude = 0.02f;  // world units
  float period_frames = 40.f;
};

// A fixed set of splats on a noisy sphere shell whose positions follow a
// smooth traveling wave. Splat i corresponds across all frames.
std::vector<GaussianFrame> smooth_sequence(std::size_t count, int num_frames,
                                           std::uint64_t seed, SmoothMotion motion = {},
                                           int sh_degree = 0);

}  // namespace gvv
