#include "gvv/core/synthetic.h"

#include <cmath>
#include <numbers>
#include <random>

namespace gvv {

namespace {

std::array<float, 4> random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<float> n(0.f, 1.f);
  GaussianSplat s;
  s.rotation = {n(rng), n(rng), n(rng), n(rng)};
  s.normalize_rotation();
  return s.rotation;
}

}  // namespace

GaussianFrame random_frame(std::size_t count, std::uint64_t seed, int sh_degree,
                           int frame_index) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> pos(-1.f, 1.f);
  std::uniform_real_distribution<float> lscale(std::log(0.005f), std::log(0.03f));
  std::uniform_real_distribution<float> opa(-2.f, 4.f);
  std::uniform_real_distribution<float> dc(-1.5f, 1.5f);
  std::uniform_real_distribution<float> rest(-0.2f, 0.2f);
  const std::size_t k = 3 * sh_coeffs_per_channel(sh_degree);

  std::vector<GaussianSplat> splats(count);
  for (auto& s : splats) {
    s.position = {pos(rng), pos(rng), pos(rng)};
    s.rotation = random_quaternion(rng);
    s.log_scale = {lscale(rng), lscale(rng), lscale(rng)};
    s.opacity_logit = opa(rng);
    s.color = {dc(rng), dc(rng), dc(rng)};
    s.sh.resize(k);
    for (float& v : s.sh) v = rest(rng);
  }
  return make_frame(std::move(splats), frame_index, sh_degree);
}

std::vector<GaussianFrame> smooth_sequence(std::size_t count, int num_frames,
                                           std::uint64_t seed, SmoothMotion motion,
                                           int sh_degree) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0.f, 1.f);
  std::uniform_real_distribution<float> u(0.f, 1.f);
  const std::size_t k = 3 * sh_coeffs_per_channel(sh_degree);

  std::vector<GaussianSplat> base(count);
  for (auto& s : base) {
    float x = n(rng), y = n(rng), z = n(rng);
    const float r = (0.8f + 0.05f * u(rng)) / std::sqrt(x * x + y * y + z * z);
    s.position = {x * r, y * r * 1.4f, z * r};
    s.rotation = random_quaternion(rng);
    const float ls = std::log(0.01f + 0.01f * u(rng));
    s.log_scale = {ls, ls + 0.3f * (u(rng) - 0.5f), ls + 0.3f * (u(rng) - 0.5f)};
    s.opacity_logit = 1.f + 2.f * u(rng);
    // Smooth color field over the surface.
    s.color = {std::sin(2.f * s.position[0]), std::cos(2.f * s.position[1]),
               std::sin(1.5f * s.position[2] + 0.5f)};
    s.sh.resize(k);
    for (std::size_t j = 0; j < k; ++j) s.sh[j] = 0.1f * std::sin(float(j) + s.position[0]);
  }

  std::vector<GaussianFrame> frames;
  frames.reserve(num_frames);
  const float w = 2.f * std::numbers::pi_v<float> / motion.period_frames;
  for (int t = 0; t < num_frames; ++t) {
    std::vector<GaussianSplat> splats = base;
    for (auto& s : splats) {
      const auto& p = s.position;
      const float phase = 3.f * p[1];
      const float dx = motion.amplitude * std::sin(w * t + phase);
      const float dz = motion.amplitude * std::cos(w * t + phase);
      s.position = {p[0] + dx, p[1], p[2] + dz};
      // Rotate each splat slowly about y as the surface sways.
      const float half = 0.5f * 0.2f * std::sin(w * t + phase);
      const std::array<float, 4> dq = {std::cos(half), 0.f, std::sin(half), 0.f};
      const auto& q = s.rotation;
      s.rotation = {dq[0] * q[0] - dq[1] * q[1] - dq[2] * q[2] - dq[3] * q[3],
                    dq[0] * q[1] + dq[1] * q[0] + dq[2] * q[3] - dq[3] * q[2],
                    dq[0] * q[2] - dq[1] * q[3] + dq[2] * q[0] + dq[3] * q[1],
                    dq[0] * q[3] + dq[1] * q[2] - dq[2] * q[1] + dq[3] * q[0]};
      s.normalize_rotation();
    }
    frames.push_back(make_frame(std::move(splats), t, sh_degree));
  }
  return frames;
}

}  // namespace gvv
