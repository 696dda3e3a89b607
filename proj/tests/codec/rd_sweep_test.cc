#include <doctest.h>

#include "gvv/codec/rd_sweep.h"
#include "gvv/core/synthetic.h"
#include "gvv/error.h"

using namespace gvv;

namespace {

std::vector<Camera> two_cameras() {
  return {look_at({0.2, 0.3, -3.0}, {0, 0, 0}, {0, 1, 0}, 50.0, 128, 96),
          look_at({-2.5, 0.5, 1.5}, {0, 0, 0}, {0, 1, 0}, 50.0, 128, 96)};
}

// Pure quantization loss, computed without the codec: pack each frame with
// the same group ranges and unpack directly.
double quantization_only_psnr(const std::vector<GaussianFrame>& frames, int group_size,
                              const std::vector<Camera>& cams) {
  std::vector<ImageBuffer> ref, got;
  for (const auto& [start, len] : group_bounds(static_cast<int>(frames.size()), group_size)) {
    const auto stack =
        pack_group(std::span(frames).subspan(start, len), attribute_layout(frames[0].sh_degree));
    for (int k = 0; k < len; ++k) {
      const auto back = unpack_frame(stack, k);
      for (const auto& c : cams) {
        ref.push_back(render(frames[start + k], c));
        got.push_back(render(back, c));
      }
    }
  }
  return psnr_pooled(ref, got);
}

}  // namespace

TEST_CASE("lossless row equals the pure quantization PSNR") {
  const auto frames = smooth_sequence(1500, 6, 4);
  const auto cams = two_cameras();
  RdOptions opts;
  opts.group_size = 4;
  const std::vector<std::optional<int>> qps = {std::nullopt};
  const auto rows = rate_distortion_sweep(frames, qps, cams, opts);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].label() == "lossless");
  CHECK(rows[0].bytes_per_frame > 0);
  CHECK(rows[0].psnr_db == doctest::Approx(quantization_only_psnr(frames, 4, cams)).epsilon(1e-12));
}

TEST_CASE("rd sweep preconditions") {
  const auto frames = smooth_sequence(50, 2, 4);
  const std::vector<std::optional<int>> qps = {std::nullopt};
  CHECK_THROWS_AS(rate_distortion_sweep(frames, qps, {}), Error);
  CHECK_THROWS_AS(rate_distortion_sweep({}, qps, two_cameras()), Error);
}

TEST_CASE("rd csv format") {
  const std::vector<RdRow> rows = {{std::nullopt, 12345.0, 55.5}, {25, 2000.0, 40.25}};
  CHECK(rd_csv(rows) == "qp,kb_per_frame,psnr_db\nlossless,12.345,55.5000\n25,2.000,40.2500\n");
}

TEST_CASE("rd sweep is monotone over qp with the external encoder") {
  if (!find_encoder()) {
    MESSAGE("SKIPPED: no external H.264 encoder (set GVV_FFMPEG)");
    return;
  }
  const auto frames = smooth_sequence(3000, 6, 8);
  const std::vector<std::optional<int>> qps = {15, 25, 35};
  RdOptions opts;
  opts.group_size = 6;
  const auto rows = rate_distortion_sweep(frames, qps, two_cameras(), opts);
  MESSAGE(rd_csv(rows));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].bytes_per_frame < rows[i - 1].bytes_per_frame);
    CHECK(rows[i].psnr_db <= rows[i - 1].psnr_db + 0.1);
  }
}
