#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "gvv/core/packing.h"
#include "gvv/core/synthetic.h"
#include "gvv/error.h"
#include "gvv/render/render.h"

using namespace gvv;

namespace {

constexpr double kShC0 = 0.28209479177387814;

// Camera at the origin looking down +z with the principal point on pixel
// (cx, cy).
Camera axis_camera(double f, int w, int h, double cx, double cy) {
  Camera cam;
  cam.fx = cam.fy = f;
  cam.width = w;
  cam.height = h;
  cam.cx = cx;
  cam.cy = cy;
  return cam;
}

GaussianSplat splat_at(float x, float y, float z, float scale, float opacity_logit,
                       Vec3f rgb) {
  GaussianSplat s;
  s.position = {x, y, z};
  s.log_scale = {std::log(scale), std::log(scale), std::log(scale)};
  s.opacity_logit = opacity_logit;
  for (int c = 0; c < 3; ++c) s.color[c] = static_cast<float>((rgb[c] - 0.5) / kShC0);
  return s;
}

std::array<float, 4> random_unit_quat(std::mt19937_64& rng) {
  std::normal_distribution<float> n;
  GaussianSplat s;
  s.rotation = {n(rng), n(rng), n(rng), n(rng)};
  s.normalize_rotation();
  return s.rotation;
}

}  // namespace

TEST_CASE("covariance_3d analytic cases") {
  const auto sigma = covariance_3d({1, 0, 0, 0}, {2, 3, 4});
  CHECK(sigma.isApprox(Eigen::Vector3d(4, 9, 16).asDiagonal().toDenseMatrix(), 1e-12));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto iso = covariance_3d(random_unit_quat(rng), {1.5f, 1.5f, 1.5f});
    CHECK((iso - 2.25 * Eigen::Matrix3d::Identity()).norm() < 1e-9);
  }
}

TEST_CASE("covariance_3d eigenvalues are the squared scales") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> sd(0.1f, 3.f);
  for (int i = 0; i < 50; ++i) {
    const Vec3f s = {sd(rng), sd(rng), sd(rng)};
    const auto sigma = covariance_3d(random_unit_quat(rng), s);
    CHECK((sigma - sigma.transpose()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(sigma);
    std::array<double, 3> want = {double(s[0]) * s[0], double(s[1]) * s[1],
                                  double(s[2]) * s[2]};
    std::sort(want.begin(), want.end());
    for (int k = 0; k < 3; ++k) CHECK(es.eigenvalues()[k] == doctest::Approx(want[k]).epsilon(1e-9));
  }
}

TEST_CASE("project_splat on the optical axis") {
  const auto cam = axis_camera(400.0, 64, 64, 31.5, 31.5);
  const float s = 0.05f;
  auto near_splat = splat_at(0, 0, 2.f, s, 0.f, {0.5f, 0.5f, 0.5f});
  auto far_splat = splat_at(0, 0, 4.f, s, 0.f, {0.5f, 0.5f, 0.5f});
  const auto pn = project_splat(near_splat, cam);
  const auto pf = project_splat(far_splat, cam);
  REQUIRE(pn);
  REQUIRE(pf);
  const double expect_near = std::pow(s * 400.0 / 2.0, 2);
  CHECK(pn->cov(0, 0) - kCovarianceFloor == doctest::Approx(expect_near).epsilon(1e-6));
  CHECK(pn->cov(1, 1) - kCovarianceFloor == doctest::Approx(expect_near).epsilon(1e-6));
  CHECK(std::abs(pn->cov(0, 1)) < 1e-9);
  CHECK(pn->mean.x() == doctest::Approx(31.5));
  const double sd_near = std::sqrt(pn->cov(0, 0) - kCovarianceFloor);
  const double sd_far = std::sqrt(pf->cov(0, 0) - kCovarianceFloor);
  CHECK(sd_far == doctest::Approx(0.5 * sd_near).epsilon(1e-6));
  CHECK(pn->depth == doctest::Approx(2.0));
}

TEST_CASE("splats behind the camera are culled") {
  const auto cam = axis_camera(400.0, 32, 32, 16, 16);
  CHECK_FALSE(project_splat(splat_at(0, 0, -1.f, 0.1f, 0.f, {1, 1, 1}), cam));
  CHECK_FALSE(project_splat(splat_at(0, 0, 0.f, 0.1f, 0.f, {1, 1, 1}), cam));
  const auto frame = make_frame({splat_at(0, 0, -2.f, 0.1f, 5.f, {1, 1, 1})}, 0);
  RenderStats stats;
  const auto img = render(frame, cam, {}, &stats);
  CHECK(stats.culled == 1);
  CHECK(stats.drawn == 0);
  CHECK(*std::max_element(img.rgb.begin(), img.rgb.end()) == 0.f);
}

TEST_CASE("single opaque splat centered on a pixel yields its color") {
  const auto cam = axis_camera(300.0, 32, 24, 10, 12);
  // sigmoid(30) rounds to exactly 1 in float.
  const auto frame = make_frame({splat_at(0, 0, 3.f, 0.02f, 30.f, {0.2f, 0.5f, 0.8f})}, 0);
  REQUIRE(frame.splats[0].opacity() == 1.f);
  const auto img = render(frame, cam);
  const float* px = img.pixel(10, 12);
  CHECK(std::abs(px[0] - 0.2f) < 1e-6);
  CHECK(std::abs(px[1] - 0.5f) < 1e-6);
  CHECK(std::abs(px[2] - 0.8f) < 1e-6);
  CHECK(img.alpha[12 * 32 + 10] == 1.f);
}

TEST_CASE("two half-transparent splats blend front to back") {
  const auto cam = axis_camera(300.0, 32, 24, 10, 12);
  const Vec3f c1 = {0.9f, 0.1f, 0.3f}, c2 = {0.2f, 0.7f, 0.6f};
  // Listed back-first to exercise the depth sort.
  const auto frame = make_frame(
      {splat_at(0, 0, 6.f, 0.05f, 0.f, c2), splat_at(0, 0, 3.f, 0.02f, 0.f, c1)}, 0);
  const auto img = render(frame, cam);
  const float* px = img.pixel(10, 12);
  for (int c = 0; c < 3; ++c) CHECK(std::abs(px[c] - (0.5f * c1[c] + 0.25f * c2[c])) < 1e-6);
  CHECK(std::abs(img.alpha[12 * 32 + 10] - 0.75f) < 1e-6);
}

TEST_CASE("render is invariant to splat order and thread count") {
  auto frame = random_frame(3000, 17, 1);
  const auto cam = look_at({0.3, -0.2, -3.5}, {0, 0, 0}, {0, 1, 0}, 55.0, 160, 120);
  RenderOptions opts;
  opts.sh_degree = 1;
  const auto base = render(frame, cam, opts);

  auto shuffled = frame;
  std::shuffle(shuffled.splats.begin(), shuffled.splats.end(), std::mt19937_64(1));
  CHECK(render(shuffled, cam, opts).rgb == base.rgb);

  opts.threads = 4;
  const auto threaded = render(frame, cam, opts);
  CHECK(threaded.rgb == base.rgb);
  CHECK(threaded.alpha == base.alpha);

  for (float a : base.alpha) {
    REQUIRE(a >= 0.f);
    REQUIRE(a <= 1.f);
  }
}

TEST_CASE("psnr") {
  ImageBuffer a(8, 4), b(8, 4);
  std::fill(a.rgb.begin(), a.rgb.end(), 0.5f);
  b = a;
  CHECK(psnr(a, b) == kPsnrIdentical);
  for (auto& v : b.rgb) v = 0.4f;
  // MSE = 0.01 -> 10 log10(100) = 20 dB.
  CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-5));
  CHECK(psnr(a, b) == psnr(b, a));
  ImageBuffer c(4, 4);
  CHECK_THROWS_AS(psnr(a, c), Error);
}

TEST_CASE("quantization-only round trip renders at >= 45 dB") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto frame = random_frame(10000, seed, 0);
    const auto stack = pack_group(std::span(&frame, 1), attribute_layout(0));
    const auto back = unpack_frame(stack, 0);
    const auto cam = look_at({0.5, 0.4, -3.2}, {0, 0, 0}, {0, 1, 0}, 50.0, 256, 192);
    const double db = psnr(render(frame, cam), render(back, cam));
    MESSAGE("seed " << seed << ": " << db << " dB");
    CHECK(db >= 45.0);
  }
}

TEST_CASE("reconstruct + render budget at 1920x1080") {
  const auto frame = random_frame(100000, 42);
  const auto stack = pack_group(std::span(&frame, 1), attribute_layout(0));
  const auto cam = look_at({0.0, 0.0, -3.0}, {0, 0, 0}, {0, 1, 0}, 60.0, 1920, 1080);
  const auto t0 = std::chrono::steady_clock::now();
  const auto back = unpack_frame(stack, 0);
  const auto img = render(back, cam);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("unpack+render 100k splats @1080p: " << s << " s");
  CHECK(s < 1.0);
}
