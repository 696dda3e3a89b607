#include <doctest.h>

#include <cmath>
#include <random>

#include "gvv/error.h"
#include "gvv/regularizers/entropy.h"
#include "support/oracles.h"

using namespace gvv;

namespace {

double loss_only(const std::vector<std::vector<double>>& y, const std::vector<EntropyParams>& p,
                 std::size_t n) {
  return entropy_loss(y, p, n).bits;
}

}  // namespace

TEST_CASE("entropy of a zero residual under the unit normal") {
  const double oracle_mass = 2.0 * oracle::normal_cdf_simpson(0.5) - 1.0;
  CHECK(oracle::normal_cdf_simpson(0.5) == doctest::Approx(0.691462).epsilon(1e-6));
  const double oracle_bits = -std::log2(oracle_mass);
  // Frozen from the oracle above.
  CHECK(oracle_bits == doctest::Approx(1.3848).epsilon(1e-4));

  const std::vector<std::vector<double>> y = {{0.0}};
  const std::vector<EntropyParams> p = {{0.0, 1.0}};
  const auto r = entropy_loss(y, p, 1);
  CHECK(std::abs(r.bits - 1.3848) < 1e-3);
  CHECK(std::abs(r.bits - oracle_bits) < 1e-10);
  // Symmetric bin: no pull on yhat or mu.
  CHECK(std::abs(r.d_yhat[0][0]) < 1e-15);
  CHECK(std::abs(r.d_mu[0]) < 1e-15);
}

TEST_CASE("bin probability matches the Simpson oracle across the range") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> yd(-6, 6), sd(0.3, 3);
  for (int i = 0; i < 200; ++i) {
    const EntropyParams p{yd(rng) / 3, sd(rng)};
    const double y = yd(rng);
    const double a = (y + 0.5 - p.mu) / p.sigma, b = (y - 0.5 - p.mu) / p.sigma;
    const double want =
        std::max(kProbabilityFloor, oracle::normal_cdf_simpson(a) - oracle::normal_cdf_simpson(b));
    REQUIRE(bin_probability(y, p) == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("far-out residuals saturate at the probability floor") {
  const std::vector<EntropyParams> p = {{0.0, 1.0}};
  for (double y : {1e6, -1e6, 60.0}) {
    const std::vector<std::vector<double>> v = {{y}};
    const auto r = entropy_loss(v, p, 1);
    CHECK(r.bits == doctest::Approx(29.897).epsilon(1e-4));
    CHECK(r.bits == doctest::Approx(-std::log2(1e-9)));
    CHECK(r.d_yhat[0][0] == 0.0);
    CHECK(r.d_sigma[0] == 0.0);
  }
}

TEST_CASE("entropy gradients match central differences") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> mu_d(-3, 3), sigma_d(0.2, 4), z_d(-3.5, 3.5);
  const double h = 1e-4;
  double worst = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    const std::size_t attrs = 1 + instance % 3;
    std::vector<EntropyParams> p(attrs);
    std::vector<std::vector<double>> y(attrs);
    for (std::size_t k = 0; k < attrs; ++k) {
      p[k] = {mu_d(rng), sigma_d(rng)};
      y[k].resize(1 + (instance + k) % 4);
      for (double& v : y[k]) v = p[k].mu + z_d(rng) * p[k].sigma;
    }
    const std::size_t n = 3;
    const auto r = entropy_loss(y, p, n);
    for (std::size_t k = 0; k < attrs; ++k) {
      for (std::size_t i = 0; i < y[k].size(); ++i) {
        auto f = [&](const std::vector<double>& x) {
          auto yy = y;
          yy[k][i] = x[0];
          return loss_only(yy, p, n);
        };
        const double fd = oracle::central_difference(f, {y[k][i]}, 0, h);
        worst = std::max(worst, oracle::relative_error(r.d_yhat[k][i], fd));
      }
      auto fmu = [&](const std::vector<double>& x) {
        auto pp = p;
        pp[k].mu = x[0];
        return loss_only(y, pp, n);
      };
      auto fsig = [&](const std::vector<double>& x) {
        auto pp = p;
        pp[k].sigma = x[0];
        return loss_only(y, pp, n);
      };
      worst = std::max(worst, oracle::relative_error(
                                  r.d_mu[k], oracle::central_difference(fmu, {p[k].mu}, 0, h)));
      worst = std::max(worst, oracle::relative_error(
                                  r.d_sigma[k], oracle::central_difference(fsig, {p[k].sigma}, 0, h)));
    }
  }
  MESSAGE("worst relative gradient error: " << worst);
  CHECK(worst < 1e-4);
}

TEST_CASE("entropy is minimized over mu near the residual mean") {
  std::mt19937_64 rng(31);
  for (double true_mu : {-7.3, 0.0, 12.6}) {
    std::normal_distribution<double> nd(true_mu, 2.0);
    std::vector<double> v(4000);
    for (double& x : v) x = nd(rng);
    const double mean = fit_entropy_params(v).mu;
    const std::vector<std::vector<double>> y = {v};
    double best_mu = 0, best = INFINITY;
    for (double mu = true_mu - 3; mu <= true_mu + 3; mu += 0.01) {
      const std::vector<EntropyParams> p = {{mu, 2.0}};
      const double bits = entropy_loss(y, p, v.size()).bits;
      if (bits < best) best = bits, best_mu = mu;
    }
    CHECK(std::abs(best_mu - mean) < 0.05);
  }
}

TEST_CASE("shrinking residual spread never increases entropy") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd(1.5, 3.0);
  std::vector<double> v(500);
  for (double& x : v) x = nd(rng);
  const std::vector<EntropyParams> p = {{1.5, 2.5}};
  double prev = INFINITY;
  for (double k : {1.0, 0.9, 0.7, 0.5, 0.3, 0.1, 0.0}) {
    std::vector<std::vector<double>> y = {v};
    for (double& x : y[0]) x = 1.5 + k * (x - 1.5);
    const double bits = entropy_loss(y, p, v.size()).bits;
    CHECK(bits <= prev);
    prev = bits;
  }
}

TEST_CASE("entropy_loss preconditions") {
  const std::vector<std::vector<double>> y = {{0.0}};
  const std::vector<EntropyParams> bad_sigma = {{0.0, 1e-5}};
  CHECK_THROWS_AS(entropy_loss(y, bad_sigma, 1), Error);
  const std::vector<EntropyParams> ok = {{0.0, 1.0}};
  CHECK_THROWS_AS(entropy_loss(y, ok, 0), Error);
  const std::vector<std::vector<double>> empty = {{}};
  CHECK_THROWS_AS(entropy_loss(empty, ok, 1), Error);
  const std::vector<EntropyParams> two = {{0.0, 1.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(entropy_loss(y, two, 1), Error);
  const std::vector<std::vector<double>> nan = {{std::nan("")}};
  CHECK_THROWS_AS(entropy_loss(nan, ok, 1), Error);
}

TEST_CASE("residual_quantize without noise") {
  const std::vector<double> y = {0.3, -0.2, 1.0};
  const auto r = residual_quantize(y, y, -0.5, 1.5, 255, false);
  for (double v : r) CHECK(v == doctest::Approx(0.5 / 2.0 * 255));
  const std::vector<double> prev = {0.0, 0.0, 0.0};
  const auto d = residual_quantize(y, prev, -1.0, 1.0, 200, false);
  CHECK(d[0] == doctest::Approx((0.3 + 1.0) / 2.0 * 200));
  CHECK(residual_slope(-1.0, 1.0, 200) == doctest::Approx(100.0));
}

TEST_CASE("residual_quantize noise is seeded and bounded by half a bin") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<double> a(2000), b(2000);
  for (auto& x : a) x = d(rng);
  for (auto& x : b) x = d(rng);
  const auto clean = residual_quantize(a, b, -2, 2, 255, false);
  const auto n1 = residual_quantize(a, b, -2, 2, 255, true, 17);
  const auto n2 = residual_quantize(a, b, -2, 2, 255, true, 17);
  const auto n3 = residual_quantize(a, b, -2, 2, 255, true, 18);
  CHECK(n1 == n2);
  CHECK(n1 != n3);
  double lo = 0, hi = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double u = n1[i] - clean[i];
    REQUIRE(std::abs(u) <= 0.5);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  // The draws actually cover the interval.
  CHECK(lo < -0.45);
  CHECK(hi > 0.45);
}

TEST_CASE("residual_quantize preconditions") {
  const std::vector<double> a = {1.0}, b = {1.0, 2.0};
  CHECK_THROWS_AS(residual_quantize(a, b, 0, 1, 255, false), Error);
  CHECK_THROWS_AS(residual_quantize(a, a, 1, 1, 255, false), Error);
  CHECK_THROWS_AS(residual_quantize(a, a, 0, 1, 1, false), Error);
  CHECK(default_regions(8) == 255u);
  CHECK(default_regions(16) == 65535u);
}
