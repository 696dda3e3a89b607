#include "gvv/regularizers/entropy.h"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "gvv/error.h"

namespace gvv {

namespace {

// Standard normal CDF and its upper tail via erfc, which keeps full
// relative precision far out in either tail.
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Phi(a) - Phi(b) for a > b, choosing the tail that avoids cancellation.
double interval_mass(double a, double b) {
  if (b > 0.0) return normal_sf(b) - normal_sf(a);
  return normal_cdf(a) - normal_cdf(b);
}

void check_params(const EntropyParams& p) {
  if (!(p.sigma >= kSigmaMin) || !std::isfinite(p.mu) || !std::isfinite(p.sigma)) {
    throw Error(ErrorKind::kOutOfRange, "entropy model needs finite mu and sigma >= 1e-4");
  }
}

}  // namespace

std::vector<double> residual_quantize(std::span<const double> y_t, std::span<const double> y_prev,
                                      double y_min, double y_max, std::uint32_t q, bool noise,
                                      std::uint64_t seed) {
  if (y_t.size() != y_prev.size()) {
    throw Error(ErrorKind::kMismatch, "residual_quantize: arrays differ in length");
  }
  if (!(y_max > y_min)) throw Error(ErrorKind::kInvalidArgument, "residual range is empty");
  if (q < 2) throw Error(ErrorKind::kOutOfRange, "quantization region count must be >= 2");
  const double scale = residual_slope(y_min, y_max, q);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> out(y_t.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (y_t[i] - y_prev[i] - y_min) * scale;
    if (noise) out[i] += u(rng);
  }
  return out;
}

double residual_slope(double y_min, double y_max, std::uint32_t q) {
  return static_cast<double>(q) / (y_max - y_min);
}

EntropyParams fit_entropy_params(std::span<const double> yhat) {
  if (yhat.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot fit an empty residual set");
  double mean = 0.0;
  for (double v : yhat) mean += v;
  mean /= static_cast<double>(yhat.size());
  double var = 0.0;
  for (double v : yhat) var += (v - mean) * (v - mean);
  var /= static_cast<double>(yhat.size());
  return {mean, std::max(kSigmaMin, std::sqrt(var))};
}

double bin_probability(double yhat, const EntropyParams& p) {
  check_params(p);
  const double a = (yhat + 0.5 - p.mu) / p.sigma;
  const double b = (yhat - 0.5 - p.mu) / p.sigma;
  return std::max(kProbabilityFloor, interval_mass(a, b));
}

EntropyResult entropy_loss(std::span<const std::vector<double>> yhat,
                           std::span<const EntropyParams> params, std::size_t num_splats) {
  if (yhat.size() != params.size()) {
    throw Error(ErrorKind::kMismatch, "entropy_loss: one parameter set per attribute required");
  }
  if (num_splats == 0) throw Error(ErrorKind::kInvalidArgument, "entropy_loss: zero splats");
  std::size_t total = 0;
  for (const auto& v : yhat) total += v.size();
  if (total == 0) throw Error(ErrorKind::kInvalidArgument, "entropy_loss: empty input");

  const double inv_n = 1.0 / static_cast<double>(num_splats);
  EntropyResult r;
  r.d_yhat.resize(yhat.size());
  r.d_mu.assign(yhat.size(), 0.0);
  r.d_sigma.assign(yhat.size(), 0.0);
  for (std::size_t k = 0; k < yhat.size(); ++k) {
    const auto& p = params[k];
    check_params(p);
    r.d_yhat[k].assign(yhat[k].size(), 0.0);
    for (std::size_t i = 0; i < yhat[k].size(); ++i) {
      const double y = yhat[k][i];
      if (!std::isfinite(y)) {
        throw Error(ErrorKind::kInvalidArgument, "entropy_loss: non-finite residual");
      }
      const double a = (y + 0.5 - p.mu) / p.sigma;
      const double b = (y - 0.5 - p.mu) / p.sigma;
      const double mass = interval_mass(a, b);
      if (mass < kProbabilityFloor) {
        r.bits += -std::log2(kProbabilityFloor) * inv_n;
        continue;
      }
      r.bits += -std::log2(mass) * inv_n;
      // d(-log2 P)/dP, scaled by 1/N.
      const double g = -inv_n / (mass * std::numbers::ln2);
      const double pa = normal_pdf(a), pb = normal_pdf(b);
      const double dp_dy = (pa - pb) / p.sigma;
      r.d_yhat[k][i] = g * dp_dy;
      r.d_mu[k] += -g * dp_dy;
      r.d_sigma[k] += g * -(a * pa - b * pb) / p.sigma;
    }
  }
  return r;
}

}  // namespace gvv
