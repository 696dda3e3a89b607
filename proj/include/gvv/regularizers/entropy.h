#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gvv {

inline constexpr double kSigmaMin = 1e-4;
inline constexpr double kProbabilityFloor = 1e-9;

// Scaled inter-frame residual with optional rounding noise:
//   yhat = (y_t - y_prev - y_min) / (y_max - y_min) * q + u,  u ~ U(-1/2, 1/2)
// y_min/y_max are the group range of the attribute. u is drawn from a
// generator seeded with `seed` when noise is on and is 0 otherwise.
std::vector<double> residual_quantize(std::span<const double> y_t, std::span<const double> y_prev,
                                      double y_min, double y_max, std::uint32_t q, bool noise,
                                      std::uint64_t seed = 0);

// d yhat / d y_t, for chaining gradients back to attribute values.
double residual_slope(double y_min, double y_max, std::uint32_t q);

// Default quantization region count for a lattice of `bits` bits.
constexpr std::uint32_t default_regions(int bits) { return (1u << bits) - 1u; }

// Learnable Gaussian prior of one attribute's scaled residuals.
struct EntropyParams {
  double mu = 0.0;
  double sigma = 1.0;
};

// Sample mean and standard deviation, with sigma floored at kSigmaMin.
EntropyParams fit_entropy_params(std::span<const double> yhat);

struct EntropyResult {
  // (1/N) * sum over all attributes and elements of -log2 P(yhat).
  double bits = 0.0;
  // Same shape as the input arrays.
  std::vector<std::vector<double>> d_yhat;
  std::vector<double> d_mu;
  std::vector<double> d_sigma;
};

// Probability mass of the unit bin around each yhat under N(mu, sigma),
//   P = Phi((yhat + 1/2 - mu) / sigma) - Phi((yhat - 1/2 - mu) / sigma),
// floored at kProbabilityFloor. One params entry per attribute array; N is
// the splat count used for normalization. Floored elements contribute no
// gradient.
EntropyResult entropy_loss(std::span<const std::vector<double>> yhat,
                           std::span<const EntropyParams> params, std::size_t num_splats);

// Bin probability for a single value; exposed for diagnostics.
double bin_probability(double yhat, const EntropyParams& p);

}  // namespace gvv
