#include "gvv/motion/fit.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "gvv/error.h"
#include "gvv/motion/nearest.h"

namespace gvv {

MotionObjective supervised_l2(Eigen::Matrix3Xf target) {
  return [target = std::move(target)](const Eigen::Matrix3Xf& x, Eigen::Matrix3Xf& grad) {
    if (x.cols() != target.cols()) {
      throw Error(ErrorKind::kMismatch, "supervised_l2: point counts differ");
    }
    const Eigen::Matrix3Xf diff = x - target;
    const double n = static_cast<double>(x.cols());
    grad = diff * static_cast<float>(2.0 / n);
    return diff.cast<double>().squaredNorm() / n;
  };
}

MotionObjective chamfer_objective(Eigen::Matrix3Xf target) {
  auto shared = std::make_shared<Eigen::Matrix3Xf>(std::move(target));
  auto target_grid = std::make_shared<PointGrid>(*shared);
  return [shared, target_grid](const Eigen::Matrix3Xf& x, Eigen::Matrix3Xf& grad) {
    const Eigen::Matrix3Xf& t = *shared;
    const double n = static_cast<double>(x.cols()), m = static_cast<double>(t.cols());
    grad = Eigen::Matrix3Xf::Zero(3, x.cols());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      const auto hit = target_grid->nearest(x.col(i));
      loss += hit.distance2 / n;
      grad.col(i) += (x.col(i) - t.col(hit.index)) * static_cast<float>(2.0 / n);
    }
    const PointGrid pred_grid(x);
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      const auto hit = pred_grid.nearest(t.col(j));
      loss += hit.distance2 / m;
      grad.col(hit.index) += (x.col(hit.index) - t.col(j)) * static_cast<float>(2.0 / m);
    }
    return loss;
  };
}

namespace {

constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

struct AdamBuffer {
  std::vector<float> m, v;
  explicit AdamBuffer(std::size_t n = 0) : m(n, 0.f), v(n, 0.f) {}

  void update(float* p, const float* g, std::size_t offset, std::size_t n, double lr,
              double bc1, double bc2) {
    // p -= lr * (m / bc1) / (sqrt(v / bc2) + eps), with the corrections hoisted.
    const float b1 = kBeta1, b2 = kBeta2, c1 = 1 - kBeta1, c2 = 1 - kBeta2;
    const float step = static_cast<float>(lr / bc1);
    const float inv_sqrt_bc2 = static_cast<float>(1.0 / std::sqrt(bc2));
    const float eps = kEps;
    float* __restrict mm = m.data() + offset;
    float* __restrict vv = v.data() + offset;
    for (std::size_t k = 0; k < n; ++k) {
      mm[k] = b1 * mm[k] + c1 * g[k];
      vv[k] = b2 * vv[k] + c2 * g[k] * g[k];
      p[k] -= step * mm[k] / (std::sqrt(vv[k]) * inv_sqrt_bc2 + eps);
    }
  }
};

template <typename M>
void adam_dense(AdamBuffer& buf, M& param, const M& grad, double lr, double bc1, double bc2) {
  buf.update(param.data(), grad.data(), 0, static_cast<std::size_t>(param.size()), lr, bc1, bc2);
}


// The input positions never change during a fit, so the set of table rows
// they hash to is fixed. Training runs on a compact copy of just those rows,
// which keeps the working set small, and writes them back at the end.
struct CompactTables {
  std::vector<std::uint32_t> rows;  // global row ids, sorted
  std::vector<std::uint32_t> slot;  // per (point, level, corner)
  std::vector<float> weight;        // per (point, level, corner)
  std::vector<float> params, grad;

  CompactTables(const std::vector<CornerSet>& corners, int levels, std::uint32_t table_size,
                int features, const std::vector<float>& tables) {
    const std::size_t n = corners.size() * 8;
    std::vector<std::uint32_t> global(n);
    weight.resize(n);
    for (std::size_t c = 0; c < corners.size(); ++c) {
      const std::uint32_t base = std::uint32_t(c % levels) * table_size;
      for (int k = 0; k < 8; ++k) {
        global[c * 8 + k] = base + corners[c].index[k];
        weight[c * 8 + k] = static_cast<float>(corners[c].weight[k]);
      }
    }
    rows = global;
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    slot.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      slot[j] = static_cast<std::uint32_t>(
          std::lower_bound(rows.begin(), rows.end(), global[j]) - rows.begin());
    }
    params.resize(rows.size() * features);
    grad.assign(params.size(), 0.f);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::copy_n(tables.begin() + std::size_t(rows[r]) * features, features,
                  params.begin() + r * features);
    }
  }

  void gather(Eigen::MatrixXf& h, int levels, int F) const {
    const Eigen::Index n = h.cols();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int l = 0; l < levels; ++l) {
        const std::size_t c = (std::size_t(i) * levels + l) * 8;
        float acc[16] = {};
        for (int k = 0; k < 8; ++k) {
          const float* src = params.data() + std::size_t(slot[c + k]) * F;
          for (int f = 0; f < F; ++f) acc[f] += weight[c + k] * src[f];
        }
        for (int f = 0; f < F; ++f) h(l * F + f, i) = acc[f];
      }
    }
  }

  void scatter(const Eigen::MatrixXf& d_h, int levels, int F) {
    for (Eigen::Index i = 0; i < d_h.cols(); ++i) {
      for (int l = 0; l < levels; ++l) {
        const std::size_t c = (std::size_t(i) * levels + l) * 8;
        const float* dh = d_h.data() + i * d_h.rows() + l * F;
        for (int k = 0; k < 8; ++k) {
          float* dst = grad.data() + std::size_t(slot[c + k]) * F;
          for (int f = 0; f < F; ++f) dst[f] += weight[c + k] * dh[f];
        }
      }
    }
  }

  void write_back(std::vector<float>& tables, int F) const {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::copy_n(params.begin() + r * F, F, tables.begin() + std::size_t(rows[r]) * F);
    }
  }
};

}  // namespace

FitResult fit_motion(const Eigen::Matrix3Xf& x_prev, const MotionObjective& objective,
                     const FitOptions& options) {
  if (options.iterations < 0) throw Error(ErrorKind::kOutOfRange, "iterations must be >= 0");
  if (!objective) throw Error(ErrorKind::kInvalidArgument, "fit_motion needs an objective");
  if (options.grid.features > 16) {
    throw Error(ErrorKind::kOutOfRange, "fit_motion supports at most 16 features per level");
  }
  const auto t0 = std::chrono::steady_clock::now();

  FitResult r{MotionField<float>(options.grid, SpaceNormalization::fit(x_prev), options.seed,
                                 options.hidden),
              {}, 0.0, 0.0, 0.0};
  auto& field = r.field;
  auto& p = field.params();
  auto grads = field.make_gradients(false);
  const int L = options.grid.levels, F = options.grid.features;

  MotionField<float>::Cache cache;
  field.encode(x_prev, cache);
  CompactTables compact(cache.corners, L, options.grid.table_size(), F, p.tables);
  cache.corners.clear();
  cache.corners.shrink_to_fit();

  AdamBuffer tables(compact.params.size());
  AdamBuffer w1(p.w1.size()), w2(p.w2.size()), w3(p.w3.size());
  AdamBuffer b1(p.b1.size()), b2(p.b2.size()), b3(p.b3.size());

  Eigen::Matrix3Xf d_pred;
  for (int it = 0; it < options.iterations; ++it) {
    compact.gather(cache.h, L, F);
    const Eigen::Matrix3Xf pred = x_prev + field.head(cache);
    const double loss = objective(pred, d_pred);
    if (!std::isfinite(loss) || !d_pred.allFinite()) {
      throw Error(ErrorKind::kDiverged, "motion fit diverged at iteration " + std::to_string(it) +
                                            " (loss " + std::to_string(loss) + ")");
    }
    if (it == 0) r.initial_loss = loss;
    r.losses.push_back(loss);

    grads.clear();
    std::fill(compact.grad.begin(), compact.grad.end(), 0.f);
    compact.scatter(field.head_backward(cache, d_pred, grads), L, F);

    const int step = it + 1;
    const double decay =
        options.cosine_decay
            ? 0.5 * (1.0 + std::cos(std::numbers::pi * it / std::max(1, options.iterations)))
            : 1.0;
    const double bc1 = 1.0 - std::pow(kBeta1, step), bc2 = 1.0 - std::pow(kBeta2, step);
    const double lr_t = options.lr_tables * decay, lr_m = options.lr_mlp * decay;
    tables.update(compact.params.data(), compact.grad.data(), 0, compact.params.size(), lr_t, bc1,
                  bc2);
    adam_dense(w1, p.w1, grads.w1, lr_m, bc1, bc2);
    adam_dense(w2, p.w2, grads.w2, lr_m, bc1, bc2);
    adam_dense(w3, p.w3, grads.w3, lr_m, bc1, bc2);
    adam_dense(b1, p.b1, grads.b1, lr_m, bc1, bc2);
    adam_dense(b2, p.b2, grads.b2, lr_m, bc1, bc2);
    adam_dense(b3, p.b3, grads.b3, lr_m, bc1, bc2);
    if (options.progress) options.progress(it, loss);
  }
  compact.write_back(p.tables, F);

  Eigen::Matrix3Xf scratch;
  r.final_loss = objective(x_prev + field.predict_delta(x_prev), scratch);
  if (options.iterations == 0) r.initial_loss = r.final_loss;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace gvv
