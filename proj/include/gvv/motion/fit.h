#pragma once

#include <functional>

#include "gvv/motion/motion_field.h"

namespace gvv {

// Returns the loss for predicted positions and writes d loss / d x_pred
// into grad (same shape).
using MotionObjective = std::function<double(const Eigen::Matrix3Xf& x_pred, Eigen::Matrix3Xf& grad)>;

// Mean squared distance to known per-point targets.
MotionObjective supervised_l2(Eigen::Matrix3Xf target);
// Symmetric chamfer distance to an unordered target cloud.
MotionObjective chamfer_objective(Eigen::Matrix3Xf target);

struct FitOptions {
  int iterations = 500;
  double lr_tables = 1e-2;
  double lr_mlp = 1e-3;
  // Cosine decay of both learning rates to zero over the run.
  bool cosine_decay = true;
  HashGridConfig grid;
  int hidden = 64;
  std::uint64_t seed = 0;
  // Called after every iteration with (iteration, loss).
  std::function<void(int, double)> progress;
};

struct FitResult {
  MotionField<float> field;
  std::vector<double> losses;
  double initial_loss = 0.0;
  // Objective evaluated on x_prev + predict_delta(x_prev) after training.
  double final_loss = 0.0;
  double seconds = 0.0;
};

// Adam over the MLP and, lazily, over the hash-table rows touched in each
// step. Throws kDiverged if the loss or its gradient becomes non-finite.
FitResult fit_motion(const Eigen::Matrix3Xf& x_prev, const MotionObjective& objective,
                     const FitOptions& options = {});

}  // namespace gvv
