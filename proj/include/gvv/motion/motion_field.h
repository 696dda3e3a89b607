#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "gvv/core/types.h"
#include "gvv/motion/hash_grid.h"

namespace gvv {

// Maps world positions into the unit cube the hash grid covers, and scales
// network outputs back to world units.
struct SpaceNormalization {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  // Edge length of the cube.
  double size = 1.0;
  // World length of one output unit; also the |delta| clamp.
  double output_scale = 1.0;

  // Cube around the points' bounding box, padded by 5% per side;
  // output_scale is the box diagonal.
  static SpaceNormalization fit(const Eigen::Matrix3Xf& points);
  std::array<double, 3> to_unit(const Eigen::Vector3d& p) const;
};

// Hash-grid encoding followed by an MLP with two ReLU hidden layers and a
// linear 3-output head. The head starts at zero so a fresh field predicts
// no motion.
template <typename Scalar>
class MotionField {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Points = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;

  struct Parameters {
    // levels * table_size * features, zero-initialized.
    std::vector<Scalar> tables;
    Matrix w1, w2, w3;
    Vector b1, b2, b3;
  };

  // Table gradients are accumulated densely but only rows in `touched` are
  // non-zero, which lets the optimizer and clear() stay sparse.
  struct Gradients {
    std::vector<Scalar> tables;
    std::vector<std::uint32_t> touched;
    std::vector<std::uint8_t> touched_flag;
    Matrix w1, w2, w3;
    Vector b1, b2, b3;

    void clear();
  };

  // Intermediate values of one forward pass needed by backward().
  struct Cache {
    std::vector<CornerSet> corners;  // points x levels
    Matrix h, a1, a2;
  };

  MotionField(const HashGridConfig& grid, const SpaceNormalization& space, std::uint64_t seed = 0,
              int hidden = 64);

  const HashGridConfig& grid() const { return grid_; }
  const SpaceNormalization& space() const { return space_; }
  int hidden() const { return hidden_; }
  Parameters& params() { return params_; }
  const Parameters& params() const { return params_; }

  // Unclamped delta for each column of x (world units).
  Points forward(const Points& x, Cache* cache = nullptr) const;
  // Accumulates d loss / d params given d loss / d delta.
  void backward(const Cache& cache, const Points& d_delta, Gradients& grad) const;
  // Table gradients are skipped (left empty) when with_tables is false.
  Gradients make_gradients(bool with_tables = true) const;

  // The two halves of forward(): hash lookup into cache.corners / cache.h,
  // then the MLP head on cache.h.
  void encode(const Points& x, Cache& cache) const;
  Points head(Cache& cache) const;
  // MLP part of backward(); returns d loss / d h.
  Matrix head_backward(const Cache& cache, const Points& d_delta, Gradients& grad) const;

  // Delta with its norm clamped to output_scale.
  Points predict_delta(const Points& x) const;

 private:
  HashGridConfig grid_;
  SpaceNormalization space_;
  int hidden_;
  Parameters params_;
};

extern template class MotionField<float>;
extern template class MotionField<double>;

// Binary checkpoint: magic "GVMF", u32 version, grid config, normalization,
// hidden width, MLP weights, then the non-zero table rows as
// (u32 row, F floats) pairs. All little-endian.
void write_checkpoint(const MotionField<float>& field, const std::filesystem::path& path);
MotionField<float> read_checkpoint(const std::filesystem::path& path);

Eigen::Matrix3Xf frame_positions(const GaussianFrame& frame);
// Adds delta column k to splat k's position.
GaussianFrame apply_delta(const GaussianFrame& frame, const Eigen::Matrix3Xf& delta);

}  // namespace gvv
