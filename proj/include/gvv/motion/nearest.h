#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace gvv {

// Uniform-grid nearest neighbour index over a fixed point set.
class PointGrid {
 public:
  explicit PointGrid(const Eigen::Matrix3Xf& points);

  struct Hit {
    std::uint32_t index = 0;
    double distance2 = 0.0;
  };
  // Exact nearest point (ties go to the lowest index).
  Hit nearest(const Eigen::Vector3f& q) const;

 private:
  std::size_t cell_id(int x, int y, int z) const {
    return (std::size_t(z) * dims_[1] + y) * dims_[0] + x;
  }

  const Eigen::Matrix3Xf& points_;
  Eigen::Vector3d origin_;
  double cell_ = 1.0;
  int dims_[3] = {1, 1, 1};
  // CSR layout: points of cell c are order_[start_[c] .. start_[c + 1]).
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> order_;
};

// Symmetric chamfer distance: mean squared distance from each point of a to
// its nearest point in b, plus the same from b to a.
double chamfer_distance(const Eigen::Matrix3Xf& a, const Eigen::Matrix3Xf& b);

}  // namespace gvv
