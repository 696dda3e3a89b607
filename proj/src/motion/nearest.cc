#include "gvv/motion/nearest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gvv/error.h"

namespace gvv {

PointGrid::PointGrid(const Eigen::Matrix3Xf& points) : points_(points) {
  const Eigen::Index n = points.cols();
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "PointGrid needs at least one point");
  if (!points.allFinite()) throw Error(ErrorKind::kInvalidArgument, "PointGrid: non-finite point");
  const Eigen::Vector3d lo = points.rowwise().minCoeff().cast<double>();
  const Eigen::Vector3d hi = points.rowwise().maxCoeff().cast<double>();
  const double extent = std::max((hi - lo).maxCoeff(), 1e-9);
  // About two points per cell for a volume-filling cloud.
  const double per_axis = std::max(1.0, std::cbrt(double(n) / 2.0));
  cell_ = extent / per_axis;
  origin_ = lo;
  for (int a = 0; a < 3; ++a) {
    dims_[a] = std::clamp(static_cast<int>((hi[a] - lo[a]) / cell_) + 1, 1, 1024);
  }
  const std::size_t cells = std::size_t(dims_[0]) * dims_[1] * dims_[2];
  std::vector<std::uint32_t> cell_of(n);
  start_.assign(cells + 1, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    int c[3];
    for (int a = 0; a < 3; ++a) {
      c[a] = std::clamp(static_cast<int>((points(a, i) - origin_[a]) / cell_), 0, dims_[a] - 1);
    }
    cell_of[i] = static_cast<std::uint32_t>(cell_id(c[0], c[1], c[2]));
    ++start_[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) start_[c + 1] += start_[c];
  order_.resize(n);
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (Eigen::Index i = 0; i < n; ++i) order_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
}

PointGrid::Hit PointGrid::nearest(const Eigen::Vector3f& qf) const {
  const Eigen::Vector3d q = qf.cast<double>();
  int c[3];
  for (int a = 0; a < 3; ++a) {
    const double t = std::floor((q[a] - origin_[a]) / cell_);
    c[a] = static_cast<int>(std::clamp(t, 0.0, double(dims_[a] - 1)));
  }
  Hit best{0, std::numeric_limits<double>::infinity()};
  auto visit = [&](int x, int y, int z) {
    const std::size_t id = cell_id(x, y, z);
    for (std::uint32_t k = start_[id]; k < start_[id + 1]; ++k) {
      const std::uint32_t i = order_[k];
      const double d2 = (points_.col(i).cast<double>() - q).squaredNorm();
      if (d2 < best.distance2 || (d2 == best.distance2 && i < best.index)) best = {i, d2};
    }
  };
  for (int r = 0;; ++r) {
    int lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max(0, c[a] - r);
      hi[a] = std::min(dims_[a] - 1, c[a] + r);
    }
    for (int z = lo[2]; z <= hi[2]; ++z) {
      for (int y = lo[1]; y <= hi[1]; ++y) {
        for (int x = lo[0]; x <= hi[0]; ++x) {
          // Only the shell at Chebyshev distance r is new.
          if (std::max({std::abs(x - c[0]), std::abs(y - c[1]), std::abs(z - c[2])}) != r) continue;
          visit(x, y, z);
        }
      }
    }
    // Distance from q to the nearest cell outside the visited block.
    double bound = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
      if (c[a] - r > 0) bound = std::min(bound, std::abs(q[a] - (origin_[a] + (c[a] - r) * cell_)));
      if (c[a] + r < dims_[a] - 1) {
        bound = std::min(bound, std::abs(origin_[a] + (c[a] + r + 1) * cell_ - q[a]));
      }
    }
    if (std::isinf(bound)) break;
    if (best.distance2 < bound * bound) break;
  }
  return best;
}

double chamfer_distance(const Eigen::Matrix3Xf& a, const Eigen::Matrix3Xf& b) {
  const PointGrid ga(a), gb(b);
  double ab = 0.0, ba = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i) ab += gb.nearest(a.col(i)).distance2;
  for (Eigen::Index j = 0; j < b.cols(); ++j) ba += ga.nearest(b.col(j)).distance2;
  return ab / double(a.cols()) + ba / double(b.cols());
}

}  // namespace gvv
