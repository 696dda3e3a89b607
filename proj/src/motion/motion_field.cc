#include "gvv/motion/motion_field.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "gvv/error.h"

namespace gvv {

SpaceNormalization SpaceNormalization::fit(const Eigen::Matrix3Xf& points) {
  if (points.cols() == 0) throw Error(ErrorKind::kInvalidArgument, "no points to normalize");
  if (!points.allFinite()) throw Error(ErrorKind::kInvalidArgument, "non-finite positions");
  const Eigen::Vector3d lo = points.rowwise().minCoeff().cast<double>();
  const Eigen::Vector3d hi = points.rowwise().maxCoeff().cast<double>();
  const Eigen::Vector3d center = 0.5 * (lo + hi);
  const double extent = std::max((hi - lo).maxCoeff(), 1e-6);
  SpaceNormalization s;
  s.size = extent * 1.1;
  s.origin = center - Eigen::Vector3d::Constant(0.5 * s.size);
  const double diag = (hi - lo).norm();
  s.output_scale = diag > 0 ? diag : 1.0;
  return s;
}

std::array<double, 3> SpaceNormalization::to_unit(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d u = (p - origin) / size;
  return {u.x(), u.y(), u.z()};
}

template <typename Scalar>
void MotionField<Scalar>::Gradients::clear() {
  const std::size_t F = touched_flag.empty() ? 0 : tables.size() / touched_flag.size();
  for (std::uint32_t row : touched) {
    std::fill_n(tables.begin() + std::size_t(row) * F, F, Scalar(0));
    touched_flag[row] = 0;
  }
  touched.clear();
  w1.setZero();
  w2.setZero();
  w3.setZero();
  b1.setZero();
  b2.setZero();
  b3.setZero();
}

namespace {
constexpr double kHiddenBiasInit = 0.01;
}  // namespace

template <typename Scalar>
MotionField<Scalar>::MotionField(const HashGridConfig& grid, const SpaceNormalization& space,
                                 std::uint64_t seed, int hidden)
    : grid_(grid), space_(space), hidden_(hidden) {
  grid_.validate();
  if (hidden < 1) throw Error(ErrorKind::kInvalidArgument, "hidden width must be >= 1");
  if (!(space.size > 0) || !(space.output_scale > 0)) {
    throw Error(ErrorKind::kInvalidArgument, "normalization must have positive extent");
  }
  const int in = grid_.feature_dims();
  params_.tables.assign(std::size_t(grid_.levels) * grid_.table_size() * grid_.features, Scalar(0));
  std::mt19937_64 rng(seed);
  auto he_uniform = [&](int rows, int cols) {
    std::uniform_real_distribution<double> d(-std::sqrt(6.0 / cols), std::sqrt(6.0 / cols));
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<Scalar>(d(rng));
    }
    return m;
  };
  params_.w1 = he_uniform(hidden, in);
  params_.w2 = he_uniform(hidden, hidden);
  params_.w3 = Matrix::Zero(3, hidden);
  // The tables start at zero, so with zero biases every hidden unit would sit
  // exactly at the ReLU kink and only b3 could learn.
  params_.b1 = Vector::Constant(hidden, Scalar(kHiddenBiasInit));
  params_.b2 = Vector::Constant(hidden, Scalar(kHiddenBiasInit));
  params_.b3 = Vector::Zero(3);
}

template <typename Scalar>
typename MotionField<Scalar>::Gradients MotionField<Scalar>::make_gradients(bool with_tables) const {
  Gradients g;
  if (with_tables) {
    g.tables.assign(params_.tables.size(), Scalar(0));
    g.touched_flag.assign(std::size_t(grid_.levels) * grid_.table_size(), 0);
  }
  g.w1 = Matrix::Zero(params_.w1.rows(), params_.w1.cols());
  g.w2 = Matrix::Zero(params_.w2.rows(), params_.w2.cols());
  g.w3 = Matrix::Zero(params_.w3.rows(), params_.w3.cols());
  g.b1 = Vector::Zero(params_.b1.size());
  g.b2 = Vector::Zero(params_.b2.size());
  g.b3 = Vector::Zero(params_.b3.size());
  return g;
}

template <typename Scalar>
void MotionField<Scalar>::encode(const Points& x, Cache& c) const {
  const Eigen::Index n = x.cols();
  const int L = grid_.levels, F = grid_.features;
  const std::uint32_t T = grid_.table_size();
  std::vector<double> res(L);
  for (int l = 0; l < L; ++l) res[l] = grid_.resolution(l);

  c.corners.resize(std::size_t(n) * L);
  c.h.resize(L * F, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto u = space_.to_unit(x.col(i).template cast<double>());
    for (int l = 0; l < L; ++l) {
      const CornerSet cs = corners_at_resolution(res[l], T, u);
      c.corners[std::size_t(i) * L + l] = cs;
      const Scalar* level = params_.tables.data() + std::size_t(l) * T * F;
      for (int f = 0; f < F; ++f) {
        Scalar acc = 0;
        for (int k = 0; k < 8; ++k) {
          acc += static_cast<Scalar>(cs.weight[k]) * level[std::size_t(cs.index[k]) * F + f];
        }
        c.h(l * F + f, i) = acc;
      }
    }
  }
}

template <typename Scalar>
typename MotionField<Scalar>::Points MotionField<Scalar>::head(Cache& c) const {
  c.a1 = ((params_.w1 * c.h).colwise() + params_.b1).cwiseMax(Scalar(0));
  c.a2 = ((params_.w2 * c.a1).colwise() + params_.b2).cwiseMax(Scalar(0));
  Points out = (params_.w3 * c.a2).colwise() + params_.b3;
  out *= static_cast<Scalar>(space_.output_scale);
  return out;
}

template <typename Scalar>
typename MotionField<Scalar>::Points MotionField<Scalar>::forward(const Points& x,
                                                                  Cache* cache) const {
  Cache local;
  Cache& c = cache ? *cache : local;
  encode(x, c);
  return head(c);
}

template <typename Scalar>
typename MotionField<Scalar>::Matrix MotionField<Scalar>::head_backward(const Cache& c,
                                                                        const Points& d_delta,
                                                                        Gradients& g) const {
  if (c.h.cols() != d_delta.cols()) {
    throw Error(ErrorKind::kMismatch, "backward: cache/gradient size mismatch");
  }
  const Matrix d_out = d_delta * static_cast<Scalar>(space_.output_scale);
  g.w3.noalias() += d_out * c.a2.transpose();
  g.b3 += d_out.rowwise().sum();
  const Matrix d_z2 = (params_.w3.transpose() * d_out)
                          .cwiseProduct((c.a2.array() > 0).template cast<Scalar>().matrix());
  g.w2.noalias() += d_z2 * c.a1.transpose();
  g.b2 += d_z2.rowwise().sum();
  const Matrix d_z1 = (params_.w2.transpose() * d_z2)
                          .cwiseProduct((c.a1.array() > 0).template cast<Scalar>().matrix());
  g.w1.noalias() += d_z1 * c.h.transpose();
  g.b1 += d_z1.rowwise().sum();
  return params_.w1.transpose() * d_z1;
}

template <typename Scalar>
void MotionField<Scalar>::backward(const Cache& c, const Points& d_delta, Gradients& g) const {
  if (g.touched_flag.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "backward needs table gradients");
  }
  const Matrix d_h = head_backward(c, d_delta, g);
  const int L = grid_.levels, F = grid_.features;
  const std::uint32_t T = grid_.table_size();
  for (Eigen::Index i = 0; i < d_delta.cols(); ++i) {
    for (int l = 0; l < L; ++l) {
      const CornerSet& cs = c.corners[std::size_t(i) * L + l];
      for (int k = 0; k < 8; ++k) {
        const std::uint32_t row = l * T + cs.index[k];
        if (!g.touched_flag[row]) {
          g.touched_flag[row] = 1;
          g.touched.push_back(row);
        }
        Scalar* dst = g.tables.data() + std::size_t(row) * F;
        const Scalar w = static_cast<Scalar>(cs.weight[k]);
        for (int f = 0; f < F; ++f) dst[f] += w * d_h(l * F + f, i);
      }
    }
  }
}

template <typename Scalar>
typename MotionField<Scalar>::Points MotionField<Scalar>::predict_delta(const Points& x) const {
  Points d = forward(x);
  const Scalar limit = static_cast<Scalar>(space_.output_scale);
  for (Eigen::Index i = 0; i < d.cols(); ++i) {
    const Scalar norm = d.col(i).norm();
    if (norm > limit) d.col(i) *= limit / norm;
  }
  return d;
}

template class MotionField<float>;
template class MotionField<double>;

namespace {

constexpr char kCheckpointMagic[4] = {'G', 'V', 'M', 'F'};
constexpr std::uint32_t kCheckpointVersion = 1;

// Host byte order is little-endian on every supported target.
static_assert(std::endian::native == std::endian::little);

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(ErrorKind::kCorruptData, "checkpoint truncated");
  return v;
}

void put_matrix(std::ofstream& out, const Eigen::MatrixXf& m) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()), sizeof(float) * m.size());
}

void get_matrix(std::ifstream& in, Eigen::MatrixXf& m) {
  const auto rows = get<std::uint32_t>(in), cols = get<std::uint32_t>(in);
  if (rows != m.rows() || cols != m.cols()) {
    throw Error(ErrorKind::kCorruptData, "checkpoint matrix shape does not match its header");
  }
  in.read(reinterpret_cast<char*>(m.data()), sizeof(float) * m.size());
  if (!in) throw Error(ErrorKind::kCorruptData, "checkpoint truncated");
}

}  // namespace

void write_checkpoint(const MotionField<float>& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  const auto& g = field.grid();
  const auto& s = field.space();
  const auto& p = field.params();
  out.write(kCheckpointMagic, 4);
  put(out, kCheckpointVersion);
  for (int v : {g.levels, g.features, g.log2_table_size, g.min_resolution, g.max_resolution,
                field.hidden()}) {
    put<std::int32_t>(out, v);
  }
  for (double v : {s.origin.x(), s.origin.y(), s.origin.z(), s.size, s.output_scale}) put(out, v);
  const Eigen::MatrixXf b1 = p.b1, b2 = p.b2, b3 = p.b3;
  for (const Eigen::MatrixXf* m : {&p.w1, &b1, &p.w2, &b2, &p.w3, &b3}) put_matrix(out, *m);

  const std::size_t F = g.features;
  const std::size_t rows = p.tables.size() / F;
  std::vector<std::uint32_t> nonzero;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t f = 0; f < F; ++f) {
      if (p.tables[r * F + f] != 0.f) {
        nonzero.push_back(static_cast<std::uint32_t>(r));
        break;
      }
    }
  }
  put<std::uint64_t>(out, nonzero.size());
  for (std::uint32_t r : nonzero) {
    put(out, r);
    out.write(reinterpret_cast<const char*>(p.tables.data() + r * F), sizeof(float) * F);
  }
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

MotionField<float> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot open checkpoint " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw Error(ErrorKind::kCorruptData, "not a motion field checkpoint");
  }
  if (get<std::uint32_t>(in) != kCheckpointVersion) {
    throw Error(ErrorKind::kVersion, "unsupported checkpoint version");
  }
  HashGridConfig g;
  g.levels = get<std::int32_t>(in);
  g.features = get<std::int32_t>(in);
  g.log2_table_size = get<std::int32_t>(in);
  g.min_resolution = get<std::int32_t>(in);
  g.max_resolution = get<std::int32_t>(in);
  const int hidden = get<std::int32_t>(in);
  SpaceNormalization s;
  s.origin.x() = get<double>(in);
  s.origin.y() = get<double>(in);
  s.origin.z() = get<double>(in);
  s.size = get<double>(in);
  s.output_scale = get<double>(in);

  MotionField<float> field(g, s, 0, hidden);
  auto& p = field.params();
  Eigen::MatrixXf b1 = p.b1, b2 = p.b2, b3 = p.b3;
  get_matrix(in, p.w1);
  get_matrix(in, b1);
  get_matrix(in, p.w2);
  get_matrix(in, b2);
  get_matrix(in, p.w3);
  get_matrix(in, b3);
  p.b1 = b1;
  p.b2 = b2;
  p.b3 = b3;

  const std::size_t F = g.features;
  const std::size_t rows = p.tables.size() / F;
  const auto count = get<std::uint64_t>(in);
  if (count > rows) throw Error(ErrorKind::kCorruptData, "checkpoint lists too many table rows");
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto r = get<std::uint32_t>(in);
    if (r >= rows) throw Error(ErrorKind::kCorruptData, "checkpoint table row out of range");
    in.read(reinterpret_cast<char*>(p.tables.data() + std::size_t(r) * F), sizeof(float) * F);
    if (!in) throw Error(ErrorKind::kCorruptData, "checkpoint truncated");
  }
  return field;
}

Eigen::Matrix3Xf frame_positions(const GaussianFrame& frame) {
  Eigen::Matrix3Xf x(3, frame.splats.size());
  for (std::size_t i = 0; i < frame.splats.size(); ++i) {
    for (int a = 0; a < 3; ++a) x(a, i) = frame.splats[i].position[a];
  }
  return x;
}

GaussianFrame apply_delta(const GaussianFrame& frame, const Eigen::Matrix3Xf& delta) {
  if (delta.cols() != static_cast<Eigen::Index>(frame.splats.size())) {
    throw Error(ErrorKind::kMismatch, "delta count differs from splat count");
  }
  GaussianFrame out = frame;
  for (std::size_t i = 0; i < out.splats.size(); ++i) {
    for (int a = 0; a < 3; ++a) out.splats[i].position[a] += delta(a, i);
  }
  out.update_bbox();
  return out;
}

}  // namespace gvv
