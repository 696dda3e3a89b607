#include "gvv/render/render.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <png.h>

#include "gvv/error.h"

namespace gvv {

namespace {

constexpr int kTile = 16;

constexpr double kShC0 = 0.28209479177387814;
constexpr double kShC1 = 0.4886025119029199;
constexpr double kShC2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                            -1.0925484305920792, 0.5462742152960396};
constexpr double kShC3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                            0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                            -0.5900435899266435};

struct Screen {
  float mx, my;        // mean
  float ca, cb, cc;    // inverse covariance (conic)
  float x0, x1, y0, y1;  // 3-sigma box
  float opacity;
  float min_power;  // below this exponent alpha is certainly < kMinAlpha
  float r, g, b;
};

// Strict weak order used for the depth sort: depth, then splat content, so
// the order does not depend on where a splat sits in the input list.
bool content_less(const GaussianSplat& a, const GaussianSplat& b) {
  auto cmp = [](const auto& x, const auto& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  };
  if (a.position != b.position) return cmp(a.position, b.position);
  if (a.rotation != b.rotation) return cmp(a.rotation, b.rotation);
  if (a.log_scale != b.log_scale) return cmp(a.log_scale, b.log_scale);
  if (a.opacity_logit != b.opacity_logit) return a.opacity_logit < b.opacity_logit;
  if (a.color != b.color) return cmp(a.color, b.color);
  return cmp(a.sh, b.sh);
}

}  // namespace

Eigen::Matrix3d rotation_matrix(const std::array<float, 4>& q) {
  Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
  quat.normalize();
  return quat.toRotationMatrix();
}

Eigen::Matrix3d covariance_3d(const std::array<float, 4>& rotation, const Vec3f& scales) {
  const Eigen::Matrix3d r = rotation_matrix(rotation);
  const Eigen::Matrix3d m = r * Eigen::Vector3d(scales[0], scales[1], scales[2]).asDiagonal();
  return m * m.transpose();
}

std::optional<ProjectedSplat> project_splat(const GaussianSplat& splat, const Camera& camera) {
  const Eigen::Matrix3d w = camera.view.topLeftCorner<3, 3>();
  const Eigen::Vector3d p(splat.position[0], splat.position[1], splat.position[2]);
  const Eigen::Vector3d t = w * p + camera.view.topRightCorner<3, 1>();
  if (!(t.z() > camera.near_plane) || t.z() > camera.far_plane) return std::nullopt;

  const double z = t.z();
  Eigen::Matrix<double, 2, 3> j;
  j << camera.fx / z, 0.0, -camera.fx * t.x() / (z * z),
       0.0, camera.fy / z, -camera.fy * t.y() / (z * z);
  const Eigen::Matrix3d sigma = covariance_3d(splat.rotation, splat.scale());
  const Eigen::Matrix<double, 2, 3> jw = j * w;

  ProjectedSplat out;
  out.cov = jw * sigma * jw.transpose();
  out.cov(0, 0) += kCovarianceFloor;
  out.cov(1, 1) += kCovarianceFloor;
  out.mean = {camera.fx * t.x() / z + camera.cx, camera.fy * t.y() / z + camera.cy};
  out.depth = z;
  return out;
}

Vec3f splat_rgb(const GaussianSplat& s, int degree, const Eigen::Vector3d& camera_center) {
  const int max_degree = [&] {
    for (int d = 3; d > 0; --d)
      if (s.sh.size() >= std::size_t(3 * sh_coeffs_per_channel(d))) return d;
    return 0;
  }();
  degree = std::clamp(degree, 0, max_degree);
  const int k = static_cast<int>(s.sh.size() / 3);

  Eigen::Vector3d dir = Eigen::Vector3d(s.position[0], s.position[1], s.position[2]) -
                        camera_center;
  if (dir.norm() > 0) dir.normalize();
  const double x = dir.x(), y = dir.y(), z = dir.z();

  Vec3f rgb{};
  for (int ch = 0; ch < 3; ++ch) {
    const float* sh = s.sh.data() + ch * k;
    double v = kShC0 * s.color[ch];
    if (degree > 0) {
      v += -kShC1 * y * sh[0] + kShC1 * z * sh[1] - kShC1 * x * sh[2];
    }
    if (degree > 1) {
      const double xx = x * x, yy = y * y, zz = z * z;
      v += kShC2[0] * x * y * sh[3] + kShC2[1] * y * z * sh[4] +
           kShC2[2] * (2.0 * zz - xx - yy) * sh[5] + kShC2[3] * x * z * sh[6] +
           kShC2[4] * (xx - yy) * sh[7];
      if (degree > 2) {
        v += kShC3[0] * y * (3.0 * xx - yy) * sh[8] + kShC3[1] * x * y * z * sh[9] +
             kShC3[2] * y * (4.0 * zz - xx - yy) * sh[10] +
             kShC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy) * sh[11] +
             kShC3[4] * x * (4.0 * zz - xx - yy) * sh[12] +
             kShC3[5] * z * (xx - yy) * sh[13] + kShC3[6] * x * (xx - 3.0 * yy) * sh[14];
      }
    }
    rgb[ch] = static_cast<float>(std::max(0.0, v + 0.5));
  }
  return rgb;
}

ImageBuffer render(const GaussianFrame& frame, const Camera& camera,
                   const RenderOptions& options, RenderStats* stats) {
  camera.validate();
  if (frame.splats.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot render an empty frame");
  }
  RenderStats local;
  const Eigen::Vector3d eye = camera.center();
  const int degree = std::min(options.sh_degree, frame.sh_degree);

  struct Item {
    double depth;
    std::uint32_t index;
  };
  std::vector<Item> order;
  std::vector<Screen> screen(frame.splats.size());
  order.reserve(frame.splats.size());

  for (std::uint32_t i = 0; i < frame.splats.size(); ++i) {
    const auto& s = frame.splats[i];
    auto proj = project_splat(s, camera);
    if (!proj) {
      ++local.culled;
      continue;
    }
    const Eigen::Matrix2d& cov = proj->cov;
    const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
    if (!(det > 0.0) || !std::isfinite(det)) {
      ++local.singular;
      continue;
    }
    const double hw = kExtentSigmas * std::sqrt(cov(0, 0));
    const double hh = kExtentSigmas * std::sqrt(cov(1, 1));
    Screen& sc = screen[i];
    sc.mx = static_cast<float>(proj->mean.x());
    sc.my = static_cast<float>(proj->mean.y());
    sc.ca = static_cast<float>(cov(1, 1) / det);
    sc.cb = static_cast<float>(-cov(0, 1) / det);
    sc.cc = static_cast<float>(cov(0, 0) / det);
    sc.x0 = static_cast<float>(proj->mean.x() - hw);
    sc.x1 = static_cast<float>(proj->mean.x() + hw);
    sc.y0 = static_cast<float>(proj->mean.y() - hh);
    sc.y1 = static_cast<float>(proj->mean.y() + hh);
    if (sc.x1 < 0.f || sc.y1 < 0.f || sc.x0 > camera.width - 1 || sc.y0 > camera.height - 1) {
      ++local.culled;
      continue;
    }
    sc.opacity = s.opacity();
    sc.min_power = static_cast<float>(std::log(kMinAlpha / std::max(sc.opacity, 1e-30f))) - 1e-3f;
    const Vec3f rgb = splat_rgb(s, degree, eye);
    sc.r = rgb[0];
    sc.g = rgb[1];
    sc.b = rgb[2];
    order.push_back({proj->depth, i});
  }
  std::sort(order.begin(), order.end(), [&](const Item& a, const Item& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    const auto& sa = frame.splats[a.index];
    const auto& sb = frame.splats[b.index];
    if (content_less(sa, sb)) return true;
    if (content_less(sb, sa)) return false;
    return a.index < b.index;
  });
  local.drawn = order.size();

  const int tiles_x = (camera.width + kTile - 1) / kTile;
  const int tiles_y = (camera.height + kTile - 1) / kTile;
  std::vector<std::vector<std::uint32_t>> bins(std::size_t(tiles_x) * tiles_y);
  for (const Item& it : order) {
    const Screen& sc = screen[it.index];
    const int tx0 = std::max(0, static_cast<int>(std::ceil(sc.x0)) / kTile);
    const int tx1 = std::min(tiles_x - 1, static_cast<int>(std::floor(sc.x1)) / kTile);
    const int ty0 = std::max(0, static_cast<int>(std::ceil(sc.y0)) / kTile);
    const int ty1 = std::min(tiles_y - 1, static_cast<int>(std::floor(sc.y1)) / kTile);
    for (int ty = ty0; ty <= ty1; ++ty)
      for (int tx = tx0; tx <= tx1; ++tx) bins[std::size_t(ty) * tiles_x + tx].push_back(it.index);
  }

  ImageBuffer image(camera.width, camera.height);
  auto shade_tile = [&](int tile) {
    const int tx = tile % tiles_x, ty = tile / tiles_x;
    std::vector<Screen> list;
    list.reserve(bins[tile].size());
    for (std::uint32_t idx : bins[tile]) list.push_back(screen[idx]);
    const int xe = std::min(camera.width, (tx + 1) * kTile);
    const int ye = std::min(camera.height, (ty + 1) * kTile);
    std::vector<const Screen*> row;
    row.reserve(list.size());
    for (int py = ty * kTile; py < ye; ++py) {
      const float fy = static_cast<float>(py);
      row.clear();
      for (const Screen& sc : list) {
        if (fy >= sc.y0 && fy <= sc.y1) row.push_back(&sc);
      }
      for (int px = tx * kTile; px < xe; ++px) {
        const float fx = static_cast<float>(px);
        float t = 1.f, r = 0.f, g = 0.f, b = 0.f;
        for (const Screen* sp : row) {
          const Screen& sc = *sp;
          if (fx < sc.x0 || fx > sc.x1) continue;
          const float dx = fx - sc.mx, dy = fy - sc.my;
          const float power = -0.5f * (sc.ca * dx * dx + 2.f * sc.cb * dx * dy + sc.cc * dy * dy);
          if (power > 0.f || power < sc.min_power) continue;
          const float alpha = sc.opacity * std::exp(power);
          if (alpha < kMinAlpha) continue;
          const float w = alpha * t;
          r += sc.r * w;
          g += sc.g * w;
          b += sc.b * w;
          t *= 1.f - alpha;
          if (t < kMinTransmittance) break;
        }
        float* out = image.pixel(px, py);
        out[0] = std::clamp(r, 0.f, 1.f);
        out[1] = std::clamp(g, 0.f, 1.f);
        out[2] = std::clamp(b, 0.f, 1.f);
        image.alpha[std::size_t(py) * camera.width + px] = 1.f - t;
      }
    }
  };

  const int num_tiles = tiles_x * tiles_y;
  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    for (int tile = 0; tile < num_tiles; ++tile) shade_tile(tile);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) {
      pool.emplace_back([&] {
        for (int tile = next++; tile < num_tiles; tile = next++) shade_tile(tile);
      });
    }
  }
  if (stats) *stats = local;
  return image;
}

void MseAccumulator::add(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorKind::kMismatch, "psnr: image dimensions differ");
  }
  for (std::size_t k = 0; k < a.rgb.size(); ++k) {
    const double d = double(a.rgb[k]) - b.rgb[k];
    sse += d * d;
  }
  samples += a.rgb.size();
}

double MseAccumulator::psnr() const {
  if (samples == 0) throw Error(ErrorKind::kInvalidArgument, "psnr of an empty image set");
  if (sse == 0.0) return kPsnrIdentical;
  return std::min(kPsnrIdentical, 10.0 * std::log10(1.0 / (sse / double(samples))));
}

double psnr_pooled(const std::vector<ImageBuffer>& a, const std::vector<ImageBuffer>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::kMismatch, "psnr needs matching, non-empty image lists");
  }
  MseAccumulator acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i], b[i]);
  return acc.psnr();
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  MseAccumulator acc;
  acc.add(a, b);
  return acc.psnr();
}

void write_png(const std::filesystem::path& path, const ImageBuffer& image) {
  std::vector<std::uint8_t> bytes(image.rgb.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>(std::lround(std::clamp(image.rgb[i], 0.f, 1.f) * 255.f));
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw Error(ErrorKind::kIo, "png write failed for " + path.string() + ": " + png.message);
  }
}

}  // namespace gvv
