#include "gvv/codec/rd_sweep.h"

#include <iomanip>
#include <sstream>

#include "gvv/error.h"

namespace gvv {

std::string RdRow::label() const { return qp ? std::to_string(*qp) : "lossless"; }

std::vector<RdRow> rate_distortion_sweep(std::span<const GaussianFrame> frames,
                                         std::span<const std::optional<int>> qps,
                                         std::span<const Camera> cameras,
                                         const RdOptions& options) {
  if (frames.empty()) throw Error(ErrorKind::kInvalidArgument, "rd sweep needs frames");
  if (cameras.empty()) throw Error(ErrorKind::kInvalidArgument, "rd sweep needs a camera");
  if (qps.empty()) throw Error(ErrorKind::kInvalidArgument, "rd sweep needs at least one qp");

  FrameRenderer renderer = options.renderer;
  if (!renderer) {
    RenderOptions ro;
    ro.sh_degree = frames.front().sh_degree;
    renderer = [ro](const GaussianFrame& f, const Camera& c) { return render(f, c, ro); };
  }

  std::vector<std::vector<ImageBuffer>> reference(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (const auto& cam : cameras) reference[t].push_back(renderer(frames[t], cam));
  }

  std::vector<RdRow> rows;
  for (const auto& qp : qps) {
    CodecConfig cfg = options.codec;
    cfg.backend = qp ? Backend::kH264External : Backend::kLosslessInternal;
    cfg.base_qp = qp.value_or(0);
    const auto groups = encode_sequence(frames, options.group_size, cfg);

    RdRow row;
    row.qp = qp;
    MseAccumulator mse;
    std::uint64_t bytes = 0;
    for (const auto& enc : groups) {
      bytes += enc.total_bytes();
      const auto stack = decode_group(enc, make_group_entry(enc), cfg);
      for (std::size_t k = 0; k < stack.num_frames(); ++k) {
        const auto decoded = unpack_frame(stack, k);
        const std::size_t t = static_cast<std::size_t>(enc.header.start_frame) + k;
        for (std::size_t c = 0; c < cameras.size(); ++c) {
          mse.add(reference[t][c], renderer(decoded, cameras[c]));
        }
      }
    }
    row.bytes_per_frame = static_cast<double>(bytes) / static_cast<double>(frames.size());
    row.psnr_db = mse.psnr();
    rows.push_back(row);
  }
  return rows;
}

std::string rd_csv(std::span<const RdRow> rows) {
  std::ostringstream out;
  out << "qp,kb_per_frame,psnr_db\n" << std::fixed;
  for (const auto& r : rows) {
    out << r.label() << ',' << std::setprecision(3) << r.kb_per_frame() << ','
        << std::setprecision(4) << r.psnr_db << '\n';
  }
  return out.str();
}

}  // namespace gvv
