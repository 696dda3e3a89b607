#pragma once

#include <filesystem>
#include <vector>

#include "gvv/core/types.h"

namespace gvv {

// Binary little-endian PLY as written by 3DGS training code. Vertex
// properties must all be `float`; recognized names are
//   x y z  nx ny nz (ignored)  f_dc_0..2  f_rest_0..k-1  opacity
//   scale_0..2  rot_0..3
// in any order. Unknown float properties are skipped.
GaussianFrame read_ply(const std::filesystem::path& path, int frame_index = 0);
void write_ply(const std::filesystem::path& path, const GaussianFrame& frame);

// Debug text format, one splat per line after a header:
//   gvv-splats 1 <count> <sh_degree>
//   x y z  qw qx qy qz  log_sx log_sy log_sz  opacity_logit  r g b  sh...
GaussianFrame read_text_splats(const std::filesystem::path& path, int frame_index = 0);
void write_text_splats(const std::filesystem::path& path, const GaussianFrame& frame);

// Dispatches on extension: .ply or .txt.
GaussianFrame read_splats(const std::filesystem::path& path, int frame_index = 0);
void write_splats(const std::filesystem::path& path, const GaussianFrame& frame);

// Per-frame splat files in a directory (.ply / .txt), sorted by file name.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

}  // namespace gvv
