#include "gvv/core/splat_io.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "gvv/error.h"

namespace gvv {

static_assert(std::endian::native == std::endian::little,
              "splat file IO assumes a little-endian host");

namespace {

bool next_header_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("comment", 0) == 0 || line.rfind("obj_info", 0) == 0) continue;
    return true;
  }
  return false;
}

int sh_degree_for_rest_count(std::size_t count, const std::string& where) {
  for (int d = 0; d <= 3; ++d) {
    if (count == std::size_t(3 * sh_coeffs_per_channel(d))) return d;
  }
  throw Error(ErrorKind::kCorruptData,
              where + ": unsupported f_rest count " + std::to_string(count));
}

}  // namespace

GaussianFrame read_ply(const std::filesystem::path& path, int frame_index) {
  const std::string where = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "unable to open " + where);

  std::string line;
  if (!next_header_line(in, line) || line != "ply") {
    throw Error(ErrorKind::kCorruptData, where + ": not a .ply file");
  }
  if (!next_header_line(in, line) || line != "format binary_little_endian 1.0") {
    throw Error(ErrorKind::kCorruptData, where + ": unsupported .ply format");
  }
  if (!next_header_line(in, line) || line.rfind("element vertex ", 0) != 0) {
    throw Error(ErrorKind::kCorruptData, where + ": missing vertex count");
  }
  const long long count = std::stoll(line.substr(std::strlen("element vertex ")));
  if (count <= 0 || count > (1ll << 26)) {
    throw Error(ErrorKind::kCorruptData, where + ": invalid vertex count");
  }

  std::unordered_map<std::string, int> fields;
  int num_fields = 0;
  for (;;) {
    if (!next_header_line(in, line)) {
      throw Error(ErrorKind::kCorruptData, where + ": unexpected end of header");
    }
    if (line == "end_header") break;
    if (line.rfind("property float ", 0) != 0) {
      throw Error(ErrorKind::kCorruptData, where + ": unsupported property '" + line + "'");
    }
    fields[line.substr(std::strlen("property float "))] = num_fields++;
  }

  const auto index = [&](const std::string& name) {
    auto it = fields.find(name);
    if (it == fields.end()) {
      throw Error(ErrorKind::kCorruptData, where + ": missing field " + name);
    }
    return it->second;
  };
  const int pos[3] = {index("x"), index("y"), index("z")};
  const int dc[3] = {index("f_dc_0"), index("f_dc_1"), index("f_dc_2")};
  const int scl[3] = {index("scale_0"), index("scale_1"), index("scale_2")};
  const int rot[4] = {index("rot_0"), index("rot_1"), index("rot_2"), index("rot_3")};
  const int opa = index("opacity");
  std::vector<int> rest;
  for (int i = 0; i < 45; ++i) {
    auto it = fields.find("f_rest_" + std::to_string(i));
    if (it == fields.end()) break;
    rest.push_back(it->second);
  }
  const int sh_degree = sh_degree_for_rest_count(rest.size(), where);

  std::vector<float> values(std::size_t(count) * num_fields);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!in) throw Error(ErrorKind::kCorruptData, where + ": truncated vertex data");

  std::vector<GaussianSplat> splats(count);
  for (long long i = 0; i < count; ++i) {
    const float* v = &values[std::size_t(i) * num_fields];
    auto& s = splats[i];
    for (int a = 0; a < 3; ++a) {
      s.position[a] = v[pos[a]];
      s.color[a] = v[dc[a]];
      s.log_scale[a] = v[scl[a]];
    }
    for (int a = 0; a < 4; ++a) s.rotation[a] = v[rot[a]];
    s.opacity_logit = v[opa];
    s.sh.resize(rest.size());
    for (std::size_t r = 0; r < rest.size(); ++r) s.sh[r] = v[rest[r]];
    s.normalize_rotation();
  }
  return make_frame(std::move(splats), frame_index, sh_degree);
}

void write_ply(const std::filesystem::path& path, const GaussianFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "unable to write " + path.string());
  const std::size_t rest = 3 * sh_coeffs_per_channel(frame.sh_degree);
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << frame.splats.size() << "\n";
  for (const char* n : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"}) {
    out << "property float " << n << "\n";
  }
  for (std::size_t i = 0; i < rest; ++i) out << "property float f_rest_" << i << "\n";
  for (const char* n :
       {"opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
    out << "property float " << n << "\n";
  }
  out << "end_header\n";

  std::vector<float> row;
  for (const auto& s : frame.splats) {
    row.clear();
    row.insert(row.end(), s.position.begin(), s.position.end());
    row.insert(row.end(), {0.f, 0.f, 0.f});
    row.insert(row.end(), s.color.begin(), s.color.end());
    for (std::size_t i = 0; i < rest; ++i) row.push_back(i < s.sh.size() ? s.sh[i] : 0.f);
    row.push_back(s.opacity_logit);
    row.insert(row.end(), s.log_scale.begin(), s.log_scale.end());
    row.insert(row.end(), s.rotation.begin(), s.rotation.end());
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

GaussianFrame read_text_splats(const std::filesystem::path& path, int frame_index) {
  const std::string where = path.string();
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "unable to open " + where);
  std::string magic;
  int version = 0;
  long long count = 0;
  int sh_degree = 0;
  if (!(in >> magic >> version >> count >> sh_degree) || magic != "gvv-splats") {
    throw Error(ErrorKind::kCorruptData, where + ": bad debug splat header");
  }
  if (version != 1) throw Error(ErrorKind::kVersion, where + ": unsupported version");
  if (count <= 0 || sh_degree < 0 || sh_degree > 3) {
    throw Error(ErrorKind::kCorruptData, where + ": bad count or SH degree");
  }
  const std::size_t rest = 3 * sh_coeffs_per_channel(sh_degree);
  std::vector<GaussianSplat> splats(count);
  for (auto& s : splats) {
    for (float& v : s.position) in >> v;
    for (float& v : s.rotation) in >> v;
    for (float& v : s.log_scale) in >> v;
    in >> s.opacity_logit;
    for (float& v : s.color) in >> v;
    s.sh.resize(rest);
    for (float& v : s.sh) in >> v;
    if (!in) throw Error(ErrorKind::kCorruptData, where + ": truncated splat record");
    s.normalize_rotation();
  }
  return make_frame(std::move(splats), frame_index, sh_degree);
}

void write_text_splats(const std::filesystem::path& path, const GaussianFrame& frame) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "unable to write " + path.string());
  out.precision(9);
  out << "gvv-splats 1 " << frame.splats.size() << " " << frame.sh_degree << "\n";
  for (const auto& s : frame.splats) {
    const char* sep = "";
    auto put = [&](float v) {
      out << sep << v;
      sep = " ";
    };
    for (float v : s.position) put(v);
    for (float v : s.rotation) put(v);
    for (float v : s.log_scale) put(v);
    put(s.opacity_logit);
    for (float v : s.color) put(v);
    for (float v : s.sh) put(v);
    out << "\n";
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

GaussianFrame read_splats(const std::filesystem::path& path, int frame_index) {
  if (path.extension() == ".ply") return read_ply(path, frame_index);
  if (path.extension() == ".txt") return read_text_splats(path, frame_index);
  throw Error(ErrorKind::kInvalidArgument, "unknown splat file type: " + path.string());
}

void write_splats(const std::filesystem::path& path, const GaussianFrame& frame) {
  if (path.extension() == ".ply") return write_ply(path, frame);
  if (path.extension() == ".txt") return write_text_splats(path, frame);
  throw Error(ErrorKind::kInvalidArgument, "unknown splat file type: " + path.string());
}

std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorKind::kIo, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext == ".ply" || ext == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace gvv
