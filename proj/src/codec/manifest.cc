#include "gvv/codec/manifest.h"

#include <cstdio>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "gvv/error.h"

namespace gvv {

using nlohmann::json;

namespace {

json attribute_to_json(const AttributeEntry& a) {
  return {{"name", a.name},           {"channels", a.channels}, {"bits", a.bits},
          {"quant_min", a.quant_min}, {"quant_max", a.quant_max}, {"codec", a.codec},
          {"qp", a.qp},               {"lossless", a.lossless}, {"segment", a.segment},
          {"url", a.url},             {"byte_length", a.byte_length}};
}

AttributeEntry attribute_from_json(const json& j) {
  AttributeEntry a;
  j.at("name").get_to(a.name);
  j.at("channels").get_to(a.channels);
  j.at("bits").get_to(a.bits);
  j.at("quant_min").get_to(a.quant_min);
  j.at("quant_max").get_to(a.quant_max);
  j.at("codec").get_to(a.codec);
  j.at("qp").get_to(a.qp);
  j.at("lossless").get_to(a.lossless);
  j.at("segment").get_to(a.segment);
  j.at("url").get_to(a.url);
  j.at("byte_length").get_to(a.byte_length);
  return a;
}

}  // namespace

const AttributeEntry* GroupEntry::find(const std::string& name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

std::size_t Manifest::group_of(int frame) const {
  if (frame < 0 || frame >= frame_count) {
    throw Error(ErrorKind::kOutOfRange, "frame " + std::to_string(frame) + " outside [0, " +
                                            std::to_string(frame_count) + ")");
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (frame < groups[g].start_frame + groups[g].length) return g;
  }
  throw Error(ErrorKind::kCorruptData, "manifest groups do not cover frame " + std::to_string(frame));
}

std::uint64_t Manifest::total_bytes() const {
  std::uint64_t n = 0;
  for (const auto& g : groups) {
    for (const auto& a : g.attributes) n += a.byte_length;
  }
  return n;
}

std::string segment_path(int group_index, const std::string& stream) {
  char dir[32];
  std::snprintf(dir, sizeof dir, "group_%04d", group_index);
  return std::string(dir) + "/" + stream + ".bin";
}

std::string segment_url(int group_index, const std::string& stream) {
  return "groups/" + std::to_string(group_index) + "/" + stream + ".bin";
}

void validate_manifest(const Manifest& m) {
  if (m.version != kManifestVersion) {
    throw Error(ErrorKind::kVersion, "manifest version " + std::to_string(m.version) +
                                         " is not supported (expected " +
                                         std::to_string(kManifestVersion) + ")");
  }
  if (m.groups.empty()) throw Error(ErrorKind::kInvalidArgument, "manifest has no groups");
  if (!(m.fps > 0)) throw Error(ErrorKind::kCorruptData, "manifest fps must be positive");
  int next = 0;
  for (std::size_t i = 0; i < m.groups.size(); ++i) {
    const auto& g = m.groups[i];
    if (g.index != static_cast<int>(i)) {
      throw Error(ErrorKind::kCorruptData, "group " + std::to_string(i) + " carries index " +
                                               std::to_string(g.index));
    }
    if (g.start_frame != next || g.length <= 0) {
      throw Error(ErrorKind::kCorruptData,
                  "groups must tile the frame range contiguously (group " + std::to_string(i) +
                      " starts at " + std::to_string(g.start_frame) + ", expected " +
                      std::to_string(next) + ")");
    }
    if (g.splat_count == 0 || g.side <= 0 || g.side % 8 != 0 ||
        static_cast<std::uint64_t>(g.side) * g.side < g.splat_count) {
      throw Error(ErrorKind::kCorruptData, "group " + std::to_string(i) + " has invalid side");
    }
    if (g.attributes.empty()) {
      throw Error(ErrorKind::kCorruptData, "group " + std::to_string(i) + " lists no segments");
    }
    next += g.length;
  }
  if (next != m.frame_count) {
    throw Error(ErrorKind::kCorruptData, "groups cover " + std::to_string(next) +
                                             " frames but frame_count is " +
                                             std::to_string(m.frame_count));
  }
}

std::string manifest_to_json(const Manifest& m) {
  json groups = json::array();
  for (const auto& g : m.groups) {
    json attrs = json::array();
    for (const auto& a : g.attributes) attrs.push_back(attribute_to_json(a));
    groups.push_back({{"index", g.index},
                      {"start_frame", g.start_frame},
                      {"length", g.length},
                      {"splat_count", g.splat_count},
                      {"side", g.side},
                      {"sh_degree", g.sh_degree},
                      {"attributes", std::move(attrs)}});
  }
  const json j = {{"format", kManifestFormat}, {"version", m.version},
                  {"frame_count", m.frame_count}, {"fps", m.fps},
                  {"sh_degree", m.sh_degree},   {"groups", std::move(groups)}};
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  Manifest m;
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string()) != kManifestFormat) {
      throw Error(ErrorKind::kCorruptData, "not a gvv manifest");
    }
    j.at("version").get_to(m.version);
    if (m.version != kManifestVersion) {
      throw Error(ErrorKind::kVersion, "manifest version " + std::to_string(m.version) +
                                           " is not supported (expected " +
                                           std::to_string(kManifestVersion) + ")");
    }
    j.at("frame_count").get_to(m.frame_count);
    j.at("fps").get_to(m.fps);
    j.at("sh_degree").get_to(m.sh_degree);
    for (const auto& gj : j.at("groups")) {
      GroupEntry g;
      gj.at("index").get_to(g.index);
      gj.at("start_frame").get_to(g.start_frame);
      gj.at("length").get_to(g.length);
      gj.at("splat_count").get_to(g.splat_count);
      gj.at("side").get_to(g.side);
      gj.at("sh_degree").get_to(g.sh_degree);
      for (const auto& aj : gj.at("attributes")) g.attributes.push_back(attribute_from_json(aj));
      m.groups.push_back(std::move(g));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kCorruptData, std::string("malformed manifest: ") + e.what());
  }
  validate_manifest(m);
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot open manifest " + path.string());
  return manifest_from_json({std::istreambuf_iterator<char>(in), {}});
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  validate_manifest(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << manifest_to_json(m);
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

}  // namespace gvv
