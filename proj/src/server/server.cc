#include "gvv/server/server.h"

#include <httplib.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <thread>

#include "gvv/error.h"

namespace gvv {

namespace {

constexpr const char* kManifestType = "application/json";
constexpr const char* kSegmentType = "application/octet-stream";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ContentEntry index_file(const std::filesystem::path& file, const char* type) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot read " + file.string());
  std::uint64_t hash = fnv1a64(nullptr, 0);
  std::uint64_t size = 0;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      hash ^= static_cast<std::uint8_t>(buf[i]);
      hash *= 0x100000001b3ull;
    }
    size += got;
  }
  ContentEntry e;
  e.file = file;
  e.size = size;
  e.etag = "\"" + hex64(hash) + "-" + std::to_string(size) + "\"";
  e.content_type = type;
  return e;
}

bool etag_matches(const std::string& header, const std::string& etag) {
  if (header == "*") return true;
  std::size_t pos = 0;
  while (pos < header.size()) {
    const std::size_t comma = header.find(',', pos);
    std::string tok = header.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.rfind("W/", 0) == 0) tok.erase(0, 2);
    if (tok == etag) return true;
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return false;
}

}  // namespace

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

ContentIndex ContentIndex::build(const std::filesystem::path& root) {
  ContentIndex idx;
  const auto manifest_file = root / kManifestFile;
  idx.manifest_ = read_manifest(manifest_file);
  idx.entries_["/" + std::string(kManifestFile)] = index_file(manifest_file, kManifestType);
  for (const auto& g : idx.manifest_.groups) {
    for (const auto& a : g.attributes) {
      ContentEntry e = index_file(root / a.segment, kSegmentType);
      if (e.size != a.byte_length) {
        throw Error(ErrorKind::kCorruptData, a.segment + " is " + std::to_string(e.size) +
                                                 " bytes, manifest says " +
                                                 std::to_string(a.byte_length));
      }
      idx.entries_["/" + a.url] = std::move(e);
    }
  }
  return idx;
}

const ContentEntry* ContentIndex::find(const std::string& url_path) const {
  const auto it = entries_.find(url_path);
  return it == entries_.end() ? nullptr : &it->second;
}

struct SegmentServer::Impl {
  httplib::Server http;
  std::thread worker;
};

SegmentServer::SegmentServer(ServeConfig cfg)
    : cfg_(std::move(cfg)), index_(ContentIndex::build(cfg_.root)), impl_(std::make_unique<Impl>()) {
  if (cfg_.port < 0 || cfg_.port > 65535) {
    throw Error(ErrorKind::kOutOfRange, "port must be in [0, 65535]");
  }
  if (cfg_.cache_seconds < 0) throw Error(ErrorKind::kOutOfRange, "cache seconds must be >= 0");

  auto& http = impl_->http;
  // httplib's defaults include SO_REUSEPORT, which would let a second server
  // silently share the port.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  const ServeConfig& c = cfg_;
  const ContentIndex& index = index_;

  auto cors = [&c](const httplib::Request& req, httplib::Response& res) {
    if (c.cors_origins.empty()) return;
    const bool any = std::find(c.cors_origins.begin(), c.cors_origins.end(), "*") !=
                     c.cors_origins.end();
    if (any) {
      res.set_header("Access-Control-Allow-Origin", "*");
    } else {
      const std::string origin = req.get_header_value("Origin");
      if (std::find(c.cors_origins.begin(), c.cors_origins.end(), origin) ==
          c.cors_origins.end()) {
        return;
      }
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
    res.set_header("Access-Control-Expose-Headers",
                   "Content-Length, Content-Range, Accept-Ranges, ETag");
  };

  http.Get(R"(/.*)", [&index, &c, cors](const httplib::Request& req, httplib::Response& res) {
    cors(req, res);
    const ContentEntry* e = index.find(req.path);
    if (!e) {
      res.status = 404;
      res.set_content("not found\n", "text/plain");
      return;
    }
    res.set_header("ETag", e->etag);
    res.set_header("Accept-Ranges", "bytes");
    res.set_header("Cache-Control", "public, max-age=" + std::to_string(c.cache_seconds));
    if (req.has_header("If-None-Match") &&
        etag_matches(req.get_header_value("If-None-Match"), e->etag)) {
      res.status = 304;
      return;
    }
    const std::filesystem::path file = e->file;
    res.set_content_provider(
        e->size, e->content_type,
        [file](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
          std::ifstream in(file, std::ios::binary);
          if (!in) return false;
          in.seekg(static_cast<std::streamoff>(offset));
          std::vector<char> buf(std::min<std::size_t>(length, 1 << 16));
          while (length > 0) {
            const std::size_t n = std::min(length, buf.size());
            in.read(buf.data(), static_cast<std::streamsize>(n));
            if (static_cast<std::size_t>(in.gcount()) != n) return false;
            if (!sink.write(buf.data(), n)) return false;
            length -= n;
          }
          return true;
        });
  });

  http.Options(R"(/.*)", [cors](const httplib::Request& req, httplib::Response& res) {
    cors(req, res);
    res.set_header("Access-Control-Allow-Methods", "GET, HEAD, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Range, If-None-Match");
    res.set_header("Access-Control-Max-Age", "86400");
    res.status = 204;
  });
}

SegmentServer::~SegmentServer() { stop(); }

int SegmentServer::bind() {
  auto& http = impl_->http;
  const int port = cfg_.port == 0 ? http.bind_to_any_port(cfg_.host)
                                  : (http.bind_to_port(cfg_.host, cfg_.port) ? cfg_.port : -1);
  if (port <= 0) {
    throw Error(ErrorKind::kNetwork, "cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port));
  }
  port_ = port;
  return port;
}

int SegmentServer::start() {
  if (impl_->worker.joinable()) throw Error(ErrorKind::kInvalidArgument, "server already running");
  const int port = bind();
  impl_->worker = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return port;
}

void SegmentServer::run() {
  bind();
  impl_->http.listen_after_bind();
}

void SegmentServer::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

std::string SegmentServer::base_url() const {
  return "http://" + cfg_.host + ":" + std::to_string(port_);
}

}  // namespace gvv
