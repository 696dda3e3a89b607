#include "gvv/player/source.h"

#include <httplib.h>

#include <fstream>
#include <iterator>

#include "gvv/error.h"

namespace gvv {

DirectorySource::DirectorySource(std::filesystem::path root) : root_(std::move(root)) {}

Manifest DirectorySource::fetch_manifest() { return read_manifest(root_ / kManifestFile); }

std::vector<std::uint8_t> DirectorySource::fetch_segment(const AttributeEntry& attr) {
  const auto path = root_ / attr.segment;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "missing segment " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() != attr.byte_length) {
    throw Error(ErrorKind::kCorruptData, attr.segment + " has " + std::to_string(bytes.size()) +
                                             " bytes, expected " +
                                             std::to_string(attr.byte_length));
  }
  return bytes;
}

std::unique_ptr<SegmentSource> DirectorySource::clone() const {
  return std::make_unique<DirectorySource>(root_);
}

struct HttpSource::Client {
  httplib::Client http;
  explicit Client(const std::string& scheme_host_port) : http(scheme_host_port) {}
};

HttpSource::HttpSource(const std::string& base_url, int timeout_seconds)
    : base_url_(base_url), timeout_seconds_(timeout_seconds) {
  const std::string scheme = "http://";
  if (base_url.rfind(scheme, 0) != 0) {
    throw Error(ErrorKind::kInvalidArgument, "only http:// URLs are supported: " + base_url);
  }
  const std::size_t slash = base_url.find('/', scheme.size());
  scheme_host_port_ = base_url.substr(0, slash);
  prefix_ = slash == std::string::npos ? "" : base_url.substr(slash);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (scheme_host_port_.size() == scheme.size()) {
    throw Error(ErrorKind::kInvalidArgument, "URL has no host: " + base_url);
  }
  client_ = std::make_unique<Client>(scheme_host_port_);
  client_->http.set_connection_timeout(timeout_seconds_, 0);
  client_->http.set_read_timeout(timeout_seconds_, 0);
  client_->http.set_keep_alive(true);
}

HttpSource::~HttpSource() = default;

std::string HttpSource::get(const std::string& path, std::uint64_t expected_size) {
  const std::string target = prefix_ + "/" + path;
  auto res = client_->http.Get(target);
  if (!res) {
    throw Error(ErrorKind::kNetwork, "GET " + scheme_host_port_ + target + " failed: " +
                                         httplib::to_string(res.error()));
  }
  if (res->status == 404) {
    throw Error(ErrorKind::kNotFound, "GET " + scheme_host_port_ + target + ": 404");
  }
  if (res->status != 200) {
    throw Error(ErrorKind::kNetwork,
                "GET " + scheme_host_port_ + target + ": HTTP " + std::to_string(res->status));
  }
  if (expected_size != 0 && res->body.size() != expected_size) {
    throw Error(ErrorKind::kCorruptData, "GET " + target + " returned " +
                                             std::to_string(res->body.size()) +
                                             " bytes, expected " + std::to_string(expected_size));
  }
  return std::move(res->body);
}

Manifest HttpSource::fetch_manifest() { return manifest_from_json(get(kManifestFile, 0)); }

std::vector<std::uint8_t> HttpSource::fetch_segment(const AttributeEntry& attr) {
  const std::string body = get(attr.url, attr.byte_length);
  return std::vector<std::uint8_t>(body.begin(), body.end());
}

std::unique_ptr<SegmentSource> HttpSource::clone() const {
  return std::make_unique<HttpSource>(base_url_, timeout_seconds_);
}

std::unique_ptr<SegmentSource> open_source(const std::string& location) {
  if (location.rfind("http://", 0) == 0) return std::make_unique<HttpSource>(location);
  if (location.rfind("https://", 0) == 0) {
    throw Error(ErrorKind::kInvalidArgument, "https is not supported: " + location);
  }
  return std::make_unique<DirectorySource>(location);
}

}  // namespace gvv
