#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gvv/codec/manifest.h"

namespace gvv {

struct ServeConfig {
  // Container directory holding manifest.json and the group_NNNN folders.
  std::filesystem::path root;
  std::string host = "127.0.0.1";
  // 0 binds an ephemeral port; SegmentServer::port() reports it.
  int port = 8080;
  int cache_seconds = 3600;
  // "*" allows any origin; otherwise the request's Origin is echoed back
  // only if it appears here. Empty disables CORS headers.
  std::vector<std::string> cors_origins = {"*"};
};

struct ContentEntry {
  std::filesystem::path file;
  std::uint64_t size = 0;
  // Quoted strong validator derived from the file contents.
  std::string etag;
  std::string content_type;
};

// URL path -> file table built once from the manifest. Lookups never touch
// the filesystem.
class ContentIndex {
 public:
  static ContentIndex build(const std::filesystem::path& root);

  const ContentEntry* find(const std::string& url_path) const;
  const Manifest& manifest() const { return manifest_; }
  std::size_t size() const { return entries_.size(); }

 private:
  Manifest manifest_;
  std::map<std::string, ContentEntry> entries_;
};

// 64-bit FNV-1a, used for ETags.
std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size);

// Static HTTP/1.1 server for one container:
//   GET /manifest.json
//   GET /groups/{i}/{stream}.bin   (byte ranges supported)
// Anything else is 404. HEAD and OPTIONS preflight are handled too.
class SegmentServer {
 public:
  // Builds the content index; throws if the manifest or a listed segment is
  // missing or has the wrong size.
  explicit SegmentServer(ServeConfig cfg);
  ~SegmentServer();
  SegmentServer(const SegmentServer&) = delete;
  SegmentServer& operator=(const SegmentServer&) = delete;

  // Binds and starts serving on a background thread; returns the bound
  // port. Throws kNetwork if the address cannot be bound.
  int start();
  // Binds and serves on the calling thread until stop() is called.
  void run();
  void stop();

  int port() const { return port_; }
  std::string base_url() const;
  const ContentIndex& index() const { return index_; }

 private:
  struct Impl;

  int bind();

  ServeConfig cfg_;
  ContentIndex index_;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace gvv
