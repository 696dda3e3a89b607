#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "gvv/codec/manifest.h"

namespace gvv {

// Where a player reads a container from. Implementations must be safe to
// call from one thread at a time per instance; the player gives each worker
// its own instance via clone().
class SegmentSource {
 public:
  virtual ~SegmentSource() = default;
  virtual Manifest fetch_manifest() = 0;
  virtual std::vector<std::uint8_t> fetch_segment(const AttributeEntry& attr) = 0;
  virtual std::unique_ptr<SegmentSource> clone() const = 0;
  virtual std::string describe() const = 0;
};

// Reads segment files straight from a container directory.
class DirectorySource final : public SegmentSource {
 public:
  explicit DirectorySource(std::filesystem::path root);
  Manifest fetch_manifest() override;
  std::vector<std::uint8_t> fetch_segment(const AttributeEntry& attr) override;
  std::unique_ptr<SegmentSource> clone() const override;
  std::string describe() const override { return root_.string(); }

 private:
  std::filesystem::path root_;
};

// Fetches manifest.json and segment URLs relative to a base URL such as
// http://127.0.0.1:8080 or http://host:port/assets/clip.
class HttpSource final : public SegmentSource {
 public:
  explicit HttpSource(const std::string& base_url, int timeout_seconds = 10);
  ~HttpSource() override;
  Manifest fetch_manifest() override;
  std::vector<std::uint8_t> fetch_segment(const AttributeEntry& attr) override;
  std::unique_ptr<SegmentSource> clone() const override;
  std::string describe() const override { return base_url_; }

 private:
  std::string get(const std::string& path, std::uint64_t expected_size);

  struct Client;
  std::string base_url_;
  std::string scheme_host_port_;
  std::string prefix_;
  int timeout_seconds_;
  std::unique_ptr<Client> client_;
};

// http:// URLs map to HttpSource, anything else to a directory.
std::unique_ptr<SegmentSource> open_source(const std::string& location);

}  // namespace gvv
