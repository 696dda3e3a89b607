#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gvv::detail {

// mkdtemp-backed scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct ProcessResult {
  int exit_code = -1;
  // Combined stdout/stderr of the child.
  std::string output;
};

// Spawns argv[0] directly (no shell) with stdin from /dev/null.
ProcessResult run_process(const std::vector<std::string>& argv);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& p);
void write_file_bytes(const std::filesystem::path& p, const std::uint8_t* data, std::size_t n);

}  // namespace gvv::detail
