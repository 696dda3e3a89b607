#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace gvv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct Context {
  std::ostream& out;
  std::ostream& err;
  // Polled by `serve` and paced `play`; returning true ends them cleanly.
  std::function<bool()> stop_requested = [] { return false; };
  // Called by `serve` once the socket is bound, with the base URL.
  std::function<void(const std::string&)> on_listening;
};

// Parses and runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, Context& ctx);

}  // namespace gvv::cli
