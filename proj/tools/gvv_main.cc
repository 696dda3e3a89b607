#include <atomic>
#include <csignal>
#include <iostream>

#include "cli.h"

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  gvv::cli::Context ctx{std::cout, std::cerr};
  ctx.stop_requested = [] { return g_interrupted.load(); };
  return gvv::cli::run({argv + 1, argv + argc}, ctx);
}
