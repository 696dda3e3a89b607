#include <chrono>
#include <memory>
#include <ostream>
#include <thread>

#include "commands.h"
#include "gvv/error.h"
#include "gvv/server/server.h"

namespace gvv::cli {

namespace {

struct ServeArgs {
  std::string root = ".";
  std::string addr = "127.0.0.1:8080";
  std::vector<std::string> cors{"*"};
  int cache_seconds = 3600;
};

// "host:port", ":port" or "port".
std::pair<std::string, int> split_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  std::string host = colon == std::string::npos ? "127.0.0.1" : addr.substr(0, colon);
  const std::string port = colon == std::string::npos ? addr : addr.substr(colon + 1);
  if (host.empty()) host = "0.0.0.0";
  std::size_t used = 0;
  int p = -1;
  try {
    p = std::stoi(port, &used);
  } catch (const std::exception&) {
  }
  if (used != port.size() || p < 0 || p > 65535) {
    throw CLI::ValidationError("--addr", "expected host:port with a port in [0, 65535], got " + addr);
  }
  return {host, p};
}

}  // namespace

Action add_serve(CLI::App& app, Context& ctx) {
  auto a = std::make_shared<ServeArgs>();
  auto* sub = app.add_subcommand("serve", "Serve a container's manifest and segments over HTTP");
  sub->add_option("--root", a->root, "Container directory")->capture_default_str();
  sub->add_option("--addr", a->addr, "Bind address host:port; port 0 picks a free port")
      ->capture_default_str()
      ->check([](const std::string& s) {
        try {
          split_addr(s);
        } catch (const CLI::ValidationError& e) {
          return std::string(e.what());
        }
        return std::string();
      });
  sub->add_option("--cors", a->cors,
                  "Allowed origins; '*' allows any, 'none' disables CORS headers")
      ->capture_default_str();
  sub->add_option("--cache-seconds", a->cache_seconds, "Cache-Control max-age")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  return [a, &ctx] {
    ServeConfig cfg;
    cfg.root = a->root;
    std::tie(cfg.host, cfg.port) = split_addr(a->addr);
    cfg.cache_seconds = a->cache_seconds;
    cfg.cors_origins = a->cors;
    if (cfg.cors_origins.size() == 1 && cfg.cors_origins[0] == "none") cfg.cors_origins.clear();

    SegmentServer server(cfg);
    server.start();
    const auto& m = server.index().manifest();
    ctx.out << "serving " << a->root << " (" << m.frame_count << " frames, " << m.groups.size()
            << " groups, " << server.index().size() << " files) at " << server.base_url()
            << std::endl;
    if (ctx.on_listening) ctx.on_listening(server.base_url());
    while (!ctx.stop_requested()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
    ctx.out << "stopped" << std::endl;
  };
}

}  // namespace gvv::cli
