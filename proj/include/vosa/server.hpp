#pragma once

#include <cstddef>
#include <memory>
#include <string>

namespace vosa {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  std::string scenario_dir;
  std::string static_dir;  // empty: plain HTTP requests get 404
  std::string log_dir;     // empty: session logs are not written
  int hold_ticks = 3;
  std::size_t max_queued_frames = 64;  // per connection; oldest dropped first
};

/// Websocket session server plus static file serving on one port. Each
/// connection owns one session, ticked on its own strand at the scenario's
/// dt; reads and ticks never wait on a slow client.
class Server {
public:
  explicit Server(ServerOptions opt);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;
  /// Serves until stop(); blocks the caller.
  void run();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vosa
