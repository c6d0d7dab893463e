#pragma once

#include <chrono>
#include <memory>
#include <string>

namespace stentsim {

inline constexpr int kDefaultPort = 8787;

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

/// In-memory session store behind the HTTP JSON API:
///
///   POST /api/phantom   {spec, dims?, spacing_mm?}          -> {volume_id, dims, seeds}
///   POST /api/simulate  {volume_id, seeds, stent, forces?, ...} -> {run_id}
///   GET  /api/run/{id}  -> {run_id, status, progress, error? | bundle?}
///
/// Runs execute on their own threads; a done run's body is rendered once and
/// served verbatim afterwards.
class Service {
 public:
  Service();
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Transport-independent request handling; the HTTP server forwards here.
  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body);

  /// Blocks until the run leaves queued/running or the timeout passes.
  bool wait_for_run(long long run_id, std::chrono::milliseconds timeout);

  /// Binds the listening socket; port 0 picks a free one. Returns the bound
  /// port, throws Error(kIo) when the port is unavailable.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace stentsim
