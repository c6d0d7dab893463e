#include "stentsim/service.hpp"

#include <condition_variable>
#include <map>
#include <mutex>
#include <regex>
#include <thread>
#include <vector>

#include <httplib.h>

#include "stentsim/bundle.hpp"
#include "stentsim/config.hpp"
#include "stentsim/error.hpp"
#include "stentsim/pipeline.hpp"
#include "stentsim/volume.hpp"

namespace stentsim {

namespace {

enum class RunStatus { kQueued, kRunning, kDone, kFailed };

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kQueued: return "queued";
    case RunStatus::kRunning: return "running";
    case RunStatus::kDone: return "done";
    case RunStatus::kFailed: return "failed";
  }
  return "failed";
}

struct Run {
  RunStatus status = RunStatus::kQueued;
  int iterations = 0;
  int max_iters = 0;
  std::string error;
  std::string stage;
  std::string done_body;
};

HttpResponse json_response(int status, const Json& j) { return {status, dump_canonical(j, -1)}; }

HttpResponse error_response(int status, const std::string& message) {
  return json_response(status, Json{{"error", message}});
}

}  // namespace

struct Service::Impl {
  std::mutex mu;
  std::condition_variable changed;
  std::map<long long, std::shared_ptr<const VoxelVolume>> volumes;
  std::map<long long, Run> runs;
  long long next_volume = 1;
  long long next_run = 1;
  std::vector<std::thread> workers;
  httplib::Server server;

  HttpResponse post_phantom(const std::string& body);
  HttpResponse post_simulate(const std::string& body);
  HttpResponse get_run(long long id);
  void execute(long long id, std::shared_ptr<const VoxelVolume> volume, RunConfig config);
};

HttpResponse Service::Impl::post_phantom(const std::string& body) {
  PhantomRequest req;
  Json seeds = Json::array();
  std::shared_ptr<const VoxelVolume> volume;
  try {
    req = phantom_request_from_json(Json::parse(body));
    const Dims dims = req.dims.value_or(auto_dims(req.spec, req.spacing_mm));
    volume = std::make_shared<const VoxelVolume>(generate_phantom(req.spec, dims, req.spacing_mm));
    for (const auto& s : place_phantom(req.spec, dims, req.spacing_mm).canonical_seeds()) {
      seeds.push_back(to_json(s));
    }
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, e.what());
  } catch (const Error& e) {
    return error_response(400, e.what());
  }
  std::lock_guard lock(mu);
  const long long id = next_volume++;
  volumes.emplace(id, volume);
  return json_response(200, Json{{"volume_id", id}, {"dims", volume->dims()}, {"seeds", seeds}});
}

HttpResponse Service::Impl::post_simulate(const std::string& body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, e.what());
  }
  if (!j.is_object() || !j.contains("volume_id") || !j["volume_id"].is_number_integer()) {
    return error_response(400, "field 'volume_id' must be an integer");
  }
  const long long volume_id = j["volume_id"].get<long long>();
  std::shared_ptr<const VoxelVolume> volume;
  {
    std::lock_guard lock(mu);
    const auto it = volumes.find(volume_id);
    if (it == volumes.end()) return error_response(404, "unknown volume " + std::to_string(volume_id));
    volume = it->second;
  }
  j.erase("volume_id");
  RunConfig config;
  try {
    config = run_config_from_json(j);
  } catch (const Error& e) {
    return error_response(400, e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, e.what());
  }

  std::lock_guard lock(mu);
  const long long id = next_run++;
  runs[id].max_iters = config.forces.max_iters;
  workers.emplace_back([this, id, volume, config] { execute(id, volume, config); });
  return json_response(200, Json{{"run_id", id}});
}

void Service::Impl::execute(long long id, std::shared_ptr<const VoxelVolume> volume, RunConfig config) {
  {
    std::lock_guard lock(mu);
    runs[id].status = RunStatus::kRunning;
  }
  changed.notify_all();
  std::string body;
  std::string error;
  std::string failed_stage;
  int iterations = 0;
  try {
    const ResultBundle b = run_simulation(*volume, config, [&](int it, double) {
      std::lock_guard lock(mu);
      runs[id].iterations = it;
    });
    iterations = b.trace.iterations_run;
    body = dump_canonical(Json{{"run_id", id},
                               {"status", "done"},
                               {"progress", {{"iterations", iterations}, {"max_iters", config.forces.max_iters}}},
                               {"bundle", bundle_to_json(b)}},
                          -1);
  } catch (const PipelineError& e) {
    error = e.what();
    failed_stage = e.stage();
  } catch (const std::exception& e) {
    error = e.what();
  }
  {
    std::lock_guard lock(mu);
    Run& r = runs[id];
    if (error.empty()) {
      r.status = RunStatus::kDone;
      r.iterations = iterations;
      r.done_body = std::move(body);
    } else {
      r.status = RunStatus::kFailed;
      r.error = error;
      r.stage = failed_stage;
    }
  }
  changed.notify_all();
}

HttpResponse Service::Impl::get_run(long long id) {
  std::lock_guard lock(mu);
  const auto it = runs.find(id);
  if (it == runs.end()) return error_response(404, "unknown run " + std::to_string(id));
  const Run& r = it->second;
  if (r.status == RunStatus::kDone) return {200, r.done_body};
  Json j{{"run_id", id},
         {"status", to_string(r.status)},
         {"progress", {{"iterations", r.iterations}, {"max_iters", r.max_iters}}}};
  if (r.status == RunStatus::kFailed) {
    j["error"] = r.error;
    if (!r.stage.empty()) j["stage"] = r.stage;
  }
  return json_response(200, j);
}

Service::Service() : impl_(std::make_unique<Impl>()) {
  auto& svr = impl_->server;
  // httplib also sets SO_REUSEPORT, which would let a second server share the port.
  svr.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
  });
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  const auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  svr.Post("/api/phantom", forward);
  svr.Post("/api/simulate", forward);
  svr.Get(R"(/api/run/([^/]+))", forward);
  svr.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

Service::~Service() {
  stop();
  for (auto& t : impl_->workers) {
    if (t.joinable()) t.join();
  }
}

HttpResponse Service::handle(const std::string& method, const std::string& path,
                             const std::string& body) {
  static const std::regex run_path(R"(/api/run/(\d+))");
  std::smatch m;
  if (path == "/api/phantom") {
    if (method != "POST") return error_response(405, "use POST");
    return impl_->post_phantom(body);
  }
  if (path == "/api/simulate") {
    if (method != "POST") return error_response(405, "use POST");
    return impl_->post_simulate(body);
  }
  if (std::regex_match(path, m, run_path)) {
    if (method != "GET") return error_response(405, "use GET");
    try {
      return impl_->get_run(std::stoll(m[1].str()));
    } catch (const std::out_of_range&) {
      return error_response(404, "unknown run");
    }
  }
  if (path.starts_with("/api/run/")) return error_response(404, "unknown run");
  return error_response(404, "no route for " + method + " " + path);
}

bool Service::wait_for_run(long long run_id, std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->mu);
  return impl_->changed.wait_for(lock, timeout, [&] {
    const auto it = impl_->runs.find(run_id);
    return it != impl_->runs.end() &&
           (it->second.status == RunStatus::kDone || it->second.status == RunStatus::kFailed);
  });
}

int Service::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorCode::kIo, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port) + " (in use?)");
  }
  return port;
}

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace stentsim
