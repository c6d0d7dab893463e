// stentsim: phantom generation, batch simulation and the HTTP service.
// Exit codes: 0 success, 1 pipeline failure, 2 usage or config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stentsim/bundle.hpp"
#include "stentsim/config.hpp"
#include "stentsim/error.hpp"
#include "stentsim/pipeline.hpp"
#include "stentsim/service.hpp"
#include "stentsim/volume.hpp"

namespace {

using namespace stentsim;

constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;

bool is_config_error(const Error& e) {
  return e.code() == ErrorCode::kSchema || e.code() == ErrorCode::kInvalidArgument;
}

int run_phantom(const std::string& spec_path, const std::string& out_path,
                std::optional<std::uint64_t> seed, const std::string& seeds_out) {
  PhantomRequest req;
  try {
    // Either a bare phantom spec or the full {spec, dims, spacing_mm} request.
    const Json doc = read_json_file(spec_path);
    req = doc.is_object() && doc.contains("kind") ? PhantomRequest{phantom_spec_from_json(doc)}
                                                  : phantom_request_from_json(doc);
    if (seed) req.spec.seed = *seed;
  } catch (const Error& e) {
    std::cerr << "stentsim phantom: " << e.what() << '\n';
    return is_config_error(e) ? kExitUsage : kExitPipeline;
  }
  try {
    const Dims dims = req.dims.value_or(auto_dims(req.spec, req.spacing_mm));
    save_volume(generate_phantom(req.spec, dims, req.spacing_mm), out_path);
    Json seeds = Json::array();
    for (const auto& s : place_phantom(req.spec, dims, req.spacing_mm).canonical_seeds()) {
      seeds.push_back(to_json(s));
    }
    const std::string text = dump_canonical(Json{{"dims", dims}, {"seeds", seeds}}) + "\n";
    std::cout << text;
    if (!seeds_out.empty()) {
      std::ofstream f(seeds_out, std::ios::binary);
      if (!(f << text)) throw Error(ErrorCode::kIo, "cannot write " + seeds_out);
    }
  } catch (const Error& e) {
    std::cerr << "stentsim phantom: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitPipeline;
  }
  return 0;
}

int run_simulate(const std::string& volume_path, const std::string& config_path,
                 const std::string& out_dir) {
  RunConfig config;
  try {
    config = run_config_from_json(read_json_file(config_path));
  } catch (const Error& e) {
    std::cerr << "stentsim simulate: config: " << e.what() << '\n';
    return is_config_error(e) ? kExitUsage : kExitPipeline;
  }
  try {
    const VoxelVolume v = load_volume(volume_path);
    const ResultBundle b = run_simulation(v, config);
    try {
      write_bundle(b, out_dir);
    } catch (const Error& e) {
      throw PipelineError("bundle", e);
    }
    std::cout << summary_line(b) << '\n';
  } catch (const PipelineError& e) {
    std::cerr << "stentsim simulate: stage " << e.stage() << " failed: " << to_string(e.code())
              << ": " << e.what() << '\n';
    return kExitPipeline;
  } catch (const Error& e) {
    std::cerr << "stentsim simulate: volume: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitPipeline;
  }
  return 0;
}

int run_serve(const std::string& host, int port) {
  Service service;
  int bound = 0;
  try {
    bound = service.bind(host, port);
  } catch (const Error& e) {
    std::cerr << "stentsim serve: " << e.what() << '\n';
    return kExitPipeline;
  }
  std::cout << "stentsim listening on http://" << host << ':' << bound << std::endl;
  service.listen();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Endovascular stent placement simulation"};
  app.require_subcommand(1);

  std::string spec_path, out_path, seeds_out;
  std::optional<std::uint64_t> seed;
  auto* phantom = app.add_subcommand("phantom", "Rasterize an analytic vessel phantom to SVOL");
  phantom->add_option("--spec", spec_path, "Phantom spec JSON")->required();
  phantom->add_option("--out", out_path, "Output .svol file")->required();
  phantom->add_option("--seed", seed, "Noise seed (overrides the spec)");
  phantom->add_option("--seeds-out", seeds_out, "Also write the canonical seed pairs here");

  std::string volume_path, config_path, out_dir;
  auto* simulate = app.add_subcommand("simulate", "Run the stent simulation and write a bundle");
  simulate->add_option("--volume", volume_path, "Input .svol volume")->required();
  simulate->add_option("--config", config_path, "run.json")->required();
  simulate->add_option("--out", out_dir, "Bundle output directory")->required();

  int port = kDefaultPort;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Serve the HTTP JSON API");
  serve->add_option("--port", port, "Port; 0 picks a free one")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (*phantom) return run_phantom(spec_path, out_path, seed, seeds_out);
  if (*simulate) return run_simulate(volume_path, config_path, out_dir);
  if (*serve) return run_serve(host, port);
  return kExitUsage;
}
