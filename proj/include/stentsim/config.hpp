#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stentsim/expansion.hpp"
#include "stentsim/graph.hpp"
#include "stentsim/json_format.hpp"
#include "stentsim/sealing.hpp"
#include "stentsim/stent_mesh.hpp"
#include "stentsim/volume.hpp"

namespace stentsim {

// JSON codecs for the user-facing inputs. Readers throw Error(kSchema) naming
// the offending field ("stent.diameter_mm") for missing or mistyped values
// and Error(kInvalidArgument) for values that parse but fail validation.

struct PhantomRequest {
  PhantomSpec spec;
  std::optional<Dims> dims;  // auto-sized when absent
  Vec3 spacing_mm{1.0, 1.0, 1.0};
};

struct RunConfig {
  std::vector<SeedPair> seeds;
  StentSpec stent;
  ForceParams forces;
  double t_lumen = kWallIsoLevel;
  double centerline_step_mm = 1.0;
  PathAlgorithm algorithm = PathAlgorithm::kDijkstra;
  double wall_r_max_mm = 30.0;
  double t_seal_mm = kDefaultSealThresholdMm;
  double ring_threshold_pct = kDefaultRingThresholdPct;
  double a_min_mm2 = kDefaultMinZoneAreaMm2;
};

void validate(const RunConfig& c);

Json to_json(const PhantomSpec& s);
PhantomSpec phantom_spec_from_json(const Json& j);
PhantomRequest phantom_request_from_json(const Json& j);

Json to_json(const SeedPair& s);
SeedPair seed_pair_from_json(const Json& j, const std::string& where = "seeds[]");

Json to_json(const StentSpec& s);
StentSpec stent_spec_from_json(const Json& j);

Json to_json(const ForceParams& p);
ForceParams force_params_from_json(const Json& j);

/// Echoes every field, defaults included, in a fixed order.
Json to_json(const RunConfig& c);
/// Requires "seeds" and "stent"; everything else has defaults.
RunConfig run_config_from_json(const Json& j);

/// Parses a file, mapping syntax errors to kSchema.
Json read_json_file(const std::string& path);

}  // namespace stentsim
