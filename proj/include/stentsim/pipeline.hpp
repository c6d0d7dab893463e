#pragma once

#include <functional>
#include <string>

#include "stentsim/bundle.hpp"
#include "stentsim/config.hpp"
#include "stentsim/error.hpp"
#include "stentsim/volume.hpp"

namespace stentsim {

/// A library error tagged with the pipeline stage that raised it:
/// centerline, wall, build, expand, sealing or bundle.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Hex FNV-1a digest of the canonical config and the volume contents.
std::string simulation_id(const VoxelVolume& v, const RunConfig& c);

/// For a Y-stent: marks rings of `a` lying on the shared trunk, i.e. whose
/// centre is within `reach_mm` of some ring centre of `b`.
std::vector<bool> shared_trunk_rings(const Centerline& a, const Centerline& b, double reach_mm);

/// centerline -> wall -> build -> expand -> sealing, one limb per seed pair.
/// Y-stent limbs share the trunk: trunk rings take the trunk diameter and sit
/// out of self-collision, so only the legs repel each other.
ResultBundle run_simulation(const VoxelVolume& v, const RunConfig& c,
                            const ProgressFn& progress = {});

/// One-line summary for the CLI: zone areas per limb and the verdict.
std::string summary_line(const ResultBundle& b);

}  // namespace stentsim
