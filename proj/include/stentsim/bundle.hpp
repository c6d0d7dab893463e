#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "stentsim/centerline.hpp"
#include "stentsim/config.hpp"
#include "stentsim/expansion.hpp"
#include "stentsim/json_format.hpp"
#include "stentsim/sealing.hpp"
#include "stentsim/stent_mesh.hpp"

namespace stentsim {

inline constexpr const char* kSchemaVersion = "stentsim/1";

/// Final stent vertices on the (ring, segment) grid; the triangulation is
/// implied by the grid (see grid_triangles).
struct MeshGrid {
  int rings = 0;
  int segments = 0;
  std::vector<Vec3> vertices;  // id i*S + j
};

MeshGrid mesh_grid(const StentMesh& m);
/// Same connectivity as StentMesh.
std::vector<Triangle> grid_triangles(int rings, int segments);

struct VolumeInfo {
  Dims dims{0, 0, 0};
  Vec3 spacing_mm;
  Vec3 origin_mm;
};

struct LimbResult {
  std::string limb;
  Centerline centerline;
  MeshGrid mesh;
  FitGrid fit;
};

struct ResultBundle {
  std::string simulation_id;
  VolumeInfo volume;
  RunConfig config;
  std::vector<LimbResult> limbs;
  SealingReport report;
  ExpansionTrace trace;
};

// Per-artifact codecs; exposed for the service and for tests.
Json centerline_to_json(const Centerline& c);
Centerline centerline_from_json(const Json& j, double step_mm);
void write_obj(const MeshGrid& m, const std::string& limb, std::ostream& out);
MeshGrid read_obj(std::istream& in);
Json fit_to_json(const FitGrid& f, const std::string& limb);
FitGrid fit_from_json(const Json& j);
Json report_to_json(const SealingReport& r);
SealingReport report_from_json(const Json& j);
Json trace_to_json(const ExpansionTrace& t);
ExpansionTrace trace_from_json(const Json& j);

/// Writes manifest.json, report.json, trace.json and per limb
/// centerline_<limb>.json, stent_<limb>.obj, fit_<limb>.json and
/// unfolded_<limb>.ppm. Output is a pure function of the bundle.
void write_bundle(const ResultBundle& b, const std::filesystem::path& dir);

/// Inverse of write_bundle up to the 6-significant-digit serialization.
/// Missing files or a foreign schema tag raise Error(kSchema).
ResultBundle read_bundle(const std::filesystem::path& dir);

/// Whole bundle as one JSON document: the GET /api/run payload. The mesh is a
/// vertex grid and the unfolded map a tight/gap grid.
Json bundle_to_json(const ResultBundle& b);

}  // namespace stentsim
