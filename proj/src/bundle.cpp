#include "stentsim/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "stentsim/error.hpp"

namespace stentsim {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void schema_error(const std::string& msg) { throw Error(ErrorCode::kSchema, msg); }

const Json& member(const Json& j, const char* key, const std::string& doc) {
  if (!j.is_object() || !j.contains(key)) schema_error(doc + ": missing '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* key, const std::string& doc) {
  const Json& v = member(j, key, doc);
  if (!v.is_number()) schema_error(doc + ": '" + key + "' must be a number");
  return v.get<double>();
}

int integer(const Json& j, const char* key, const std::string& doc) {
  const Json& v = member(j, key, doc);
  if (!v.is_number_integer()) schema_error(doc + ": '" + key + "' must be an integer");
  return v.get<int>();
}

std::string text(const Json& j, const char* key, const std::string& doc) {
  const Json& v = member(j, key, doc);
  if (!v.is_string()) schema_error(doc + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << body;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) schema_error("bundle file missing: " + path.filename().string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& path) {
  const std::string body = read_text(path);
  try {
    return Json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    schema_error(path.filename().string() + ": " + e.what());
  }
}

void check_schema(const Json& j, const std::string& doc) {
  const std::string tag = text(j, "schema", doc);
  if (tag != kSchemaVersion) {
    schema_error(doc + ": schema '" + tag + "' is not " + kSchemaVersion);
  }
}

Json zone_to_json(const SealingZone& z) {
  Json rings = Json::array();
  Json pct = Json::array();
  for (const auto& [ring, p] : z.per_ring_pct) {
    rings.push_back(ring);
    pct.push_back(p);
  }
  return Json{{"rings", rings}, {"area_mm2", z.area_mm2}, {"per_ring_pct", pct}, {"required", z.required}};
}

SealingZone zone_from_json(const Json& j, ZoneKind which, const std::string& limb) {
  const std::string doc = "report.json zone";
  SealingZone z;
  z.which = which;
  z.limb = limb;
  z.area_mm2 = number(j, "area_mm2", doc);
  z.required = member(j, "required", doc).get<bool>();
  const Json& rings = member(j, "rings", doc);
  const Json& pct = member(j, "per_ring_pct", doc);
  if (!rings.is_array() || !pct.is_array() || rings.size() != pct.size()) {
    schema_error(doc + ": rings and per_ring_pct must be arrays of equal length");
  }
  for (std::size_t k = 0; k < rings.size(); ++k) {
    z.per_ring_pct.emplace_back(rings[k].get<int>(), pct[k].get<double>());
  }
  if (!z.per_ring_pct.empty()) z.rings = {z.per_ring_pct.front().first, z.per_ring_pct.back().first};
  return z;
}

Verdict parse_verdict(const std::string& v) {
  if (v == "adequate") return Verdict::kAdequate;
  if (v == "inadequate") return Verdict::kInadequate;
  schema_error("report.json: unknown verdict '" + v + "'");
}

std::string limb_file(const char* prefix, const std::string& limb, const char* ext) {
  return std::string(prefix) + "_" + limb + ext;
}

}  // namespace

MeshGrid mesh_grid(const StentMesh& m) {
  const auto v = m.vertices();
  return {m.rings(), m.segments(), std::vector<Vec3>(v.begin(), v.end())};
}

std::vector<Triangle> grid_triangles(int rings, int segments) {
  std::vector<Triangle> tris;
  tris.reserve(2 * static_cast<std::size_t>(std::max(rings - 1, 0)) * segments);
  for (int i = 0; i + 1 < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      const int jn = (j + 1) % segments;
      const int a = i * segments + j;
      const int b = i * segments + jn;
      const int c = (i + 1) * segments + jn;
      const int d = (i + 1) * segments + j;
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  }
  return tris;
}

Json centerline_to_json(const Centerline& c) {
  Json out = Json::array();
  for (const auto& s : c.samples) {
    out.push_back(Json{{"p", to_json(s.position)},
                       {"t", to_json(s.tangent)},
                       {"n", to_json(s.normal)},
                       {"b", to_json(s.binormal)},
                       {"s", s.arclen}});
  }
  return out;
}

Centerline centerline_from_json(const Json& j, double step_mm) {
  if (!j.is_array()) schema_error("centerline: expected an array of samples");
  Centerline c;
  c.step_mm = step_mm;
  for (const auto& e : j) {
    const std::string doc = "centerline sample";
    c.samples.push_back({vec3_from_json(member(e, "p", doc)), vec3_from_json(member(e, "t", doc)),
                         vec3_from_json(member(e, "n", doc)), vec3_from_json(member(e, "b", doc)),
                         number(e, "s", doc)});
  }
  return c;
}

void write_obj(const MeshGrid& m, const std::string& limb, std::ostream& out) {
  out << "# " << kSchemaVersion << " stent limb " << limb << " rings " << m.rings << " segments "
      << m.segments << '\n';
  for (const auto& v : m.vertices) {
    out << "v " << format_number(v.x) << ' ' << format_number(v.y) << ' ' << format_number(v.z)
        << '\n';
  }
  for (const auto& t : grid_triangles(m.rings, m.segments)) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

MeshGrid read_obj(std::istream& in) {
  MeshGrid m;
  std::string line;
  bool have_header = false;
  std::size_t faces = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "#" && !have_header) {
      std::string schema, word, limb;
      ls >> schema >> word >> word >> limb >> word >> m.rings >> word >> m.segments;
      have_header = ls && schema == kSchemaVersion;
    } else if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x >> v.y >> v.z)) schema_error("obj: bad vertex line '" + line + "'");
      m.vertices.push_back(v);
    } else if (tag == "f") {
      ++faces;
    }
  }
  if (!have_header) schema_error("obj: missing stentsim header comment");
  if (m.rings < 2 || m.segments < 1 ||
      m.vertices.size() != static_cast<std::size_t>(m.rings) * m.segments) {
    schema_error("obj: vertex count does not match rings x segments");
  }
  if (faces != grid_triangles(m.rings, m.segments).size()) schema_error("obj: unexpected face count");
  return m;
}

Json fit_to_json(const FitGrid& f, const std::string& limb) {
  Json tight = Json::array();
  Json gap = Json::array();
  for (int i = 0; i < f.rings; ++i) {
    Json trow = Json::array();
    Json grow = Json::array();
    for (int j = 0; j < f.segments; ++j) {
      trow.push_back(f.is_tight(i, j) ? 1 : 0);
      const auto g = f.gap(i, j);
      grow.push_back(g ? Json(*g) : Json(nullptr));
    }
    tight.push_back(std::move(trow));
    gap.push_back(std::move(grow));
  }
  return Json{{"schema", kSchemaVersion}, {"limb", limb},       {"rings", f.rings},
              {"segments", f.segments},   {"t_seal_mm", f.t_seal_mm}, {"tight", tight},
              {"gap_mm", gap}};
}

FitGrid fit_from_json(const Json& j) {
  const std::string doc = "fit grid";
  check_schema(j, doc);
  FitGrid f;
  f.rings = integer(j, "rings", doc);
  f.segments = integer(j, "segments", doc);
  f.t_seal_mm = number(j, "t_seal_mm", doc);
  const Json& tight = member(j, "tight", doc);
  const Json& gap = member(j, "gap_mm", doc);
  if (!tight.is_array() || !gap.is_array() || tight.size() != static_cast<std::size_t>(f.rings) ||
      gap.size() != tight.size()) {
    schema_error(doc + ": grids must have one row per ring");
  }
  for (int i = 0; i < f.rings; ++i) {
    if (tight[i].size() != static_cast<std::size_t>(f.segments) || gap[i].size() != tight[i].size()) {
      schema_error(doc + ": grid rows must have one entry per segment");
    }
    for (int j = 0; j < f.segments; ++j) {
      f.tight.push_back(tight[i][j].get<int>() != 0 ? 1 : 0);
      f.gap_mm.push_back(gap[i][j].is_null() ? std::nullopt
                                             : std::optional<double>(gap[i][j].get<double>()));
    }
  }
  return f;
}

Json report_to_json(const SealingReport& r) {
  Json limbs = Json::array();
  Json required = Json::array();
  for (const auto& l : r.limbs) {
    limbs.push_back(Json{{"limb", l.limb},
                         {"per_ring_pct", l.per_ring_pct},
                         {"proximal", zone_to_json(l.proximal)},
                         {"distal", zone_to_json(l.distal)}});
    for (const SealingZone* z : {&l.proximal, &l.distal}) {
      if (z->required) required.push_back(Json{{"limb", l.limb}, {"zone", to_string(z->which)}});
    }
  }
  Json j{{"schema", kSchemaVersion}, {"kind", to_string(r.kind)}, {"verdict", to_string(r.verdict)},
         {"total_sealing_area_mm2", r.total_sealing_area_mm2}};
  if (r.bifurcation_overlap_area_mm2) j["bifurcation_overlap_area_mm2"] = *r.bifurcation_overlap_area_mm2;
  j["a_min_mm2"] = r.a_min_mm2;
  j["t_seal_mm"] = r.t_seal_mm;
  j["ring_threshold_pct"] = r.ring_threshold_pct;
  j["required_zones"] = required;
  j["limbs"] = limbs;
  return j;
}

SealingReport report_from_json(const Json& j) {
  const std::string doc = "report.json";
  check_schema(j, doc);
  SealingReport r;
  try {
    r.kind = parse_stent_kind(text(j, "kind", doc));
  } catch (const Error& e) {
    schema_error(doc + ": " + e.what());
  }
  r.verdict = parse_verdict(text(j, "verdict", doc));
  r.total_sealing_area_mm2 = number(j, "total_sealing_area_mm2", doc);
  if (j.contains("bifurcation_overlap_area_mm2")) {
    r.bifurcation_overlap_area_mm2 = number(j, "bifurcation_overlap_area_mm2", doc);
  }
  r.a_min_mm2 = number(j, "a_min_mm2", doc);
  r.t_seal_mm = number(j, "t_seal_mm", doc);
  r.ring_threshold_pct = number(j, "ring_threshold_pct", doc);
  const Json& limbs = member(j, "limbs", doc);
  if (!limbs.is_array()) schema_error(doc + ": 'limbs' must be an array");
  for (const auto& lj : limbs) {
    LimbSealing l;
    l.limb = text(lj, "limb", doc);
    l.per_ring_pct = member(lj, "per_ring_pct", doc).get<std::vector<double>>();
    l.proximal = zone_from_json(member(lj, "proximal", doc), ZoneKind::kProximal, l.limb);
    l.distal = zone_from_json(member(lj, "distal", doc), ZoneKind::kDistal, l.limb);
    r.limbs.push_back(std::move(l));
  }
  return r;
}

Json trace_to_json(const ExpansionTrace& t) {
  return Json{{"schema", kSchemaVersion},
              {"iterations_run", t.iterations_run},
              {"converged", t.converged},
              {"max_displacement_mm", t.max_displacement}};
}

ExpansionTrace trace_from_json(const Json& j) {
  const std::string doc = "trace.json";
  check_schema(j, doc);
  ExpansionTrace t;
  t.iterations_run = integer(j, "iterations_run", doc);
  t.converged = member(j, "converged", doc).get<bool>();
  t.max_displacement = member(j, "max_displacement_mm", doc).get<std::vector<double>>();
  return t;
}

namespace {

Json volume_to_json(const VolumeInfo& v) {
  return Json{{"dims", v.dims}, {"spacing_mm", to_json(v.spacing_mm)}, {"origin_mm", to_json(v.origin_mm)}};
}

Json manifest_json(const ResultBundle& b, const std::vector<std::string>& files) {
  Json limbs = Json::array();
  for (const auto& l : b.limbs) {
    limbs.push_back(Json{{"limb", l.limb},
                         {"rings", l.mesh.rings},
                         {"segments", l.mesh.segments},
                         {"centerline_step_mm", l.centerline.step_mm},
                         {"centerline", limb_file("centerline", l.limb, ".json")},
                         {"mesh", limb_file("stent", l.limb, ".obj")},
                         {"fit", limb_file("fit", l.limb, ".json")},
                         {"unfolded", limb_file("unfolded", l.limb, ".ppm")}});
  }
  return Json{{"schema", kSchemaVersion},
              {"simulation_id", b.simulation_id},
              {"kind", to_string(b.config.stent.kind)},
              {"volume", volume_to_json(b.volume)},
              {"config", to_json(b.config)},
              {"limbs", limbs},
              {"files", files}};
}

}  // namespace

void write_bundle(const ResultBundle& b, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::string> files{"manifest.json", "report.json", "trace.json"};
  for (const auto& l : b.limbs) {
    if (l.mesh.rings != l.fit.rings || l.mesh.segments != l.fit.segments) {
      throw Error(ErrorCode::kDimensionMismatch, "limb " + l.limb + ": mesh and fit grid differ");
    }
    const std::string cl = limb_file("centerline", l.limb, ".json");
    const std::string obj = limb_file("stent", l.limb, ".obj");
    const std::string fit = limb_file("fit", l.limb, ".json");
    const std::string ppm = limb_file("unfolded", l.limb, ".ppm");
    write_text(dir / cl, dump_canonical(centerline_to_json(l.centerline)) + "\n");
    std::ostringstream o;
    write_obj(l.mesh, l.limb, o);
    write_text(dir / obj, o.str());
    write_text(dir / fit, dump_canonical(fit_to_json(l.fit, l.limb)) + "\n");
    std::ostringstream p;
    write_ppm(build_unfolded_map(l.fit), p);
    write_text(dir / ppm, p.str());
    files.insert(files.end(), {cl, obj, fit, ppm});
  }
  std::sort(files.begin(), files.end());
  write_text(dir / "report.json", dump_canonical(report_to_json(b.report)) + "\n");
  write_text(dir / "trace.json", dump_canonical(trace_to_json(b.trace)) + "\n");
  write_text(dir / "manifest.json", dump_canonical(manifest_json(b, files)) + "\n");
}

ResultBundle read_bundle(const fs::path& dir) {
  const Json manifest = read_json(dir / "manifest.json");
  const std::string doc = "manifest.json";
  check_schema(manifest, doc);

  ResultBundle b;
  b.simulation_id = text(manifest, "simulation_id", doc);
  const Json& vol = member(manifest, "volume", doc);
  const Json& dims = member(vol, "dims", doc);
  if (!dims.is_array() || dims.size() != 3) schema_error(doc + ": volume.dims must have 3 entries");
  b.volume.dims = {dims[0].get<int>(), dims[1].get<int>(), dims[2].get<int>()};
  b.volume.spacing_mm = vec3_from_json(member(vol, "spacing_mm", doc));
  b.volume.origin_mm = vec3_from_json(member(vol, "origin_mm", doc));
  try {
    b.config = run_config_from_json(member(manifest, "config", doc));
  } catch (const Error& e) {
    schema_error(doc + ": config: " + e.what());
  }

  const Json& limbs = member(manifest, "limbs", doc);
  if (!limbs.is_array()) schema_error(doc + ": 'limbs' must be an array");
  for (const auto& lj : limbs) {
    LimbResult l;
    l.limb = text(lj, "limb", doc);
    l.centerline = centerline_from_json(read_json(dir / text(lj, "centerline", doc)),
                                        number(lj, "centerline_step_mm", doc));
    std::istringstream obj(read_text(dir / text(lj, "mesh", doc)));
    l.mesh = read_obj(obj);
    l.fit = fit_from_json(read_json(dir / text(lj, "fit", doc)));
    read_text(dir / text(lj, "unfolded", doc));  // presence only; derived from the fit grid
    if (l.mesh.rings != integer(lj, "rings", doc) || l.fit.rings != l.mesh.rings ||
        l.fit.segments != l.mesh.segments) {
      schema_error(doc + ": limb " + l.limb + " grids disagree");
    }
    b.limbs.push_back(std::move(l));
  }
  b.report = report_from_json(read_json(dir / "report.json"));
  b.trace = trace_from_json(read_json(dir / "trace.json"));
  if (b.report.limbs.size() != b.limbs.size()) schema_error("report.json: limb count differs from manifest");
  return b;
}

Json bundle_to_json(const ResultBundle& b) {
  Json limbs = Json::array();
  for (const auto& l : b.limbs) {
    Json grid = Json::array();
    for (int i = 0; i < l.mesh.rings; ++i) {
      Json row = Json::array();
      for (int j = 0; j < l.mesh.segments; ++j) {
        row.push_back(to_json(l.mesh.vertices[static_cast<std::size_t>(i) * l.mesh.segments + j]));
      }
      grid.push_back(std::move(row));
    }
    limbs.push_back(Json{{"limb", l.limb},
                         {"centerline", centerline_to_json(l.centerline)},
                         {"mesh", {{"rings", l.mesh.rings}, {"segments", l.mesh.segments}, {"vertices", grid}}},
                         {"unfolded", fit_to_json(l.fit, l.limb)}});
  }
  return Json{{"schema", kSchemaVersion},
              {"simulation_id", b.simulation_id},
              {"volume", volume_to_json(b.volume)},
              {"config", to_json(b.config)},
              {"report", report_to_json(b.report)},
              {"trace", trace_to_json(b.trace)},
              {"limbs", limbs}};
}

}  // namespace stentsim
