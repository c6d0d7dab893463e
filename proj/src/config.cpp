#include "stentsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "stentsim/error.hpp"

namespace stentsim {

namespace {

[[noreturn]] void schema_error(const std::string& msg) { throw Error(ErrorCode::kSchema, msg); }

// Field access with dotted paths in the error messages.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) schema_error(where() + "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const Json& require(const char* key) const {
    if (!has(key)) schema_error("missing field '" + name(key) + "'");
    return j_.at(key);
  }

  double number(const char* key) const {
    const Json& v = require(key);
    if (!v.is_number()) schema_error("field '" + name(key) + "' must be a number");
    return v.get<double>();
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  int integer(const char* key) const {
    const Json& v = require(key);
    if (!v.is_number_integer()) schema_error("field '" + name(key) + "' must be an integer");
    return v.get<int>();
  }
  int integer(const char* key, int fallback) const { return has(key) ? integer(key) : fallback; }

  std::string text(const char* key) const {
    const Json& v = require(key);
    if (!v.is_string()) schema_error("field '" + name(key) + "' must be a string");
    return v.get<std::string>();
  }

  Vec3 vec3(const char* key) const {
    const Json& v = require(key);
    if (!v.is_array() || v.size() != 3 ||
        !std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_number(); })) {
      schema_error("field '" + name(key) + "' must be [x, y, z]");
    }
    return vec3_from_json(v);
  }

  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }

  const Json& j_;
  std::string path_;
};

template <typename Parse>
auto enum_field(const Fields& f, const char* key, Parse parse) {
  const std::string v = f.text(key);
  try {
    return parse(v);
  } catch (const Error& e) {
    schema_error("field '" + f.name(key) + "': " + e.what());
  }
}

}  // namespace

Json to_json(const PhantomSpec& s) {
  return Json{{"kind", to_string(s.kind)},
              {"lumen_radius_mm", s.lumen_radius_mm},
              {"length_mm", s.length_mm},
              {"bulge_radius_mm", s.bulge_radius_mm},
              {"bulge_center_fraction", s.bulge_center_fraction},
              {"bulge_extent_mm", s.bulge_extent_mm},
              {"branch_angle_deg", s.branch_angle_deg},
              {"branch_radius_mm", s.branch_radius_mm},
              {"noise_sigma", s.noise_sigma},
              {"seed", s.seed}};
}

PhantomSpec phantom_spec_from_json(const Json& j) {
  const Fields f(j, "spec");
  PhantomSpec s;
  s.kind = enum_field(f, "kind", parse_phantom_kind);
  s.lumen_radius_mm = f.number("lumen_radius_mm", s.lumen_radius_mm);
  s.length_mm = f.number("length_mm", s.length_mm);
  s.bulge_radius_mm = f.number("bulge_radius_mm", s.bulge_radius_mm);
  s.bulge_center_fraction = f.number("bulge_center_fraction", s.bulge_center_fraction);
  s.bulge_extent_mm = f.number("bulge_extent_mm", s.bulge_extent_mm);
  s.branch_angle_deg = f.number("branch_angle_deg", s.branch_angle_deg);
  s.branch_radius_mm = f.number("branch_radius_mm", s.branch_radius_mm);
  s.noise_sigma = f.number("noise_sigma", s.noise_sigma);
  if (f.has("seed")) {
    const Json& seed = f.require("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
      schema_error("field 'spec.seed' must be a non-negative integer");
    }
    s.seed = seed.get<std::uint64_t>();
  }
  validate(s);
  return s;
}

PhantomRequest phantom_request_from_json(const Json& j) {
  const Fields f(j, "");
  PhantomRequest r;
  r.spec = phantom_spec_from_json(f.require("spec"));
  if (f.has("dims")) {
    const Json& d = f.require("dims");
    if (!d.is_array() || d.size() != 3 ||
        !std::all_of(d.begin(), d.end(), [](const Json& e) { return e.is_number_integer(); })) {
      schema_error("field 'dims' must be [nx, ny, nz]");
    }
    Dims dims{d[0].get<int>(), d[1].get<int>(), d[2].get<int>()};
    for (int n : dims) {
      if (n < 2 || n > 1024) throw Error(ErrorCode::kInvalidArgument, "dims must lie in [2, 1024]");
    }
    r.dims = dims;
  }
  if (f.has("spacing_mm")) {
    r.spacing_mm = f.vec3("spacing_mm");
    if (!(r.spacing_mm.x > 0 && r.spacing_mm.y > 0 && r.spacing_mm.z > 0)) {
      throw Error(ErrorCode::kInvalidArgument, "spacing_mm must be positive");
    }
  }
  return r;
}

Json to_json(const SeedPair& s) {
  return Json{{"start_mm", to_json(s.start_mm)}, {"end_mm", to_json(s.end_mm)}, {"label", s.label}};
}

SeedPair seed_pair_from_json(const Json& j, const std::string& where) {
  const Fields f(j, where);
  SeedPair s;
  s.start_mm = f.vec3("start_mm");
  s.end_mm = f.vec3("end_mm");
  s.label = f.has("label") ? f.text("label") : "";
  return s;
}

Json to_json(const StentSpec& s) {
  Json j{{"kind", to_string(s.kind)}};
  if (s.kind == StentKind::kI) {
    j["diameter_mm"] = s.diameter_mm;
  } else {
    j["trunk_diameter_mm"] = s.trunk_diameter_mm;
    j["limb_diameter_mm"] = s.limb_diameter_mm;
  }
  j["segments"] = s.segments;
  j["min_rings"] = s.min_rings;
  j["initial_radius_mm"] = s.initial_radius_mm;
  return j;
}

StentSpec stent_spec_from_json(const Json& j) {
  const Fields f(j, "stent");
  StentSpec s;
  s.kind = enum_field(f, "kind", parse_stent_kind);
  if (s.kind == StentKind::kI) {
    s.diameter_mm = f.number("diameter_mm");
  } else {
    s.trunk_diameter_mm = f.number("trunk_diameter_mm");
    s.limb_diameter_mm = f.number("limb_diameter_mm");
  }
  s.segments = f.integer("segments", s.segments);
  s.min_rings = f.integer("min_rings", s.min_rings);
  s.initial_radius_mm = f.number("initial_radius_mm", s.initial_radius_mm);
  validate(s);
  return s;
}

Json to_json(const ForceParams& p) {
  return Json{{"k_h", p.k_h},
              {"k_v", p.k_v},
              {"k_d", p.k_d},
              {"balloon", p.balloon},
              {"dt", p.dt},
              {"max_iters", p.max_iters},
              {"eps_conv_mm", p.eps_conv_mm},
              {"collision_radius_mm", p.collision_radius_mm},
              {"k_col", p.k_col}};
}

ForceParams force_params_from_json(const Json& j) {
  const Fields f(j, "forces");
  ForceParams p;
  p.k_h = f.number("k_h", p.k_h);
  p.k_v = f.number("k_v", p.k_v);
  p.k_d = f.number("k_d", p.k_d);
  p.balloon = f.number("balloon", p.balloon);
  p.dt = f.number("dt", p.dt);
  p.max_iters = f.integer("max_iters", p.max_iters);
  p.eps_conv_mm = f.number("eps_conv_mm", p.eps_conv_mm);
  p.collision_radius_mm = f.number("collision_radius_mm", p.collision_radius_mm);
  p.k_col = f.number("k_col", p.k_col);
  validate(p);
  return p;
}

void validate(const RunConfig& c) {
  const auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  validate(c.stent);
  validate(c.forces);
  const std::size_t want = c.stent.kind == StentKind::kY ? 2 : 1;
  if (c.seeds.size() != want) {
    fail(std::string(to_string(c.stent.kind)) + "-stent needs " + std::to_string(want) +
         " seed pair(s), got " + std::to_string(c.seeds.size()));
  }
  for (const auto& s : c.seeds) {
    // Labels name bundle files.
    const bool safe = !s.label.empty() && std::all_of(s.label.begin(), s.label.end(), [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_';
    });
    if (!safe) fail("seed label '" + s.label + "' must be non-empty [A-Za-z0-9_-]");
  }
  if (want == 2 && c.seeds[0].label == c.seeds[1].label) fail("seed labels must differ");
  if (!(c.centerline_step_mm > 0.0)) fail("centerline.step_mm must be positive");
  if (!(c.wall_r_max_mm > 0.0)) fail("wall.r_max_mm must be positive");
  if (!(c.t_seal_mm > 0.0)) fail("sealing.t_seal_mm must be positive");
  if (!(c.ring_threshold_pct >= 0.0 && c.ring_threshold_pct <= 100.0)) {
    fail("sealing.ring_threshold_pct must lie in [0, 100]");
  }
  if (!(c.a_min_mm2 >= 0.0)) fail("sealing.a_min_mm2 must be non-negative");
}

Json to_json(const RunConfig& c) {
  Json seeds = Json::array();
  for (const auto& s : c.seeds) seeds.push_back(to_json(s));
  return Json{{"seeds", seeds},
              {"stent", to_json(c.stent)},
              {"forces", to_json(c.forces)},
              {"t_lumen", c.t_lumen},
              {"centerline", {{"step_mm", c.centerline_step_mm}, {"algorithm", to_string(c.algorithm)}}},
              {"wall", {{"r_max_mm", c.wall_r_max_mm}}},
              {"sealing",
               {{"t_seal_mm", c.t_seal_mm},
                {"ring_threshold_pct", c.ring_threshold_pct},
                {"a_min_mm2", c.a_min_mm2}}}};
}

RunConfig run_config_from_json(const Json& j) {
  const Fields f(j, "");
  RunConfig c;
  const Json& seeds = f.require("seeds");
  if (!seeds.is_array()) schema_error("field 'seeds' must be an array");
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    c.seeds.push_back(seed_pair_from_json(seeds[k], "seeds[" + std::to_string(k) + "]"));
  }
  c.stent = stent_spec_from_json(f.require("stent"));
  if (f.has("forces")) c.forces = force_params_from_json(f.require("forces"));
  c.t_lumen = f.number("t_lumen", c.t_lumen);
  if (f.has("centerline")) {
    const Fields cl(f.require("centerline"), "centerline");
    c.centerline_step_mm = cl.number("step_mm", c.centerline_step_mm);
    if (cl.has("algorithm")) c.algorithm = enum_field(cl, "algorithm", parse_path_algorithm);
  }
  if (f.has("wall")) {
    const Fields w(f.require("wall"), "wall");
    c.wall_r_max_mm = w.number("r_max_mm", c.wall_r_max_mm);
  }
  if (f.has("sealing")) {
    const Fields s(f.require("sealing"), "sealing");
    c.t_seal_mm = s.number("t_seal_mm", c.t_seal_mm);
    c.ring_threshold_pct = s.number("ring_threshold_pct", c.ring_threshold_pct);
    c.a_min_mm2 = s.number("a_min_mm2", c.a_min_mm2);
  }
  // Labels default to the limb's position so Y runs always get two names.
  for (std::size_t k = 0; k < c.seeds.size(); ++k) {
    if (c.seeds[k].label.empty()) c.seeds[k].label = c.seeds.size() == 1 ? "main" : "limb" + std::to_string(k);
  }
  validate(c);
  return c;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    schema_error(path + ": " + e.what());
  }
}

}  // namespace stentsim
