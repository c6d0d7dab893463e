#include "stentsim/pipeline.hpp"

#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>

#include "stentsim/centerline.hpp"
#include "stentsim/error.hpp"
#include "stentsim/graph.hpp"
#include "stentsim/wall_model.hpp"

namespace stentsim {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(name, e);
  }
}

}  // namespace

std::string simulation_id(const VoxelVolume& v, const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= p[k];
      h *= 1099511628211ull;
    }
  };
  const std::string cfg = dump_canonical(to_json(c), -1);
  mix(cfg.data(), cfg.size());
  for (const Vec3& w : {v.spacing(), v.origin()}) {
    const double xyz[3] = {w.x, w.y, w.z};
    mix(xyz, sizeof xyz);
  }
  mix(v.dims().data(), sizeof(int) * 3);
  mix(v.data().data(), v.data().size_bytes());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<bool> shared_trunk_rings(const Centerline& a, const Centerline& b, double reach_mm) {
  std::vector<bool> out(a.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : b.samples) best = std::min(best, distance(a[i].position, s.position));
    out[i] = best <= reach_mm;
  }
  return out;
}

ResultBundle run_simulation(const VoxelVolume& v, const RunConfig& c, const ProgressFn& progress) {
  validate(c);
  ResultBundle b;
  b.simulation_id = simulation_id(v, c);
  b.volume = {v.dims(), v.spacing(), v.origin()};
  b.config = c;

  std::vector<Centerline> centerlines = stage("centerline", [&] {
    const VoxelGraph g(v, c.t_lumen);
    std::vector<Centerline> out;
    for (const auto& s : c.seeds) {
      const VoxelPath path = shortest_path(g, s.start_mm, s.end_mm, c.algorithm);
      out.push_back(resample_and_frame(g, path, c.centerline_step_mm));
    }
    return out;
  });

  std::vector<WallModel> walls = stage("wall", [&] {
    std::vector<WallModel> out;
    for (const auto& cl : centerlines) {
      out.push_back(cast_wall_rays(v, cl, c.stent.segments, c.wall_r_max_mm));
    }
    return out;
  });

  std::vector<StentMesh> meshes = stage("build", [&] {
    std::vector<StentMesh> out;
    for (std::size_t k = 0; k < centerlines.size(); ++k) {
      out.push_back(build_initial_stent(centerlines[k], c.stent, c.seeds[k].label));
    }
    if (c.stent.kind == StentKind::kY) {
      const double reach = 2.0 * c.stent.initial_radius_mm + c.forces.collision_radius_mm;
      for (std::size_t k = 0; k < 2; ++k) {
        const auto trunk = shared_trunk_rings(centerlines[k], centerlines[1 - k], reach);
        for (int i = 0; i < out[k].rings(); ++i) {
          if (!trunk[i]) continue;
          out[k].set_target_radius(i, 0.5 * c.stent.trunk_diameter_mm);
          out[k].set_collides(i, false);
        }
      }
    }
    return out;
  });

  b.trace = stage("expand", [&] { return expand(meshes, walls, c.forces, progress); });

  stage("sealing", [&] {
    std::vector<LimbSealingInput> inputs;
    for (std::size_t k = 0; k < meshes.size(); ++k) {
      FitGrid fit = classify_fit(meshes[k], walls[k], c.t_seal_mm);
      inputs.push_back(analyze_limb(meshes[k], fit, c.ring_threshold_pct));
      b.limbs.push_back({meshes[k].limb_id(), centerlines[k], mesh_grid(meshes[k]), std::move(fit)});
    }
    std::optional<double> overlap;
    if (c.stent.kind == StentKind::kY) {
      overlap = bifurcation_overlap_area(meshes[0], meshes[1], c.forces.collision_radius_mm);
    }
    b.report = build_report(inputs, c.stent.kind, overlap, c.a_min_mm2, c.t_seal_mm,
                            c.ring_threshold_pct);
    return 0;
  });
  return b;
}

std::string summary_line(const ResultBundle& b) {
  std::ostringstream out;
  out << "simulation " << b.simulation_id << " kind " << to_string(b.report.kind);
  for (const auto& l : b.report.limbs) {
    out << " | " << l.limb << " proximal " << format_number(l.proximal.area_mm2) << " mm2"
        << (l.proximal.required ? "" : " (not required)") << " distal "
        << format_number(l.distal.area_mm2) << " mm2";
  }
  if (b.report.bifurcation_overlap_area_mm2) {
    out << " | bifurcation_overlap " << format_number(*b.report.bifurcation_overlap_area_mm2) << " mm2";
  }
  out << " | total " << format_number(b.report.total_sealing_area_mm2) << " mm2 | verdict "
      << to_string(b.report.verdict) << " | iterations " << b.trace.iterations_run
      << (b.trace.converged ? "" : " (not converged)");
  return out.str();
}

}  // namespace stentsim
