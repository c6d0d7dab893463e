#include "stentsim/sealing.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "stentsim/error.hpp"

namespace stentsim {

FitGrid classify_fit(const StentMesh& m, const WallModel& w, double t_seal_mm) {
  if (m.rings() != w.rings() || m.segments() != w.segments()) {
    throw Error(ErrorCode::kDimensionMismatch, "mesh and wall model differ in (R, S)");
  }
  FitGrid f;
  f.rings = m.rings();
  f.segments = m.segments();
  f.t_seal_mm = t_seal_mm;
  f.gap_mm.resize(static_cast<std::size_t>(f.rings) * f.segments);
  f.tight.resize(f.gap_mm.size(), 0);
  for (int i = 0; i < f.rings; ++i) {
    for (int j = 0; j < f.segments; ++j) {
      const auto wall = w.wall_radius(i, j);
      if (!wall) continue;
      const double gap = std::max(*wall - stent_radius(m, i, j), 0.0);
      f.gap_mm[f.slot(i, j)] = gap;
      f.tight[f.slot(i, j)] = gap < t_seal_mm ? 1 : 0;
    }
  }
  return f;
}

std::vector<double> per_ring_percentages(const FitGrid& f) {
  std::vector<double> pct(f.rings);
  for (int i = 0; i < f.rings; ++i) {
    int count = 0;
    for (int j = 0; j < f.segments; ++j) count += f.is_tight(i, j) ? 1 : 0;
    pct[i] = 100.0 * count / f.segments;
  }
  return pct;
}

ZoneSplit separate_zones(const FitGrid& f, double ring_threshold_pct) {
  const auto pct = per_ring_percentages(f);
  const int rings = f.rings;
  auto sealing = [&](int i) { return pct[i] >= ring_threshold_pct; };

  ZoneSplit z;
  if (rings == 0) return z;
  int head = 0;
  while (head < rings && sealing(head)) ++head;
  if (head == rings) {
    z.proximal = {0, rings / 2 - 1};
    z.distal = {rings / 2, rings - 1};
    return z;
  }
  int tail = rings - 1;
  while (tail >= 0 && sealing(tail)) --tail;
  z.proximal = {0, head - 1};
  z.distal = {tail + 1, rings - 1};
  return z;
}

std::vector<int> zone_triangles(const StentMesh& m, const FitGrid& f, RingRange zone) {
  std::vector<int> out;
  if (zone.empty()) return out;
  if (zone.begin < 0 || zone.end >= m.rings()) {
    throw Error(ErrorCode::kIndexOutOfRange, "zone rings outside the mesh");
  }
  const auto tris = m.triangles();
  const int segs = m.segments();
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const int ring = std::min({tri[0], tri[1], tri[2]}) / segs;
    if (!zone.contains(ring)) continue;
    const bool all_tight = std::all_of(tri.begin(), tri.end(), [&](int v) {
      return f.is_tight(v / segs, v % segs);
    });
    if (all_tight) out.push_back(static_cast<int>(t));
  }
  return out;
}

double zone_area(const StentMesh& m, const FitGrid& f, RingRange zone) {
  const auto tris = zone_triangles(m, f, zone);
  return surface_area(m, tris);
}

double bifurcation_overlap_area(const StentMesh& a, const StentMesh& b,
                                double collision_radius_mm) {
  const auto av = a.vertices();
  const auto bv = b.vertices();
  std::vector<int> b_ids;
  for (int i = 0; i < b.rings(); ++i) {
    if (!b.collides(i)) continue;
    for (int j = 0; j < b.segments(); ++j) b_ids.push_back(b.vertex_id(i, j));
  }

  std::vector<unsigned char> near(av.size(), 0);
  for (int i = 0; i < a.rings(); ++i) {
    if (!a.collides(i)) continue;
    for (int j = 0; j < a.segments(); ++j) {
      const int id = a.vertex_id(i, j);
      for (int ib : b_ids) {
        if (distance(av[id], bv[ib]) < collision_radius_mm) {
          near[id] = 1;
          break;
        }
      }
    }
  }

  double area = 0.0;
  for (const auto& tri : a.triangles()) {
    if (near[tri[0]] && near[tri[1]] && near[tri[2]]) {
      area += triangle_area(av[tri[0]], av[tri[1]], av[tri[2]]);
    }
  }
  return area;
}

UnfoldedMap build_unfolded_map(const FitGrid& f) {
  return {f.rings, f.segments, f.tight};
}

void write_ppm(const UnfoldedMap& map, std::ostream& out, int cell_px) {
  const int width = map.segments * cell_px;
  const int height = map.rings * cell_px;
  out << "P6\n" << width << ' ' << height << "\n255\n";
  std::vector<char> row(static_cast<std::size_t>(width) * 3);
  for (int i = 0; i < map.rings; ++i) {
    for (int j = 0; j < map.segments; ++j) {
      const Rgb c = map.color(i, j);
      for (int px = 0; px < cell_px; ++px) {
        const std::size_t o = (static_cast<std::size_t>(j) * cell_px + px) * 3;
        row[o] = static_cast<char>(c.r);
        row[o + 1] = static_cast<char>(c.g);
        row[o + 2] = static_cast<char>(c.b);
      }
    }
    for (int py = 0; py < cell_px; ++py) out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

std::string_view to_string(ZoneKind kind) {
  return kind == ZoneKind::kProximal ? "proximal" : "distal";
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::kAdequate ? "adequate" : "inadequate";
}

namespace {

SealingZone make_zone(ZoneKind which, const LimbSealingInput& in, RingRange rings, double area) {
  SealingZone z;
  z.which = which;
  z.limb = in.limb;
  z.rings = rings;
  z.area_mm2 = area;
  for (int i = rings.begin; i <= rings.end; ++i) {
    z.per_ring_pct.emplace_back(i, in.per_ring_pct.at(i));
  }
  return z;
}

}  // namespace

SealingReport build_report(std::span<const LimbSealingInput> limbs, StentKind kind,
                           std::optional<double> bifurcation_overlap_area_mm2, double a_min_mm2,
                           double t_seal_mm, double ring_threshold_pct) {
  const std::size_t expected = kind == StentKind::kY ? 2 : 1;
  if (limbs.size() != expected) {
    throw Error(ErrorCode::kInvalidArgument, std::string(to_string(kind)) + "-stent report needs " +
                                                 std::to_string(expected) + " limb(s)");
  }
  SealingReport r;
  r.kind = kind;
  r.a_min_mm2 = a_min_mm2;
  r.t_seal_mm = t_seal_mm;
  r.ring_threshold_pct = ring_threshold_pct;
  if (kind == StentKind::kY) r.bifurcation_overlap_area_mm2 = bifurcation_overlap_area_mm2.value_or(0.0);

  bool adequate = true;
  for (std::size_t k = 0; k < limbs.size(); ++k) {
    const auto& in = limbs[k];
    LimbSealing out;
    out.limb = in.limb;
    out.per_ring_pct = in.per_ring_pct;
    out.proximal = make_zone(ZoneKind::kProximal, in, in.zones.proximal, in.proximal_area_mm2);
    out.distal = make_zone(ZoneKind::kDistal, in, in.zones.distal, in.distal_area_mm2);
    out.proximal.required = k == 0;
    for (const SealingZone* z : {&out.proximal, &out.distal}) {
      if (!z->required) continue;
      r.total_sealing_area_mm2 += z->area_mm2;
      adequate = adequate && z->area_mm2 >= a_min_mm2;
    }
    r.limbs.push_back(std::move(out));
  }
  if (r.bifurcation_overlap_area_mm2) r.total_sealing_area_mm2 += *r.bifurcation_overlap_area_mm2;
  r.verdict = adequate ? Verdict::kAdequate : Verdict::kInadequate;
  return r;
}

LimbSealingInput analyze_limb(const StentMesh& m, const FitGrid& f, double ring_threshold_pct) {
  LimbSealingInput in;
  in.limb = m.limb_id();
  in.per_ring_pct = per_ring_percentages(f);
  in.zones = separate_zones(f, ring_threshold_pct);
  in.proximal_area_mm2 = zone_area(m, f, in.zones.proximal);
  in.distal_area_mm2 = zone_area(m, f, in.zones.distal);
  return in;
}

}  // namespace stentsim
