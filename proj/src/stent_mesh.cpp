#include "stentsim/stent_mesh.hpp"

#include <string>

#include "stentsim/error.hpp"
#include "stentsim/wall_model.hpp"

namespace stentsim {

std::string_view to_string(StentKind kind) { return kind == StentKind::kY ? "Y" : "I"; }

StentKind parse_stent_kind(std::string_view name) {
  if (name == "I") return StentKind::kI;
  if (name == "Y") return StentKind::kY;
  throw Error(ErrorCode::kInvalidArgument, "stent kind must be \"I\" or \"Y\"");
}

void validate(const StentSpec& spec) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (spec.segments < 8) fail("segments must be >= 8");
  if (spec.min_rings < 4) fail("rings must be >= 4");
  if (!(spec.initial_radius_mm > 0.0)) fail("initial_radius_mm must be positive");
  if (spec.kind == StentKind::kI) {
    if (!(spec.diameter_mm > 0.0)) fail("diameter_mm must be positive");
    if (!(spec.initial_radius_mm < spec.diameter_mm / 2)) {
      fail("initial_radius_mm must be below diameter_mm / 2");
    }
  } else {
    if (!(spec.trunk_diameter_mm > 0.0)) fail("trunk_diameter_mm must be positive");
    if (!(spec.limb_diameter_mm > 0.0)) fail("limb_diameter_mm must be positive");
    if (!(spec.initial_radius_mm < spec.limb_diameter_mm / 2 &&
          spec.initial_radius_mm < spec.trunk_diameter_mm / 2)) {
      fail("initial_radius_mm must be below both device radii");
    }
  }
}

StentMesh::StentMesh(std::string limb_id, const Centerline& c, int segments,
                     double initial_radius_mm, std::vector<double> target_radius_mm)
    : limb_id_(std::move(limb_id)),
      rings_(static_cast<int>(c.size())),
      segments_(segments),
      target_(std::move(target_radius_mm)),
      collides_(c.size(), 1) {
  if (segments_ < 8) throw Error(ErrorCode::kInvalidArgument, "need at least 8 segments");
  if (rings_ < 2) throw Error(ErrorCode::kCenterlineTooShort, "need at least 2 rings");
  if (target_.size() != c.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one target radius per ring required");
  }
  centers_.reserve(rings_);
  tangents_.reserve(rings_);
  dirs_.reserve(static_cast<std::size_t>(rings_) * segments_);
  vertices_.reserve(static_cast<std::size_t>(rings_) * segments_);
  for (int i = 0; i < rings_; ++i) {
    centers_.push_back(c[i].position);
    tangents_.push_back(c[i].tangent);
    for (int j = 0; j < segments_; ++j) {
      const Vec3 dir = ray_direction(c[i], j, segments_);
      dirs_.push_back(dir);
      vertices_.push_back(c[i].position + dir * initial_radius_mm);
    }
  }
  // Quad (i,j)-(i,j+1)-(i+1,j+1)-(i+1,j), split along its (i,j)-(i+1,j+1)
  // diagonal; winding gives outward normals.
  triangles_.reserve(2 * static_cast<std::size_t>(rings_ - 1) * segments_);
  for (int i = 0; i + 1 < rings_; ++i) {
    for (int j = 0; j < segments_; ++j) {
      const int jn = (j + 1) % segments_;
      const int a = vertex_id(i, j);
      const int b = vertex_id(i, jn);
      const int cc = vertex_id(i + 1, jn);
      const int d = vertex_id(i + 1, j);
      triangles_.push_back({a, b, cc});
      triangles_.push_back({a, cc, d});
    }
  }
}

std::size_t StentMesh::slot(int i, int j) const {
  if (i < 0 || i >= rings_ || j < 0 || j >= segments_) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "vertex (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
  }
  return static_cast<std::size_t>(i) * segments_ + j;
}

const Vec3& StentMesh::vertex(int i, int j) const { return vertices_[slot(i, j)]; }

void StentMesh::set_vertex(int i, int j, const Vec3& p) { vertices_[slot(i, j)] = p; }

void StentMesh::set_radius(int i, int j, double radius) {
  const std::size_t s = slot(i, j);
  vertices_[s] = centers_[i] + dirs_[s] * radius;
}

const Vec3& StentMesh::ray_dir(int i, int j) const { return dirs_[slot(i, j)]; }

double StentMesh::ring_spacing(int i) const {
  if (i < 0 || i + 1 >= rings_) throw Error(ErrorCode::kIndexOutOfRange, "no ring after " + std::to_string(i));
  return distance(centers_[i], centers_[i + 1]);
}

StentMesh build_initial_stent(const Centerline& c, const StentSpec& spec, std::string limb_id) {
  validate(spec);
  if (static_cast<int>(c.size()) < spec.min_rings) {
    throw Error(ErrorCode::kCenterlineTooShort,
                "centerline has " + std::to_string(c.size()) + " samples, stent needs " +
                    std::to_string(spec.min_rings) + " rings");
  }
  const double target =
      0.5 * (spec.kind == StentKind::kI ? spec.diameter_mm : spec.limb_diameter_mm);
  return StentMesh(std::move(limb_id), c, spec.segments, spec.initial_radius_mm,
                   std::vector<double>(c.size(), target));
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

double surface_area(const StentMesh& m) {
  double area = 0.0;
  const auto v = m.vertices();
  for (const auto& t : m.triangles()) area += triangle_area(v[t[0]], v[t[1]], v[t[2]]);
  return area;
}

double surface_area(const StentMesh& m, std::span<const int> triangle_subset) {
  const auto tris = m.triangles();
  const auto v = m.vertices();
  double area = 0.0;
  for (int idx : triangle_subset) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= tris.size()) {
      throw Error(ErrorCode::kIndexOutOfRange, "triangle " + std::to_string(idx) + " out of range");
    }
    const auto& t = tris[idx];
    area += triangle_area(v[t[0]], v[t[1]], v[t[2]]);
  }
  return area;
}

double stent_radius(const StentMesh& m, int i, int j) {
  const Vec3 d = m.vertex(i, j) - m.ring_center(i);
  const Vec3& t = m.ring_tangent(i);
  return norm(d - t * dot(d, t));
}

}  // namespace stentsim
