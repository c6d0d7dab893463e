#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stentsim/centerline.hpp"
#include "stentsim/vec3.hpp"

namespace stentsim {

enum class StentKind { kI, kY };

std::string_view to_string(StentKind kind);
StentKind parse_stent_kind(std::string_view name);

struct StentSpec {
  StentKind kind = StentKind::kI;
  double diameter_mm = 19.0;        // I-stent device diameter
  double trunk_diameter_mm = 0.0;   // Y-stent main body
  double limb_diameter_mm = 0.0;    // Y-stent legs
  int min_rings = 4;
  int segments = 32;
  double initial_radius_mm = 1.0;
};

void validate(const StentSpec& spec);

using Triangle = std::array<int, 3>;

/// Tubular stent surface on a fixed (ring, segment) grid.
///
/// Vertex (i, j) has id i*S + j; ring 0 is proximal. Each vertex lives on the
/// ray from its ring centre along ray_dir(i, j), so expansion only changes
/// radii. The triangle list is built once and never changes.
class StentMesh {
 public:
  StentMesh(std::string limb_id, const Centerline& c, int segments, double initial_radius_mm,
            std::vector<double> target_radius_mm);

  const std::string& limb_id() const noexcept { return limb_id_; }
  int rings() const noexcept { return rings_; }
  int segments() const noexcept { return segments_; }
  int vertex_id(int i, int j) const noexcept { return i * segments_ + j; }

  std::span<const Vec3> vertices() const noexcept { return vertices_; }
  const Vec3& vertex(int i, int j) const;
  void set_vertex(int i, int j, const Vec3& p);
  /// Places vertex (i, j) at `radius` along its ray.
  void set_radius(int i, int j, double radius);

  std::span<const Triangle> triangles() const noexcept { return triangles_; }

  const Vec3& ring_center(int i) const { return centers_.at(i); }
  const Vec3& ring_tangent(int i) const { return tangents_.at(i); }
  const Vec3& ray_dir(int i, int j) const;
  /// Distance between the centres of rings i and i+1.
  double ring_spacing(int i) const;

  double target_radius(int i) const { return target_.at(i); }
  std::span<const double> target_radii() const noexcept { return target_; }
  void set_target_radius(int i, double r) { target_.at(i) = r; }

  /// Rings taking part in self-collision (all by default).
  bool collides(int i) const { return collides_.at(i) != 0; }
  void set_collides(int i, bool on) { collides_.at(i) = on ? 1 : 0; }

 private:
  std::size_t slot(int i, int j) const;

  std::string limb_id_;
  int rings_;
  int segments_;
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Vec3> centers_;
  std::vector<Vec3> tangents_;
  std::vector<Vec3> dirs_;
  std::vector<double> target_;
  std::vector<unsigned char> collides_;
};

/// Radial rays of length initial_radius from every centerline sample; the
/// device radius (diameter / 2) becomes every ring's target radius.
StentMesh build_initial_stent(const Centerline& c, const StentSpec& spec,
                              std::string limb_id = "main");

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

double surface_area(const StentMesh& m);
double surface_area(const StentMesh& m, std::span<const int> triangle_subset);

/// Distance of vertex (i, j) from its ring centre, within the ring plane.
double stent_radius(const StentMesh& m, int i, int j);

}  // namespace stentsim
