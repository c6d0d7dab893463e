#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stentsim/vec3.hpp"

namespace stentsim {

inline constexpr float kLumenIntensity = 1000.0f;
inline constexpr float kBackgroundIntensity = 0.0f;
/// Half-max iso-level separating lumen from background.
inline constexpr double kWallIsoLevel = 500.0;

using Dims = std::array<int, 3>;

/// Scalar intensity grid with anisotropic spacing. Voxel (x, y, z) has its
/// centre at origin + (x*sx, y*sy, z*sz); data is stored x-fastest.
class VoxelVolume {
 public:
  VoxelVolume(Dims dims, Vec3 spacing_mm, Vec3 origin_mm, std::vector<float> data);
  VoxelVolume(Dims dims, Vec3 spacing_mm, Vec3 origin_mm, float fill = kBackgroundIntensity);

  const Dims& dims() const noexcept { return dims_; }
  const Vec3& spacing() const noexcept { return spacing_; }
  const Vec3& origin() const noexcept { return origin_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<const float> data() const noexcept { return data_; }

  std::size_t index(int x, int y, int z) const noexcept {
    return (static_cast<std::size_t>(z) * dims_[1] + y) * dims_[0] + x;
  }
  std::array<int, 3> coords(std::size_t idx) const noexcept;
  bool in_grid(int x, int y, int z) const noexcept {
    return x >= 0 && y >= 0 && z >= 0 && x < dims_[0] && y < dims_[1] && z < dims_[2];
  }

  float at(int x, int y, int z) const noexcept { return data_[index(x, y, z)]; }
  float at(std::size_t idx) const noexcept { return data_[idx]; }

  Vec3 voxel_center(int x, int y, int z) const noexcept;
  Vec3 voxel_center(std::size_t idx) const noexcept;

  /// Centres of the first and last voxel; the trilinear sampling domain.
  Vec3 bbox_min() const noexcept { return origin_; }
  Vec3 bbox_max() const noexcept;
  bool contains(const Vec3& p) const noexcept;

  double min_spacing() const noexcept;
  double max_spacing() const noexcept;

 private:
  Dims dims_;
  Vec3 spacing_;
  Vec3 origin_;
  std::vector<float> data_;
};

/// Trilinear interpolation of the eight surrounding voxels; points outside
/// the bounding box sample as background.
float sample_trilinear(const VoxelVolume& v, const Vec3& p);

enum class PhantomKind { kStraightTube, kCurvedTube, kFusiformAneurysm, kBifurcation };

std::string_view to_string(PhantomKind kind);
PhantomKind parse_phantom_kind(std::string_view name);

struct PhantomSpec {
  PhantomKind kind = PhantomKind::kStraightTube;
  double lumen_radius_mm = 5.0;
  double length_mm = 40.0;
  // fusiform_aneurysm: ellipsoidal bulge on the axis
  double bulge_radius_mm = 0.0;
  double bulge_center_fraction = 0.5;
  double bulge_extent_mm = 0.0;
  // bifurcation: full opening angle between the two branches
  double branch_angle_deg = 60.0;
  double branch_radius_mm = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

void validate(const PhantomSpec& spec);

struct SeedPair {
  Vec3 start_mm;
  Vec3 end_mm;
  std::string label;
};

/// Analytic solid of a phantom, placed in physical space.
///
/// Local frame: the vessel starts at the anchor and runs along +z. Curved
/// tubes bend towards +x along a quarter circle of arc length `length_mm`.
/// Bifurcations split at half length into two branches in the x-z plane
/// ("trunk-left" towards -x, "trunk-right" towards +x).
class PhantomGeometry {
 public:
  PhantomGeometry(const PhantomSpec& spec, Vec3 anchor_mm);

  /// Negative inside the lumen, zero on the wall.
  double signed_distance(const Vec3& p) const;

  /// Axis-aligned extent of the solid, world coordinates.
  Vec3 lower() const { return anchor_ + local_lower_; }
  Vec3 upper() const { return anchor_ + local_upper_; }
  const Vec3& anchor() const { return anchor_; }
  const PhantomSpec& spec() const { return spec_; }

  /// Seed points inset from the vessel ends, one pair per stent limb.
  std::vector<SeedPair> canonical_seeds(double inset_mm = 2.0) const;

 private:
  double local_sd(const Vec3& q) const;

  PhantomSpec spec_;
  Vec3 anchor_;
  Vec3 local_lower_;
  Vec3 local_upper_;
};

/// Centres the phantom in the box spanned by (dims, spacing) at origin 0.
/// Throws kGeometryOutOfBounds when the solid does not keep a 2 mm margin.
PhantomGeometry place_phantom(const PhantomSpec& spec, const Dims& dims, const Vec3& spacing_mm);

/// Smallest grid holding the phantom with `margin_mm` on every side.
Dims auto_dims(const PhantomSpec& spec, const Vec3& spacing_mm, double margin_mm = 4.0);

VoxelVolume generate_phantom(const PhantomSpec& spec, const Dims& dims, const Vec3& spacing_mm);

// SVOL: one JSON header line, then nx*ny*nz little-endian float32, x-fastest.
void write_svol(const VoxelVolume& v, std::ostream& out);
VoxelVolume read_svol(std::istream& in);
void save_volume(const VoxelVolume& v, const std::filesystem::path& path);
VoxelVolume load_volume(const std::filesystem::path& path);

}  // namespace stentsim
