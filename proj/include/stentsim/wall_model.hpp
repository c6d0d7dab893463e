#pragma once

#include <optional>
#include <vector>

#include "stentsim/centerline.hpp"
#include "stentsim/vec3.hpp"
#include "stentsim/volume.hpp"

namespace stentsim {

/// In-plane direction of angular slot j at a centerline sample:
/// cos(2*pi*j/S) * normal + sin(2*pi*j/S) * binormal.
Vec3 ray_direction(const CenterlineSample& sample, int j, int segments);

/// Lumen boundary radius per (ring, angular slot), measured in the plane
/// perpendicular to the centerline. An empty slot means no wall was found
/// within reach; callers read it as a loose fit.
class WallModel {
 public:
  WallModel() = default;
  WallModel(int rings, int segments);

  int rings() const noexcept { return rings_; }
  int segments() const noexcept { return segments_; }

  std::optional<double> wall_radius(int i, int j) const;
  const Vec3& ring_center(int i) const;
  const Vec3& ray_dir(int i, int j) const;

  void set(int i, int j, std::optional<double> radius);
  void set_ring(int i, const Vec3& center);
  void set_ray_dir(int i, int j, const Vec3& dir);

 private:
  std::size_t slot(int i, int j) const;

  int rings_ = 0;
  int segments_ = 0;
  std::vector<std::optional<double>> radius_;
  std::vector<Vec3> center_;
  std::vector<Vec3> dir_;
};

/// Marches each ray from the ring centre and reports the first downward
/// crossing of the half-max iso-level, refined by linear interpolation
/// between the bracketing samples. `march_step_mm` <= 0 selects
/// 0.2 * min(spacing).
WallModel cast_wall_rays(const VoxelVolume& v, const Centerline& c, int segments, double r_max_mm,
                         double march_step_mm = 0.0);

}  // namespace stentsim
