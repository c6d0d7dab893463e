#include "stentsim/wall_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "stentsim/error.hpp"

namespace stentsim {

Vec3 ray_direction(const CenterlineSample& sample, int j, int segments) {
  const double theta = 2.0 * std::numbers::pi * j / segments;
  return sample.normal * std::cos(theta) + sample.binormal * std::sin(theta);
}

WallModel::WallModel(int rings, int segments)
    : rings_(rings),
      segments_(segments),
      radius_(static_cast<std::size_t>(rings) * segments),
      center_(static_cast<std::size_t>(rings)),
      dir_(static_cast<std::size_t>(rings) * segments) {}

std::size_t WallModel::slot(int i, int j) const {
  if (i < 0 || i >= rings_ || j < 0 || j >= segments_) {
    throw Error(ErrorCode::kIndexOutOfRange, "wall slot (" + std::to_string(i) + ", " +
                                                 std::to_string(j) + ") out of range");
  }
  return static_cast<std::size_t>(i) * segments_ + j;
}

std::optional<double> WallModel::wall_radius(int i, int j) const { return radius_[slot(i, j)]; }

const Vec3& WallModel::ring_center(int i) const { return center_[slot(i, 0) / segments_]; }

const Vec3& WallModel::ray_dir(int i, int j) const { return dir_[slot(i, j)]; }

void WallModel::set(int i, int j, std::optional<double> radius) { radius_[slot(i, j)] = radius; }

void WallModel::set_ring(int i, const Vec3& center) { center_[slot(i, 0) / segments_] = center; }

void WallModel::set_ray_dir(int i, int j, const Vec3& dir) { dir_[slot(i, j)] = dir; }

WallModel cast_wall_rays(const VoxelVolume& v, const Centerline& c, int segments, double r_max_mm,
                         double march_step_mm) {
  if (segments < 8) throw Error(ErrorCode::kInvalidArgument, "need at least 8 segments");
  if (!(r_max_mm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "r_max_mm must be positive");
  const double h = march_step_mm > 0.0 ? march_step_mm : 0.2 * v.min_spacing();
  const int rings = static_cast<int>(c.size());

  WallModel w(rings, segments);
  for (int i = 0; i < rings; ++i) {
    const auto& s = c[i];
    if (!v.contains(s.position)) {
      throw Error(ErrorCode::kOutsideVolume,
                  "centerline sample " + std::to_string(i) + " lies outside the volume");
    }
    w.set_ring(i, s.position);
    for (int j = 0; j < segments; ++j) {
      const Vec3 dir = ray_direction(s, j, segments);
      w.set_ray_dir(i, j, dir);

      double r_prev = 0.0;
      double v_prev = sample_trilinear(v, s.position);
      std::optional<double> found;
      if (v_prev >= kWallIsoLevel) {
        for (int k = 1; r_prev < r_max_mm; ++k) {
          const double r = std::min(k * h, r_max_mm);
          const double val = sample_trilinear(v, s.position + dir * r);
          if (val < kWallIsoLevel) {
            found = r_prev + (r - r_prev) * (v_prev - kWallIsoLevel) / (v_prev - val);
            break;
          }
          r_prev = r;
          v_prev = val;
        }
      }
      w.set(i, j, found);
    }
  }
  return w;
}

}  // namespace stentsim
