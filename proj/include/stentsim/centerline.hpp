#pragma once

#include <span>
#include <vector>

#include "stentsim/graph.hpp"
#include "stentsim/vec3.hpp"

namespace stentsim {

struct CenterlineSample {
  Vec3 position;
  Vec3 tangent;
  Vec3 normal;
  Vec3 binormal;
  double arclen = 0.0;
};

/// Arc-length parameterised curve with a rotation-minimising frame at each
/// sample; (tangent, normal, binormal) is right-handed.
struct Centerline {
  std::vector<CenterlineSample> samples;
  double step_mm = 1.0;

  std::size_t size() const noexcept { return samples.size(); }
  const CenterlineSample& operator[](std::size_t i) const { return samples[i]; }
  double length() const noexcept { return samples.empty() ? 0.0 : samples.back().arclen; }
};

/// Centred moving average; the window shrinks symmetrically at the ends so
/// the endpoints stay put.
std::vector<Vec3> smooth_polyline(std::span<const Vec3> points, int half_window = 2);

/// Smooths (window 5), resamples at uniform arc length and transports an
/// initial normal (global +x projected, +y if nearly parallel) by double
/// reflection.
Centerline resample_and_frame(std::span<const Vec3> points, double step_mm = 1.0);

Centerline resample_and_frame(const VoxelGraph& g, const VoxelPath& path, double step_mm = 1.0);

/// Initial normal rule shared by framing and its tests.
Vec3 initial_normal(const Vec3& tangent);

}  // namespace stentsim
