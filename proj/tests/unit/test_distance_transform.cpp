#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "stentsim/distance_transform.hpp"
#include "stentsim/volume.hpp"

using namespace stentsim;

namespace {

// Exhaustive oracle: distance from each lumen voxel centre to the nearest
// background voxel centre, where the one-voxel shell around the grid counts
// as background.
std::vector<double> brute_force_dt(const VoxelVolume& v, double threshold) {
  const Dims d = v.dims();
  const Vec3 s = v.spacing();
  std::vector<std::array<int, 3>> background;
  for (int z = -1; z <= d[2]; ++z) {
    for (int y = -1; y <= d[1]; ++y) {
      for (int x = -1; x <= d[0]; ++x) {
        if (!v.in_grid(x, y, z) || v.at(x, y, z) < threshold) background.push_back({x, y, z});
      }
    }
  }
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v.at(i) < threshold) continue;
    const auto c = v.coords(i);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : background) {
      const double dx = (c[0] - b[0]) * s.x, dy = (c[1] - b[1]) * s.y, dz = (c[2] - b[2]) * s.z;
      best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    out[i] = best;
  }
  return out;
}

}  // namespace

TEST(DistanceTransform, MatchesBruteForceOnRandomAnisotropicGrids) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Dims dims{2 + static_cast<int>(u(rng) * 7), 2 + static_cast<int>(u(rng) * 7),
                    2 + static_cast<int>(u(rng) * 7)};
    const Vec3 spacing{0.5 + u(rng), 0.5 + u(rng), 0.5 + 2 * u(rng)};
    const double fill = 0.6 + 0.35 * u(rng);
    std::vector<float> data(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]);
    for (auto& x : data) x = u(rng) < fill ? 1000.0f : 0.0f;
    const VoxelVolume v(dims, spacing, {}, data);
    const auto got = distance_to_background(v, 500.0);
    const auto want = brute_force_dt(v, 500.0);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9) << "trial " << trial;
  }
}

TEST(DistanceTransform, TubeAxisIsFarthestFromWall) {
  PhantomSpec s;
  s.lumen_radius_mm = 2.0;
  s.length_mm = 1.0;
  const VoxelVolume v = generate_phantom(s, Dims{9, 9, 9}, {1, 1, 1});
  const auto dt = distance_to_background(v, 500.0);
  const auto want = brute_force_dt(v, 500.0);
  for (std::size_t i = 0; i < dt.size(); ++i) EXPECT_NEAR(dt[i], want[i], 1e-9);
}

TEST(DistanceTransform, BackgroundIsZeroAndSolidBlockMeasuresToTheBorder) {
  const VoxelVolume solid(Dims{5, 3, 7}, {1, 2, 1}, {}, 1000.0f);
  const auto dt = distance_to_background(solid, 500.0);
  // x: 3 voxels of 1 mm to the shell; y: 2 of 2 mm; z: 4 of 1 mm.
  EXPECT_DOUBLE_EQ(dt[solid.index(2, 1, 3)], 3.0);
  const VoxelVolume empty(Dims{3, 3, 3}, {1, 1, 1}, {}, 0.0f);
  for (double d : distance_to_background(empty, 500.0)) EXPECT_EQ(d, 0.0);
}
