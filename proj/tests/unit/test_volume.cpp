#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include "stentsim/error.hpp"
#include "stentsim/volume.hpp"

using namespace stentsim;

namespace {

PhantomSpec tube(double r = 5.0, double len = 40.0) {
  PhantomSpec s;
  s.kind = PhantomKind::kStraightTube;
  s.lumen_radius_mm = r;
  s.length_mm = len;
  return s;
}

PhantomSpec fusiform() {
  PhantomSpec s;
  s.kind = PhantomKind::kFusiformAneurysm;
  s.lumen_radius_mm = 8.0;
  s.length_mm = 80.0;
  s.bulge_radius_mm = 20.0;
  s.bulge_extent_mm = 40.0;
  return s;
}

template <typename Code>
void expect_code(Code code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "no error raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(Phantom, AxisIsLumenFarFieldIsBackground) {
  const auto spec = tube();
  const Dims dims = auto_dims(spec, {1, 1, 1});
  const auto v = generate_phantom(spec, dims, {1, 1, 1});
  const auto g = place_phantom(spec, dims, {1, 1, 1});
  const Vec3 axis = g.anchor() + Vec3{0, 0, 20};
  EXPECT_FLOAT_EQ(sample_trilinear(v, axis), 1000.0f);
  EXPECT_FLOAT_EQ(sample_trilinear(v, axis + Vec3{7.0, 7.0, 0.0}), 0.0f);  // 9.9 mm off axis
  EXPECT_FLOAT_EQ(sample_trilinear(v, g.anchor() + Vec3{0, 10, 20} - Vec3{0, 1.5, 0}), 0.0f);
}

TEST(Phantom, FusiformVolumeMatchesMonteCarloOracle) {
  const auto spec = fusiform();
  const Vec3 spacing{1, 1, 1};
  const Dims dims = auto_dims(spec, spacing);
  const auto v = generate_phantom(spec, dims, spacing);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < v.size(); ++i) inside += v.at(i) > 500.0f ? 1 : 0;
  const double raster = static_cast<double>(inside);  // 1 mm^3 voxels

  // Independent membership test of tube U ellipsoid in the phantom's own frame.
  const double r = spec.lumen_radius_mm, len = spec.length_mm, b = spec.bulge_radius_mm;
  const double zc = spec.bulge_center_fraction * len, c = spec.bulge_extent_mm / 2;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-b, b), uz(0.0, len);
  const int n = 2'000'000;
  int hits = 0;
  for (int k = 0; k < n; ++k) {
    const double x = ux(rng), y = ux(rng), z = uz(rng);
    const bool in_tube = x * x + y * y < r * r;
    const bool in_bulge = (x * x + y * y) / (b * b) + (z - zc) * (z - zc) / (c * c) < 1.0;
    hits += (in_tube || in_bulge) ? 1 : 0;
  }
  const double analytic = (2 * b) * (2 * b) * len * hits / n;
  EXPECT_NEAR(raster / analytic, 1.0, 0.03);
}

TEST(Phantom, DeterministicForFixedSeed) {
  auto spec = tube();
  spec.noise_sigma = 25.0;
  spec.seed = 7;
  const Dims dims = auto_dims(spec, {1, 1, 1});
  const auto a = generate_phantom(spec, dims, {1, 1, 1});
  const auto b = generate_phantom(spec, dims, {1, 1, 1});
  ASSERT_EQ(a.size(), b.size());
  EXPECT_TRUE(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
  spec.seed = 8;
  const auto c = generate_phantom(spec, dims, {1, 1, 1});
  EXPECT_FALSE(std::equal(a.data().begin(), a.data().end(), c.data().begin()));
}

TEST(Phantom, NoiseFreeTubeIsAxisymmetric) {
  const auto spec = tube(5.0, 30.0);
  const Vec3 spacing{0.7, 0.7, 1.0};
  const Dims dims = auto_dims(spec, spacing);
  const auto v = generate_phantom(spec, dims, spacing);
  const auto g = place_phantom(spec, dims, spacing);
  // Rasterization is axisymmetric in the analytic field, so compare the
  // generator's per-voxel value against the ramp of the voxel's radius.
  for (std::size_t i = 0; i < v.size(); i += 37) {
    const Vec3 p = v.voxel_center(i) - g.anchor();
    if (p.z < 1.0 || p.z > 29.0) continue;
    const double sd = std::hypot(p.x, p.y) - 5.0;
    const double want = 1000.0 * std::clamp(0.5 - sd / 1.0, 0.0, 1.0);
    EXPECT_NEAR(v.at(i), want, 1e-3);
  }
}

TEST(Phantom, RejectsBadSpecsAndTightBoxes) {
  auto spec = fusiform();
  spec.bulge_radius_mm = spec.lumen_radius_mm;
  expect_code(ErrorCode::kInvalidArgument, [&] { validate(spec); });
  expect_code(ErrorCode::kGeometryOutOfBounds,
              [&] { generate_phantom(tube(), Dims{12, 12, 50}, {1, 1, 1}); });
  expect_code(ErrorCode::kInvalidArgument,
              [&] { generate_phantom(tube(), Dims{20, 20, 50}, {0, 1, 1}); });
}

TEST(Phantom, AutoDimsAreOddAndFit) {
  for (auto kind : {PhantomKind::kStraightTube, PhantomKind::kCurvedTube,
                    PhantomKind::kFusiformAneurysm, PhantomKind::kBifurcation}) {
    PhantomSpec s = fusiform();
    s.kind = kind;
    s.branch_radius_mm = 5.0;
    const Dims d = auto_dims(s, {0.8, 0.8, 1.2});
    for (int n : d) EXPECT_EQ(n % 2, 1);
    EXPECT_NO_THROW(place_phantom(s, d, {0.8, 0.8, 1.2})) << to_string(kind);
  }
}

TEST(Phantom, CanonicalSeedsLieInLumen) {
  for (auto kind : {PhantomKind::kStraightTube, PhantomKind::kCurvedTube,
                    PhantomKind::kFusiformAneurysm, PhantomKind::kBifurcation}) {
    PhantomSpec s = fusiform();
    s.kind = kind;
    s.branch_radius_mm = 5.0;
    const Dims d = auto_dims(s, {1, 1, 1});
    const auto g = place_phantom(s, d, {1, 1, 1});
    const auto seeds = g.canonical_seeds();
    EXPECT_EQ(seeds.size(), kind == PhantomKind::kBifurcation ? 2u : 1u);
    for (const auto& p : seeds) {
      EXPECT_LT(g.signed_distance(p.start_mm), -1.0);
      EXPECT_LT(g.signed_distance(p.end_mm), -1.0);
    }
  }
}

TEST(Trilinear, InterpolationIdentities) {
  VoxelVolume v(Dims{4, 3, 3}, {2.0, 1.0, 1.0}, {10.0, 0.0, 0.0});
  std::vector<float> data(v.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = v.coords(i)[0] == 0 ? 0.0f : 1000.0f;
  const VoxelVolume w(v.dims(), v.spacing(), v.origin(), data);
  EXPECT_FLOAT_EQ(sample_trilinear(w, w.voxel_center(1, 1, 1)), 1000.0f);
  EXPECT_FLOAT_EQ(sample_trilinear(w, w.voxel_center(0, 2, 1)), 0.0f);
  EXPECT_FLOAT_EQ(sample_trilinear(w, {11.0, 1.0, 1.0}), 500.0f);
  EXPECT_FLOAT_EQ(sample_trilinear(w, {9.0, 1.0, 1.0}), 0.0f);  // outside the box

  const VoxelVolume flat(Dims{5, 5, 5}, {1, 1, 1}, {}, 1000.0f);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int k = 0; k < 200; ++k) EXPECT_FLOAT_EQ(sample_trilinear(flat, {u(rng), u(rng), u(rng)}), 1000.0f);
}

TEST(Trilinear, ReproducesLinearFields) {
  const Dims dims{6, 5, 4};
  const Vec3 spacing{0.5, 1.5, 2.0};
  VoxelVolume shape(dims, spacing, {-1, 2, 3});
  std::vector<float> data(shape.size());
  const auto field = [](const Vec3& p) { return 3.0 * p.x - 2.0 * p.y + 0.5 * p.z + 7.0; };
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(field(shape.voxel_center(i)));
  const VoxelVolume v(dims, spacing, shape.origin(), data);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const Vec3 lo = v.bbox_min(), hi = v.bbox_max();
    const Vec3 p{lo.x + t(rng) * (hi.x - lo.x), lo.y + t(rng) * (hi.y - lo.y), lo.z + t(rng) * (hi.z - lo.z)};
    EXPECT_NEAR(sample_trilinear(v, p), field(p), 1e-4);
  }
}

TEST(Svol, RoundTripIsBitIdentical) {
  auto spec = tube(5.0, 8.0);
  spec.noise_sigma = 3.0;
  const auto v = generate_phantom(spec, Dims{16, 16, 16}, {1, 1, 1});
  std::stringstream buf;
  write_svol(v, buf);
  const auto w = read_svol(buf);
  EXPECT_EQ(w.dims(), v.dims());
  EXPECT_EQ(std::memcmp(w.data().data(), v.data().data(), v.data().size_bytes()), 0);
  EXPECT_EQ(w.origin(), v.origin());
  EXPECT_EQ(w.spacing(), v.spacing());
}

TEST(Svol, HeaderIsTheDocumentedJsonLine) {
  const VoxelVolume v(Dims{2, 3, 4}, {1, 1, 2}, {0, 0, 0}, 1.0f);
  std::stringstream buf;
  write_svol(v, buf);
  std::string line;
  std::getline(buf, line);
  EXPECT_EQ(line,
            R"({"magic":"SVOL1","dims":[2,3,4],"spacing_mm":[1.0,1.0,2.0],"origin_mm":[0.0,0.0,0.0],"dtype":"f32le"})");
  std::string rest((std::istreambuf_iterator<char>(buf)), {});
  EXPECT_EQ(rest.size(), 24u * 4u);
}

TEST(Svol, ErrorsAreClassified) {
  const VoxelVolume v(Dims{8, 8, 8}, {1, 1, 1}, {}, 5.0f);
  std::stringstream full;
  write_svol(v, full);
  const std::string bytes = full.str();
  const std::string header = bytes.substr(0, bytes.find('\n') + 1);

  std::stringstream truncated(header + std::string(7 * 7 * 7 * 4, '\0'));
  expect_code(ErrorCode::kTruncatedPayload, [&] { read_svol(truncated); });

  std::stringstream longer(bytes + "xxxx");
  expect_code(ErrorCode::kDimensionMismatch, [&] { read_svol(longer); });

  std::stringstream garbage("{not json\n");
  expect_code(ErrorCode::kMalformedHeader, [&] { read_svol(garbage); });

  std::stringstream magic(R"({"magic":"NOPE","dims":[2,2,2],"spacing_mm":[1,1,1],"origin_mm":[0,0,0],"dtype":"f32le"})"
                          "\n");
  expect_code(ErrorCode::kMalformedHeader, [&] { read_svol(magic); });

  expect_code(ErrorCode::kIo, [&] { load_volume("/nonexistent/dir/x.svol"); });
}

TEST(Volume, RejectsSizeMismatch) {
  expect_code(ErrorCode::kDimensionMismatch,
              [&] { VoxelVolume(Dims{2, 2, 2}, {1, 1, 1}, {}, std::vector<float>(7)); });
}
