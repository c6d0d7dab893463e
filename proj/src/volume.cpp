#include "stentsim/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "stentsim/error.hpp"

namespace stentsim {

namespace {

double capped_cylinder_sd(const Vec3& p, const Vec3& a, const Vec3& b, double r) {
  const Vec3 ba = b - a;
  const Vec3 pa = p - a;
  const double len = norm(ba);
  const double t = dot(pa, ba) / (len * len);
  const double radial = norm(pa - ba * t) - r;
  const double axial = (std::abs(t - 0.5) - 0.5) * len;
  const double inner = std::max(radial, axial);
  if (inner < 0.0) return inner;
  const double rx = std::max(radial, 0.0);
  const double ax = std::max(axial, 0.0);
  return std::sqrt(rx * rx + ax * ax);
}

// Exact zero set; approximate distance elsewhere, which only shapes the ramp.
double ellipsoid_sd(const Vec3& p, const Vec3& c, const Vec3& radii) {
  const Vec3 q = p - c;
  const Vec3 s1{q.x / radii.x, q.y / radii.y, q.z / radii.z};
  const Vec3 s2{s1.x / radii.x, s1.y / radii.y, s1.z / radii.z};
  const double k0 = norm(s1);
  const double k1 = norm(s2);
  if (k1 == 0.0) return -std::min({radii.x, radii.y, radii.z});
  return k0 * (k0 - 1.0) / k1;
}

double quarter_arc_bend_radius(const PhantomSpec& spec) {
  return 2.0 * spec.length_mm / std::numbers::pi;
}

Vec3 branch_direction(const PhantomSpec& spec, double side) {
  const double half = 0.5 * spec.branch_angle_deg * std::numbers::pi / 180.0;
  return {side * std::sin(half), 0.0, std::cos(half)};
}

void check_grid(const Dims& dims, const Vec3& spacing) {
  for (int n : dims) {
    if (n < 2) throw Error(ErrorCode::kInvalidArgument, "volume dims must be >= 2");
  }
  if (!(spacing.x > 0.0 && spacing.y > 0.0 && spacing.z > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "voxel spacing must be positive");
  }
}

}  // namespace

VoxelVolume::VoxelVolume(Dims dims, Vec3 spacing_mm, Vec3 origin_mm, std::vector<float> data)
    : dims_(dims), spacing_(spacing_mm), origin_(origin_mm), data_(std::move(data)) {
  check_grid(dims_, spacing_);
  const std::size_t expected = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  if (data_.size() != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                "volume data holds " + std::to_string(data_.size()) + " values, dims require " +
                    std::to_string(expected));
  }
}

VoxelVolume::VoxelVolume(Dims dims, Vec3 spacing_mm, Vec3 origin_mm, float fill)
    : VoxelVolume(dims, spacing_mm, origin_mm,
                  std::vector<float>(static_cast<std::size_t>(std::max(dims[0], 0)) *
                                         std::max(dims[1], 0) * std::max(dims[2], 0),
                                     fill)) {}

std::array<int, 3> VoxelVolume::coords(std::size_t idx) const noexcept {
  const auto nx = static_cast<std::size_t>(dims_[0]);
  const auto ny = static_cast<std::size_t>(dims_[1]);
  return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny),
          static_cast<int>(idx / (nx * ny))};
}

Vec3 VoxelVolume::voxel_center(int x, int y, int z) const noexcept {
  return {origin_.x + x * spacing_.x, origin_.y + y * spacing_.y, origin_.z + z * spacing_.z};
}

Vec3 VoxelVolume::voxel_center(std::size_t idx) const noexcept {
  const auto c = coords(idx);
  return voxel_center(c[0], c[1], c[2]);
}

Vec3 VoxelVolume::bbox_max() const noexcept {
  return voxel_center(dims_[0] - 1, dims_[1] - 1, dims_[2] - 1);
}

bool VoxelVolume::contains(const Vec3& p) const noexcept {
  const Vec3 hi = bbox_max();
  return p.x >= origin_.x && p.y >= origin_.y && p.z >= origin_.z && p.x <= hi.x &&
         p.y <= hi.y && p.z <= hi.z;
}

double VoxelVolume::min_spacing() const noexcept {
  return std::min({spacing_.x, spacing_.y, spacing_.z});
}

double VoxelVolume::max_spacing() const noexcept {
  return std::max({spacing_.x, spacing_.y, spacing_.z});
}

float sample_trilinear(const VoxelVolume& v, const Vec3& p) {
  if (!v.contains(p)) return kBackgroundIntensity;
  const Vec3 rel = p - v.origin();
  const double g[3] = {rel.x / v.spacing().x, rel.y / v.spacing().y, rel.z / v.spacing().z};
  int i0[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    i0[a] = std::min(static_cast<int>(std::floor(g[a])), v.dims()[a] - 2);
    f[a] = g[a] - i0[a];
  }
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    const double wz = dz ? f[2] : 1.0 - f[2];
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? f[1] : 1.0 - f[1];
      for (int dx = 0; dx < 2; ++dx) {
        const double wx = dx ? f[0] : 1.0 - f[0];
        acc += wx * wy * wz * v.at(i0[0] + dx, i0[1] + dy, i0[2] + dz);
      }
    }
  }
  return static_cast<float>(acc);
}

std::string_view to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::kStraightTube: return "straight_tube";
    case PhantomKind::kCurvedTube: return "curved_tube";
    case PhantomKind::kFusiformAneurysm: return "fusiform_aneurysm";
    case PhantomKind::kBifurcation: return "bifurcation";
  }
  return "unknown";
}

PhantomKind parse_phantom_kind(std::string_view name) {
  for (auto k : {PhantomKind::kStraightTube, PhantomKind::kCurvedTube,
                 PhantomKind::kFusiformAneurysm, PhantomKind::kBifurcation}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown phantom kind '" + std::string(name) + "'");
}

void validate(const PhantomSpec& spec) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (!(spec.lumen_radius_mm > 0.0)) fail("lumen_radius_mm must be positive");
  if (!(spec.length_mm > 0.0)) fail("length_mm must be positive");
  if (!(spec.noise_sigma >= 0.0)) fail("noise_sigma must be non-negative");
  if (spec.kind == PhantomKind::kFusiformAneurysm) {
    if (!(spec.bulge_radius_mm > spec.lumen_radius_mm)) {
      fail("bulge_radius_mm must exceed lumen_radius_mm");
    }
    if (!(spec.bulge_center_fraction > 0.0 && spec.bulge_center_fraction < 1.0)) {
      fail("bulge_center_fraction must lie in (0, 1)");
    }
    if (!(spec.bulge_extent_mm > 0.0)) fail("bulge_extent_mm must be positive");
  }
  if (spec.kind == PhantomKind::kBifurcation) {
    if (!(spec.branch_angle_deg > 0.0 && spec.branch_angle_deg < 180.0)) {
      fail("branch_angle_deg must lie in (0, 180)");
    }
    if (!(spec.branch_radius_mm > 0.0)) fail("branch_radius_mm must be positive");
  }
}

PhantomGeometry::PhantomGeometry(const PhantomSpec& spec, Vec3 anchor_mm)
    : spec_(spec), anchor_(anchor_mm) {
  validate(spec_);
  const double r = spec_.lumen_radius_mm;
  const double len = spec_.length_mm;
  switch (spec_.kind) {
    case PhantomKind::kStraightTube:
      local_lower_ = {-r, -r, 0.0};
      local_upper_ = {r, r, len};
      break;
    case PhantomKind::kCurvedTube: {
      const double bend = quarter_arc_bend_radius(spec_);
      local_lower_ = {-r, -r, 0.0};
      local_upper_ = {bend, r, bend + r};
      break;
    }
    case PhantomKind::kFusiformAneurysm: {
      const double w = std::max(r, spec_.bulge_radius_mm);
      const double zc = spec_.bulge_center_fraction * len;
      const double half = 0.5 * spec_.bulge_extent_mm;
      local_lower_ = {-w, -w, std::min(0.0, zc - half)};
      local_upper_ = {w, w, std::max(len, zc + half)};
      break;
    }
    case PhantomKind::kBifurcation: {
      const double half = 0.5 * len;
      const double rb = spec_.branch_radius_mm;
      const Vec3 split{0.0, 0.0, half};
      const Vec3 tip = split + branch_direction(spec_, 1.0) * half;
      local_lower_ = {std::min(-r, -tip.x - rb), -std::max(r, rb), 0.0};
      local_upper_ = {std::max(r, tip.x + rb), std::max(r, rb),
                      std::max(half + r, tip.z + rb)};
      break;
    }
  }
}

double PhantomGeometry::signed_distance(const Vec3& p) const { return local_sd(p - anchor_); }

double PhantomGeometry::local_sd(const Vec3& q) const {
  const double r = spec_.lumen_radius_mm;
  const double len = spec_.length_mm;
  switch (spec_.kind) {
    case PhantomKind::kStraightTube:
      return capped_cylinder_sd(q, {0, 0, 0}, {0, 0, len}, r);
    case PhantomKind::kCurvedTube: {
      const double bend = quarter_arc_bend_radius(spec_);
      const Vec3 c = q - Vec3{bend, 0.0, 0.0};
      const double in_plane = std::hypot(c.x, c.z);
      const double radial = std::hypot(in_plane - bend, c.y) - r;
      const double cap = std::max(-c.z, c.x);
      const double inner = std::max(radial, cap);
      if (inner < 0.0) return inner;
      return std::hypot(std::max(radial, 0.0), std::max(cap, 0.0));
    }
    case PhantomKind::kFusiformAneurysm: {
      const double tube = capped_cylinder_sd(q, {0, 0, 0}, {0, 0, len}, r);
      const double b = spec_.bulge_radius_mm;
      const double bulge = ellipsoid_sd(q, {0.0, 0.0, spec_.bulge_center_fraction * len},
                                        {b, b, 0.5 * spec_.bulge_extent_mm});
      return std::min(tube, bulge);
    }
    case PhantomKind::kBifurcation: {
      const double half = 0.5 * len;
      const Vec3 split{0.0, 0.0, half};
      const double trunk = capped_cylinder_sd(q, {0, 0, 0}, split, r);
      const double junction = norm(q - split) - r;
      const double rb = spec_.branch_radius_mm;
      const double left =
          capped_cylinder_sd(q, split, split + branch_direction(spec_, -1.0) * half, rb);
      const double right =
          capped_cylinder_sd(q, split, split + branch_direction(spec_, 1.0) * half, rb);
      return std::min({trunk, junction, left, right});
    }
  }
  return 1.0;
}

std::vector<SeedPair> PhantomGeometry::canonical_seeds(double inset_mm) const {
  const double len = spec_.length_mm;
  switch (spec_.kind) {
    case PhantomKind::kStraightTube:
    case PhantomKind::kFusiformAneurysm:
      return {{anchor_ + Vec3{0, 0, inset_mm}, anchor_ + Vec3{0, 0, len - inset_mm}, "main"}};
    case PhantomKind::kCurvedTube: {
      const double bend = quarter_arc_bend_radius(spec_);
      auto on_arc = [&](double s) {
        const double a = s / bend;
        return anchor_ + Vec3{bend - bend * std::cos(a), 0.0, bend * std::sin(a)};
      };
      return {{on_arc(inset_mm), on_arc(len - inset_mm), "main"}};
    }
    case PhantomKind::kBifurcation: {
      const double half = 0.5 * len;
      const Vec3 start = anchor_ + Vec3{0, 0, inset_mm};
      const Vec3 split = anchor_ + Vec3{0, 0, half};
      return {{start, split + branch_direction(spec_, -1.0) * (half - inset_mm), "trunk-left"},
              {start, split + branch_direction(spec_, 1.0) * (half - inset_mm), "trunk-right"}};
    }
  }
  return {};
}

PhantomGeometry place_phantom(const PhantomSpec& spec, const Dims& dims, const Vec3& spacing_mm) {
  check_grid(dims, spacing_mm);
  PhantomGeometry local(spec, {});
  const Vec3 extent{(dims[0] - 1) * spacing_mm.x, (dims[1] - 1) * spacing_mm.y,
                    (dims[2] - 1) * spacing_mm.z};
  const Vec3 mid = (local.lower() + local.upper()) * 0.5;
  PhantomGeometry placed(spec, extent * 0.5 - mid);

  constexpr double kMargin = 2.0;
  const Vec3 lo = placed.lower();
  const Vec3 hi = placed.upper();
  const double tol = 1e-9;
  if (lo.x < kMargin - tol || lo.y < kMargin - tol || lo.z < kMargin - tol ||
      hi.x > extent.x - kMargin + tol || hi.y > extent.y - kMargin + tol ||
      hi.z > extent.z - kMargin + tol) {
    throw Error(ErrorCode::kGeometryOutOfBounds,
                "phantom does not fit the volume with a 2 mm margin");
  }
  return placed;
}

Dims auto_dims(const PhantomSpec& spec, const Vec3& spacing_mm, double margin_mm) {
  check_grid({2, 2, 2}, spacing_mm);
  const PhantomGeometry local(spec, {});
  const Vec3 size = local.upper() - local.lower();
  auto count = [&](double extent, double s) {
    int n = static_cast<int>(std::ceil((extent + 2.0 * margin_mm) / s)) + 1;
    return n % 2 == 0 ? n + 1 : n;
  };
  return {count(size.x, spacing_mm.x), count(size.y, spacing_mm.y), count(size.z, spacing_mm.z)};
}

VoxelVolume generate_phantom(const PhantomSpec& spec, const Dims& dims, const Vec3& spacing_mm) {
  const PhantomGeometry geom = place_phantom(spec, dims, spacing_mm);
  VoxelVolume shape(dims, spacing_mm, {});
  const double ramp = shape.max_spacing();

  std::vector<float> data(shape.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double sd = geom.signed_distance(shape.voxel_center(i));
    const double frac = std::clamp(0.5 - sd / ramp, 0.0, 1.0);
    data[i] = static_cast<float>(kLumenIntensity * frac);
  }
  if (spec.noise_sigma > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (float& value : data) value = static_cast<float>(value + noise(rng));
  }
  return VoxelVolume(dims, spacing_mm, {}, std::move(data));
}

void write_svol(const VoxelVolume& v, std::ostream& out) {
  nlohmann::ordered_json header;
  header["magic"] = "SVOL1";
  header["dims"] = v.dims();
  header["spacing_mm"] = {v.spacing().x, v.spacing().y, v.spacing().z};
  header["origin_mm"] = {v.origin().x, v.origin().y, v.origin().z};
  header["dtype"] = "f32le";
  out << header.dump() << '\n';

  std::vector<char> payload(v.size() * 4);
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(v.at(i));
    for (int b = 0; b < 4; ++b) payload[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed to write SVOL payload");
}

VoxelVolume read_svol(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kMalformedHeader, "missing SVOL header");

  Dims dims{};
  Vec3 spacing;
  Vec3 origin;
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.at("magic").get<std::string>() != "SVOL1") {
      throw Error(ErrorCode::kMalformedHeader, "bad SVOL magic");
    }
    if (header.at("dtype").get<std::string>() != "f32le") {
      throw Error(ErrorCode::kMalformedHeader, "unsupported SVOL dtype");
    }
    const auto& d = header.at("dims");
    const auto& s = header.at("spacing_mm");
    const auto& o = header.at("origin_mm");
    if (d.size() != 3 || s.size() != 3 || o.size() != 3) {
      throw Error(ErrorCode::kMalformedHeader, "SVOL header triples must have 3 entries");
    }
    dims = {d[0].get<int>(), d[1].get<int>(), d[2].get<int>()};
    spacing = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
    origin = {o[0].get<double>(), o[1].get<double>(), o[2].get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedHeader, std::string("malformed SVOL header: ") + e.what());
  }
  for (int n : dims) {
    if (n < 2) throw Error(ErrorCode::kDimensionMismatch, "SVOL dims must be >= 2");
  }
  if (!(spacing.x > 0.0 && spacing.y > 0.0 && spacing.z > 0.0)) {
    throw Error(ErrorCode::kMalformedHeader, "SVOL spacing must be positive");
  }

  const std::size_t count = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  std::vector<char> payload(count * 4);
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
    throw Error(ErrorCode::kTruncatedPayload,
                "SVOL payload holds " + std::to_string(in.gcount() / 4) + " values, header needs " +
                    std::to_string(count));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::kDimensionMismatch, "SVOL payload longer than header dims");
  }

  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(payload[4 * i + b])) << (8 * b);
    }
    data[i] = std::bit_cast<float>(bits);
  }
  return VoxelVolume(dims, spacing, origin, std::move(data));
}

void save_volume(const VoxelVolume& v, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_svol(v, out);
}

VoxelVolume load_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_svol(in);
}

}  // namespace stentsim
