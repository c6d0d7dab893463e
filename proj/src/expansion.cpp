#include "stentsim/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>

#include "stentsim/error.hpp"

namespace stentsim {

namespace {

Vec3 spring(const Vec3& from, const Vec3& to, double k, double rest) {
  const Vec3 d = to - from;
  const double len = norm(d);
  if (k == 0.0 || len == 0.0) return {};
  return d * (k * (len - rest) / len);
}

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : {k.x, k.y, k.z}) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

CellKey cell_of(const Vec3& p, double cell) {
  return {static_cast<std::int64_t>(std::floor(p.x / cell)),
          static_cast<std::int64_t>(std::floor(p.y / cell)),
          static_cast<std::int64_t>(std::floor(p.z / cell))};
}

void check_pairing(std::span<StentMesh> meshes, std::span<const WallModel> walls) {
  if (meshes.empty() || meshes.size() > 2 || meshes.size() != walls.size()) {
    throw Error(ErrorCode::kInvalidArgument, "expansion takes one or two limbs, each with a wall");
  }
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    if (meshes[k].rings() != walls[k].rings() || meshes[k].segments() != walls[k].segments()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "mesh and wall model of limb " + meshes[k].limb_id() + " differ in (R, S)");
    }
  }
}

}  // namespace

void validate(const ForceParams& p) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (!(p.k_h >= 0.0 && p.k_v >= 0.0 && p.k_d >= 0.0 && p.k_col >= 0.0)) {
    fail("stiffnesses must be non-negative");
  }
  if (!(p.dt > 0.0 && p.dt <= 0.5)) fail("dt must lie in (0, 0.5]");
  if (!(p.eps_conv_mm > 0.0)) fail("eps_conv_mm must be positive");
  if (p.max_iters < 0) fail("max_iters must be non-negative");
  if (!(p.balloon >= 0.0)) fail("balloon must be non-negative");
  if (!(p.collision_radius_mm > 0.0)) fail("collision_radius_mm must be positive");
}

Vec3 internal_force(const StentMesh& m, int i, int j, const ForceParams& p) {
  const int segs = m.segments();
  const double chord = 2.0 * std::sin(std::numbers::pi / segs);
  const Vec3& x = m.vertex(i, j);
  const int jl = (j + segs - 1) % segs;
  const int jr = (j + 1) % segs;

  const double rest_h = chord * m.target_radius(i);
  Vec3 f = spring(x, m.vertex(i, jl), p.k_h, rest_h) + spring(x, m.vertex(i, jr), p.k_h, rest_h);

  for (int di : {-1, 1}) {
    const int n = i + di;
    if (n < 0 || n >= m.rings()) continue;
    const double rest_v = m.ring_spacing(std::min(i, n));
    const double rest_hn = chord * 0.5 * (m.target_radius(i) + m.target_radius(n));
    const double rest_d = std::hypot(rest_hn, rest_v);
    f += spring(x, m.vertex(n, j), p.k_v, rest_v);
    f += spring(x, m.vertex(n, jl), p.k_d, rest_d);
    f += spring(x, m.vertex(n, jr), p.k_d, rest_d);
  }
  return f;
}

Vec3 external_force(const StentMesh& m, const WallModel& /*w*/, int i, int j,
                    const ForceParams& p) {
  const double target = m.target_radius(i);
  const double ramp = std::clamp(1.0 - stent_radius(m, i, j) / target, 0.0, 1.0);
  return m.ray_dir(i, j) * (p.balloon * ramp);
}

CollisionForces apply_self_collision(const StentMesh& a, const StentMesh& b,
                                     const ForceParams& p) {
  CollisionForces out{std::vector<Vec3>(a.vertices().size()),
                      std::vector<Vec3>(b.vertices().size())};
  const double rc = p.collision_radius_mm;
  if (p.k_col == 0.0) return out;

  std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
  const auto bv = b.vertices();
  for (int i = 0; i < b.rings(); ++i) {
    if (!b.collides(i)) continue;
    for (int j = 0; j < b.segments(); ++j) {
      const int id = b.vertex_id(i, j);
      grid[cell_of(bv[id], rc)].push_back(id);
    }
  }
  if (grid.empty()) return out;

  const auto av = a.vertices();
  for (int i = 0; i < a.rings(); ++i) {
    if (!a.collides(i)) continue;
    for (int j = 0; j < a.segments(); ++j) {
      const int ia = a.vertex_id(i, j);
      const CellKey c = cell_of(av[ia], rc);
      int best = -1;
      double best_d = rc;
      for (std::int64_t dz = -1; dz <= 1; ++dz) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          for (std::int64_t dx = -1; dx <= 1; ++dx) {
            const auto it = grid.find({c.x + dx, c.y + dy, c.z + dz});
            if (it == grid.end()) continue;
            for (int ib : it->second) {
              const double d = distance(av[ia], bv[ib]);
              if (d < best_d || (d == best_d && best >= 0 && ib < best)) {
                best_d = d;
                best = ib;
              }
            }
          }
        }
      }
      if (best < 0) continue;
      const Vec3 dir = best_d < 1e-9 ? a.ray_dir(i, j) : (av[ia] - bv[best]) / best_d;
      const Vec3 f = dir * (p.k_col * (rc - best_d));
      out.on_a[ia] += f;
      out.on_b[best] -= f;
    }
  }
  return out;
}

double step(std::span<StentMesh> meshes, std::span<const WallModel> walls, const ForceParams& p) {
  check_pairing(meshes, walls);

  std::vector<std::vector<Vec3>> forces(meshes.size());
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    const StentMesh& m = meshes[k];
    auto& f = forces[k];
    f.resize(m.vertices().size());
    for (int i = 0; i < m.rings(); ++i) {
      for (int j = 0; j < m.segments(); ++j) {
        f[m.vertex_id(i, j)] = internal_force(m, i, j, p) + external_force(m, walls[k], i, j, p);
      }
    }
  }
  if (meshes.size() == 2) {
    const auto col = apply_self_collision(meshes[0], meshes[1], p);
    for (std::size_t v = 0; v < col.on_a.size(); ++v) forces[0][v] += col.on_a[v];
    for (std::size_t v = 0; v < col.on_b.size(); ++v) forces[1][v] += col.on_b[v];
  }

  double max_disp = 0.0;
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    StentMesh& m = meshes[k];
    for (int i = 0; i < m.rings(); ++i) {
      for (int j = 0; j < m.segments(); ++j) {
        const Vec3& f = forces[k][m.vertex_id(i, j)];
        if (!is_finite(f)) {
          throw Error(ErrorCode::kNonFiniteForce,
                      "non-finite force at limb " + m.limb_id() + " vertex (" +
                          std::to_string(i) + ", " + std::to_string(j) + ")");
        }
        const Vec3& dir = m.ray_dir(i, j);
        const double r = dot(m.vertex(i, j) - m.ring_center(i), dir);
        double r_new = std::max(0.0, r + p.dt * dot(f, dir));
        if (const auto wall = walls[k].wall_radius(i, j)) r_new = std::min(r_new, *wall);
        max_disp = std::max(max_disp, std::abs(r_new - r));
        m.set_radius(i, j, r_new);
      }
    }
  }
  return max_disp;
}

double step(StentMesh& m, const WallModel& w, const ForceParams& p) {
  return step(std::span<StentMesh>(&m, 1), std::span<const WallModel>(&w, 1), p);
}

ExpansionTrace expand(std::span<StentMesh> meshes, std::span<const WallModel> walls,
                      const ForceParams& p, const ProgressFn& progress) {
  validate(p);
  check_pairing(meshes, walls);
  double largest_target = 0.0;
  for (const auto& m : meshes) {
    for (double r : m.target_radii()) largest_target = std::max(largest_target, r);
  }

  ExpansionTrace trace;
  for (int it = 0; it < p.max_iters; ++it) {
    const double disp = step(meshes, walls, p);
    trace.max_displacement.push_back(disp);
    trace.iterations_run = it + 1;
    if (progress) progress(trace.iterations_run, disp);
    if (disp > 10.0 * largest_target) {
      throw Error(ErrorCode::kDivergence,
                  "expansion diverged at iteration " + std::to_string(it + 1) +
                      ": displacement " + std::to_string(disp) + " mm");
    }
    if (disp < p.eps_conv_mm) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

ExpansionTrace expand(StentMesh& m, const WallModel& w, const ForceParams& p,
                      const ProgressFn& progress) {
  return expand(std::span<StentMesh>(&m, 1), std::span<const WallModel>(&w, 1), p, progress);
}

}  // namespace stentsim
