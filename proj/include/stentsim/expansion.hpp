#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stentsim/stent_mesh.hpp"
#include "stentsim/vec3.hpp"
#include "stentsim/wall_model.hpp"

namespace stentsim {

struct ForceParams {
  double k_h = 1.0;  // horizontal (ring) springs
  double k_v = 1.0;  // vertical (axial) springs
  double k_d = 0.5;  // diagonal springs
  double balloon = 1.0;
  double dt = 0.1;
  int max_iters = 5000;
  double eps_conv_mm = 1e-4;
  double collision_radius_mm = 2.0;
  double k_col = 4.0;
};

void validate(const ForceParams& p);

struct ExpansionTrace {
  int iterations_run = 0;
  std::vector<double> max_displacement;
  bool converged = false;
};

/// Spring forces from the 8-neighbourhood of (i, j). Rest lengths come from
/// the target geometry: chord 2*R*sin(pi/S) around the ring, the ring
/// centre spacing along the axis, and their hypotenuse across.
Vec3 internal_force(const StentMesh& m, int i, int j, const ForceParams& p);

/// Balloon push along the vertex ray, fading linearly to zero at the target
/// radius. The wall acts as a hard cap inside step(), not as a force.
Vec3 external_force(const StentMesh& m, const WallModel& w, int i, int j, const ForceParams& p);

struct CollisionForces {
  std::vector<Vec3> on_a;
  std::vector<Vec3> on_b;
};

/// Repulsion between collision-enabled vertices of two limbs: each vertex a
/// of A whose nearest B vertex b lies closer than the collision radius gets
/// k_col * (r_c - d) * unit(a - b), and b the opposite. Coincident pairs
/// push along a's own ray.
CollisionForces apply_self_collision(const StentMesh& a, const StentMesh& b,
                                     const ForceParams& p);

/// One explicit Euler step over all limbs (two limbs interact through
/// self-collision). Each vertex moves along its ray only and is capped at
/// the wall radius when one is known. Returns the largest displacement.
double step(std::span<StentMesh> meshes, std::span<const WallModel> walls, const ForceParams& p);
double step(StentMesh& m, const WallModel& w, const ForceParams& p);

using ProgressFn = std::function<void(int iteration, double max_displacement)>;

/// Steps until the largest displacement drops below eps_conv_mm or
/// max_iters is reached.
ExpansionTrace expand(std::span<StentMesh> meshes, std::span<const WallModel> walls,
                      const ForceParams& p, const ProgressFn& progress = {});
ExpansionTrace expand(StentMesh& m, const WallModel& w, const ForceParams& p,
                      const ProgressFn& progress = {});

}  // namespace stentsim
