#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "stentsim/vec3.hpp"
#include "stentsim/volume.hpp"

namespace stentsim {

inline constexpr double kMedialnessEpsilonMm = 0.1;

/// The lumen of a volume as an implicit weighted undirected graph.
///
/// Nodes are voxels with intensity >= t_lumen, edges join 26-neighbours, and
/// w(u, v) = |p_u - p_v| * (c(u) + c(v)) / 2 with medialness cost
/// c(x) = 1 / (eps + DT(x)), DT being the distance (mm) to the nearest
/// sub-threshold voxel. Edges are generated on demand.
class VoxelGraph {
 public:
  VoxelGraph(const VoxelVolume& v, double t_lumen);

  std::size_t voxel_count() const noexcept { return cost_.size(); }
  std::size_t node_count() const noexcept { return node_count_; }
  bool is_node(std::size_t idx) const noexcept { return lumen_[idx] != 0; }

  double distance_transform(std::size_t idx) const noexcept { return dt_[idx]; }
  double cost(std::size_t idx) const noexcept { return cost_[idx]; }
  /// 1 / (eps + max DT over the lumen); lower bound of c, used by A*.
  double min_cost() const noexcept { return min_cost_; }

  Vec3 position(std::size_t idx) const noexcept;
  std::array<int, 3> coords(std::size_t idx) const noexcept;
  std::size_t index(int x, int y, int z) const noexcept {
    return (static_cast<std::size_t>(z) * dims_[1] + y) * dims_[0] + x;
  }

  /// Weight of the edge between two adjacent lumen voxels.
  double edge_weight(std::size_t u, std::size_t v) const;

  /// Calls fn(neighbour, weight) for every lumen 26-neighbour of `u`.
  template <typename Fn>
  void for_each_neighbor(std::size_t u, Fn&& fn) const {
    const auto c = coords(u);
    for (const auto& off : offsets_) {
      const int x = c[0] + off.dx;
      const int y = c[1] + off.dy;
      const int z = c[2] + off.dz;
      if (x < 0 || y < 0 || z < 0 || x >= dims_[0] || y >= dims_[1] || z >= dims_[2]) continue;
      const std::size_t v = index(x, y, z);
      if (!lumen_[v]) continue;
      fn(v, off.length * 0.5 * (cost_[u] + cost_[v]));
    }
  }

  /// Nearest lumen voxel within two voxels (Chebyshev) of `p`.
  std::size_t snap(const Vec3& p) const;

 private:
  struct Offset {
    int dx, dy, dz;
    double length;
  };

  Dims dims_;
  Vec3 spacing_;
  Vec3 origin_;
  std::vector<unsigned char> lumen_;
  std::vector<double> dt_;
  std::vector<double> cost_;
  std::vector<Offset> offsets_;
  std::size_t node_count_ = 0;
  double min_cost_ = 0.0;
};

enum class PathAlgorithm { kDijkstra, kAStar };

std::string_view to_string(PathAlgorithm algorithm);
PathAlgorithm parse_path_algorithm(std::string_view name);

struct VoxelPath {
  std::vector<std::size_t> nodes;
  double cost = 0.0;
};

/// Least-cost path between two lumen voxels. Among equal-cost predecessors
/// the lowest (z, y, x) index wins, so both algorithms agree on the path.
VoxelPath shortest_path(const VoxelGraph& g, std::size_t start, std::size_t end,
                        PathAlgorithm algorithm = PathAlgorithm::kDijkstra);

/// Snaps both seeds to the lumen first.
VoxelPath shortest_path(const VoxelGraph& g, const Vec3& start_mm, const Vec3& end_mm,
                        PathAlgorithm algorithm = PathAlgorithm::kDijkstra);

}  // namespace stentsim
