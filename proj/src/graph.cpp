#include "stentsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <tuple>

#include "stentsim/distance_transform.hpp"
#include "stentsim/error.hpp"

namespace stentsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Keeps h strictly below the true remaining cost despite rounding.
constexpr double kHeuristicDeflation = 1.0 - 1e-9;

using QueueEntry = std::pair<double, std::size_t>;
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

VoxelPath trace_back(const std::vector<std::size_t>& pred, std::size_t start, std::size_t end,
                     double cost) {
  VoxelPath path;
  path.cost = cost;
  for (std::size_t n = end; n != kNone; n = n == start ? kNone : pred[n]) {
    path.nodes.push_back(n);
  }
  std::reverse(path.nodes.begin(), path.nodes.end());
  return path;
}

}  // namespace

VoxelGraph::VoxelGraph(const VoxelVolume& v, double t_lumen)
    : dims_(v.dims()), spacing_(v.spacing()), origin_(v.origin()) {
  lumen_.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    lumen_[i] = v.at(i) >= t_lumen ? 1 : 0;
    node_count_ += lumen_[i];
  }
  if (node_count_ == 0) {
    throw Error(ErrorCode::kEmptyGraph, "no voxel reaches the lumen threshold");
  }

  dt_ = distance_to_background(v, t_lumen);
  cost_.resize(v.size());
  double dt_max = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    cost_[i] = 1.0 / (kMedialnessEpsilonMm + dt_[i]);
    if (lumen_[i]) dt_max = std::max(dt_max, dt_[i]);
  }
  min_cost_ = 1.0 / (kMedialnessEpsilonMm + dt_max);

  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const Vec3 step{dx * spacing_.x, dy * spacing_.y, dz * spacing_.z};
        offsets_.push_back({dx, dy, dz, norm(step)});
      }
    }
  }
}

Vec3 VoxelGraph::position(std::size_t idx) const noexcept {
  const auto c = coords(idx);
  return {origin_.x + c[0] * spacing_.x, origin_.y + c[1] * spacing_.y,
          origin_.z + c[2] * spacing_.z};
}

std::array<int, 3> VoxelGraph::coords(std::size_t idx) const noexcept {
  const auto nx = static_cast<std::size_t>(dims_[0]);
  const auto ny = static_cast<std::size_t>(dims_[1]);
  return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny),
          static_cast<int>(idx / (nx * ny))};
}

double VoxelGraph::edge_weight(std::size_t u, std::size_t v) const {
  const auto a = coords(u);
  const auto b = coords(v);
  const int dx = b[0] - a[0];
  const int dy = b[1] - a[1];
  const int dz = b[2] - a[2];
  if (u == v || std::abs(dx) > 1 || std::abs(dy) > 1 || std::abs(dz) > 1) {
    throw Error(ErrorCode::kInvalidArgument, "voxels are not 26-neighbours");
  }
  if (!lumen_[u] || !lumen_[v]) throw Error(ErrorCode::kInvalidArgument, "voxel is not a node");
  const double length = norm(Vec3{dx * spacing_.x, dy * spacing_.y, dz * spacing_.z});
  return length * 0.5 * (cost_[u] + cost_[v]);
}

std::size_t VoxelGraph::snap(const Vec3& p) const {
  const Vec3 rel = p - origin_;
  const int cx = static_cast<int>(std::lround(rel.x / spacing_.x));
  const int cy = static_cast<int>(std::lround(rel.y / spacing_.y));
  const int cz = static_cast<int>(std::lround(rel.z / spacing_.z));
  std::size_t best = kNone;
  double best_d = kInf;
  for (int z = cz - 2; z <= cz + 2; ++z) {
    for (int y = cy - 2; y <= cy + 2; ++y) {
      for (int x = cx - 2; x <= cx + 2; ++x) {
        if (x < 0 || y < 0 || z < 0 || x >= dims_[0] || y >= dims_[1] || z >= dims_[2]) continue;
        const std::size_t idx = index(x, y, z);
        if (!lumen_[idx]) continue;
        const double d = distance(position(idx), p);
        if (d < best_d || (d == best_d && idx < best)) {
          best_d = d;
          best = idx;
        }
      }
    }
  }
  if (best == kNone) {
    throw Error(ErrorCode::kSeedOutsideLumen,
                "seed (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
                    std::to_string(p.z) + ") has no lumen voxel within 2 voxels");
  }
  return best;
}

std::string_view to_string(PathAlgorithm algorithm) {
  return algorithm == PathAlgorithm::kAStar ? "astar" : "dijkstra";
}

PathAlgorithm parse_path_algorithm(std::string_view name) {
  if (name == "dijkstra") return PathAlgorithm::kDijkstra;
  if (name == "astar") return PathAlgorithm::kAStar;
  throw Error(ErrorCode::kInvalidArgument, "unknown path algorithm '" + std::string(name) + "'");
}

VoxelPath shortest_path(const VoxelGraph& g, std::size_t start, std::size_t end,
                        PathAlgorithm algorithm) {
  if (start >= g.voxel_count() || end >= g.voxel_count() || !g.is_node(start) ||
      !g.is_node(end)) {
    throw Error(ErrorCode::kSeedOutsideLumen, "path endpoints must be lumen voxels");
  }
  if (start == end) return {{start}, 0.0};

  const bool astar = algorithm == PathAlgorithm::kAStar;
  const Vec3 goal = g.position(end);
  const double h_scale = g.min_cost() * kHeuristicDeflation;
  auto heuristic = [&](std::size_t n) {
    return astar ? distance(g.position(n), goal) * h_scale : 0.0;
  };

  std::vector<double> dist(g.voxel_count(), kInf);
  std::vector<std::size_t> pred(g.voxel_count(), kNone);
  std::vector<unsigned char> closed(g.voxel_count(), 0);
  MinQueue open;
  dist[start] = 0.0;
  open.push({heuristic(start), start});

  while (!open.empty()) {
    const auto [key, u] = open.top();
    open.pop();
    if (closed[u] || key != dist[u] + heuristic(u)) continue;
    closed[u] = 1;
    if (u == end) return trace_back(pred, start, end, dist[end]);

    g.for_each_neighbor(u, [&](std::size_t v, double w) {
      const double candidate = dist[u] + w;
      if (candidate < dist[v]) {
        dist[v] = candidate;
        pred[v] = u;
        closed[v] = 0;
        open.push({candidate + heuristic(v), v});
      } else if (candidate == dist[v] && u < pred[v]) {
        pred[v] = u;
      }
    });
  }
  throw Error(ErrorCode::kUnreachable, "end seed is not connected to the start seed");
}

VoxelPath shortest_path(const VoxelGraph& g, const Vec3& start_mm, const Vec3& end_mm,
                        PathAlgorithm algorithm) {
  return shortest_path(g, g.snap(start_mm), g.snap(end_mm), algorithm);
}

}  // namespace stentsim
