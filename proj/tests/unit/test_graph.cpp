#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "stentsim/error.hpp"
#include "stentsim/graph.hpp"

using namespace stentsim;

namespace {

double path_weight(const VoxelGraph& g, const VoxelPath& p) {
  double w = 0.0;
  for (std::size_t k = 1; k < p.nodes.size(); ++k) w += g.edge_weight(p.nodes[k - 1], p.nodes[k]);
  return w;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(Graph, EdgeWeightFollowsMedialnessFormula) {
  // Solid 7x7x9 block: DT of the centre voxel is 4 mm (to the padded shell).
  const VoxelVolume v(Dims{7, 7, 9}, {1, 1, 1}, {}, 1000.0f);
  const VoxelGraph g(v, 500.0);
  const std::size_t a = g.index(3, 3, 3), b = g.index(3, 3, 4);
  EXPECT_DOUBLE_EQ(g.distance_transform(a), 4.0);
  EXPECT_DOUBLE_EQ(g.cost(a), 1.0 / 4.1);
  const double dt_b = g.distance_transform(b);
  EXPECT_DOUBLE_EQ(g.edge_weight(a, b), 0.5 * (1.0 / 4.1 + 1.0 / (0.1 + dt_b)));

  const std::size_t diag = g.index(4, 4, 3);
  EXPECT_NEAR(g.edge_weight(a, diag), std::sqrt(2.0) * 0.5 * (g.cost(a) + g.cost(diag)), 1e-15);
}

TEST(Graph, EqualDepthNeighboursGiveOneOverThreePointOne) {
  // 5x5 square cross-section: the two axial neighbours are both 3 mm deep.
  std::vector<float> deep(9 * 9 * 12, 0.0f);
  VoxelVolume s2(Dims{9, 9, 12}, {1, 1, 1}, {});
  for (std::size_t i = 0; i < deep.size(); ++i) {
    const auto c = s2.coords(i);
    if (c[0] >= 2 && c[0] <= 6 && c[1] >= 2 && c[1] <= 6) deep[i] = 1000.0f;
  }
  const VoxelGraph g2(VoxelVolume(Dims{9, 9, 12}, {1, 1, 1}, {}, deep), 500.0);
  const std::size_t c = g2.index(4, 4, 5), d = g2.index(4, 4, 6);
  ASSERT_DOUBLE_EQ(g2.distance_transform(c), 3.0);
  EXPECT_NEAR(g2.edge_weight(c, d), 0.3226, 5e-5);
}

TEST(Graph, TubeAxisIsCheaperThanWallAdjacentVoxels) {
  PhantomSpec s;
  s.lumen_radius_mm = 2.0;
  s.length_mm = 1.0;
  const VoxelGraph g(generate_phantom(s, Dims{9, 9, 9}, {1, 1, 1}), 500.0);
  const auto brute = [&](std::size_t i) {
    double best = 1e9;
    const auto ci = g.coords(i);
    for (std::size_t j = 0; j < g.voxel_count(); ++j) {
      if (g.is_node(j)) continue;
      const auto cj = g.coords(j);
      best = std::min(best, std::hypot(ci[0] - cj[0], ci[1] - cj[1], ci[2] - cj[2]));
    }
    return best;
  };
  const std::size_t axis = g.index(4, 4, 4);
  ASSERT_TRUE(g.is_node(axis));
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    if (!g.is_node(i) || i == axis) continue;
    if (brute(i) < brute(axis)) EXPECT_GT(g.cost(i), g.cost(axis));
  }
}

TEST(ShortestPath, MatchesBellmanFordAndAStarAgrees) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto grid = oracles::random_connected_lumen(rng, 7);
    const VoxelGraph g(grid.volume, 500.0);
    const auto bf = oracles::bellman_ford(g, grid.start);
    const auto dij = shortest_path(g, grid.start, grid.end, PathAlgorithm::kDijkstra);
    const auto ast = shortest_path(g, grid.start, grid.end, PathAlgorithm::kAStar);
    EXPECT_EQ(dij.cost, bf[grid.end]) << "trial " << trial;
    EXPECT_EQ(ast.cost, dij.cost) << "trial " << trial;
    EXPECT_EQ(ast.nodes, dij.nodes) << "trial " << trial;
    EXPECT_EQ(dij.nodes.front(), grid.start);
    EXPECT_EQ(dij.nodes.back(), grid.end);
    EXPECT_NEAR(path_weight(g, dij), dij.cost, 1e-12);
  }
}

TEST(ShortestPath, TrivialCases) {
  std::vector<float> line(3 * 3 * 20, 0.0f);
  VoxelVolume shape(Dims{3, 3, 20}, {1, 1, 1}, {});
  for (int z = 0; z < 20; ++z) line[shape.index(1, 1, z)] = 1000.0f;
  const VoxelGraph g(VoxelVolume(Dims{3, 3, 20}, {1, 1, 1}, {}, line), 500.0);

  const auto same = shortest_path(g, g.index(1, 1, 5), g.index(1, 1, 5));
  EXPECT_EQ(same.nodes.size(), 1u);
  EXPECT_EQ(same.cost, 0.0);

  for (auto alg : {PathAlgorithm::kDijkstra, PathAlgorithm::kAStar}) {
    const auto p = shortest_path(g, g.index(1, 1, 0), g.index(1, 1, 19), alg);
    ASSERT_EQ(p.nodes.size(), 20u);
    for (int z = 0; z < 20; ++z) EXPECT_EQ(p.nodes[z], g.index(1, 1, z));
  }
}

TEST(ShortestPath, Errors) {
  std::vector<float> two(9 * 9 * 9, 0.0f);
  VoxelVolume shape(Dims{9, 9, 9}, {1, 1, 1}, {});
  two[shape.index(0, 0, 0)] = 1000.0f;
  two[shape.index(8, 8, 8)] = 1000.0f;
  const VoxelGraph g(VoxelVolume(Dims{9, 9, 9}, {1, 1, 1}, {}, two), 500.0);
  EXPECT_EQ(code_of([&] { shortest_path(g, g.index(0, 0, 0), g.index(8, 8, 8)); }), ErrorCode::kUnreachable);
  EXPECT_EQ(code_of([&] { g.snap({4.0, 4.0, 4.0}); }), ErrorCode::kSeedOutsideLumen);
  EXPECT_EQ(g.snap({1.0, 1.0, 0.0}), g.index(0, 0, 0));
  EXPECT_EQ(code_of([&] { VoxelGraph(VoxelVolume(Dims{3, 3, 3}, {1, 1, 1}, {}, 0.0f), 500.0); }),
            ErrorCode::kEmptyGraph);
  EXPECT_EQ(code_of([] { parse_path_algorithm("bfs"); }), ErrorCode::kInvalidArgument);
}
