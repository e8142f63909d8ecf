#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "acms/errors.hpp"
#include "acms/geometry.hpp"

namespace acms {
namespace {

double signed_area(Point a, Point b, Point c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

// Patch by repeated vertex-neighbour sweeps over plain vertex sets.
std::set<int> patch_oracle(const CoarseMesh& mesh, int element, int layers) {
  std::set<int> elements{element};
  for (int j = 1; j < layers; ++j) {
    std::set<int> verts;
    for (int t : elements) verts.insert(mesh.triangles[t].begin(), mesh.triangles[t].end());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      for (int v : mesh.triangles[t]) {
        if (verts.count(v)) elements.insert(t);
      }
    }
  }
  return elements;
}

class CoarseMeshSizes : public ::testing::TestWithParam<int> {};

TEST_P(CoarseMeshSizes, CountsAndOrientation) {
  const int n = GetParam();
  const CoarseMesh m = build_coarse_mesh(n);
  EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 1));
  EXPECT_EQ(m.num_triangles(), 2 * n * n);
  EXPECT_EQ(m.num_edges(), 3 * n * n + 2 * n);
  EXPECT_EQ(m.num_interior_vertices(), (n - 1) * (n - 1));
  EXPECT_EQ(m.num_interior_edges(), 3 * n * n - 2 * n);
  EXPECT_DOUBLE_EQ(m.H, 1.0 / n);
  double area = 0.0;
  for (const auto& t : m.triangles) {
    const double a = signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
    EXPECT_GT(a, 0.0);
    area += a;
  }
  EXPECT_NEAR(area, 1.0, 1e-14);
  // V - E + F = 1 for a triangulated disc.
  EXPECT_EQ(m.num_vertices() - m.num_edges() + m.num_triangles(), 1);
}

TEST_P(CoarseMeshSizes, EdgeTriangleIncidence) {
  const CoarseMesh m = build_coarse_mesh(GetParam());
  std::vector<int> uses(m.num_edges(), 0);
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int e = m.triangle_edges[t][k];
      ++uses[e];
      const std::set<int> ends{m.edges[e].vertices[0], m.edges[e].vertices[1]};
      EXPECT_EQ(ends, (std::set<int>{m.triangles[t][k], m.triangles[t][(k + 1) % 3]}));
    }
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    EXPECT_EQ(uses[e], static_cast<int>(m.edges[e].triangles.size()));
    const Point a = m.vertices[m.edges[e].vertices[0]];
    const Point b = m.vertices[m.edges[e].vertices[1]];
    const bool on_side = (a.x == b.x && (a.x == 0.0 || a.x == 1.0)) ||
                         (a.y == b.y && (a.y == 0.0 || a.y == 1.0));
    EXPECT_EQ(m.edges[e].on_boundary(), on_side) << "edge " << e;
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, CoarseMeshSizes, ::testing::Values(1, 2, 3, 5));

TEST(CoarseMesh, RejectsEmptyGrid) {
  EXPECT_THROW(build_coarse_mesh(0), InvalidParameter);
}

TEST(Refine, RejectsBadLevels) {
  const CoarseMesh m = build_coarse_mesh(2);
  EXPECT_THROW(refine(m, 0), InvalidParameter);
  EXPECT_THROW(refine(m, 11), InvalidParameter);
}

class RefinedMesh : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(RefinedMesh, CountsAndSkeletonNumbering) {
  const auto [n, r] = GetParam();
  const TwoLevelMesh mesh = refine(build_coarse_mesh(n), r);
  const int m = 1 << r;
  EXPECT_EQ(mesh.subdivisions, m);
  EXPECT_DOUBLE_EQ(mesh.h, 1.0 / (n * m));
  EXPECT_EQ(mesh.num_fine_nodes(), (n * m + 1) * (n * m + 1));
  EXPECT_EQ(static_cast<int>(mesh.fine_triangles.size()), 2 * n * n * m * m);
  EXPECT_EQ(mesh.num_coarse_dofs, (n - 1) * (n - 1));
  EXPECT_EQ(mesh.num_skeleton_dofs(),
            mesh.num_coarse_dofs + mesh.coarse.num_interior_edges() * (m - 1));

  for (int d = 0; d < mesh.num_skeleton_dofs(); ++d) {
    EXPECT_EQ(mesh.skeleton_dof[mesh.skeleton_nodes[d]], d);
    EXPECT_EQ(mesh.dof_edge[d] < 0, d < mesh.num_coarse_dofs);
  }
  for (int v = 0; v < mesh.coarse.num_vertices(); ++v) {
    const int d = mesh.vertex_dof[v];
    EXPECT_EQ(d < 0, static_cast<bool>(mesh.coarse.boundary_vertex[v]));
    if (d >= 0) EXPECT_EQ(mesh.skeleton_nodes[d], v);
  }

  std::vector<double> area(mesh.coarse.num_triangles(), 0.0);
  for (std::size_t t = 0; t < mesh.fine_triangles.size(); ++t) {
    const auto& tri = mesh.fine_triangles[t];
    const double a = signed_area(mesh.fine_vertices[tri[0]], mesh.fine_vertices[tri[1]],
                                 mesh.fine_vertices[tri[2]]);
    EXPECT_GT(a, 0.0);
    area[mesh.parent_triangle[t]] += a;
  }
  for (double a : area) EXPECT_NEAR(a, 0.5 * mesh.coarse.H * mesh.coarse.H, 1e-14);
}

// Every skeleton node lies on its coarse edge (or is a coarse vertex); interior
// nodes lie strictly inside their element.
TEST_P(RefinedMesh, Conformity) {
  const auto [n, r] = GetParam();
  const TwoLevelMesh mesh = refine(build_coarse_mesh(n), r);
  const double tol = 1e-13;
  for (int e = 0; e < mesh.coarse.num_edges(); ++e) {
    const Point a = mesh.coarse.vertices[mesh.coarse.edges[e].vertices[0]];
    const Point b = mesh.coarse.vertices[mesh.coarse.edges[e].vertices[1]];
    const auto& nodes = mesh.edge_nodes[e];
    ASSERT_EQ(static_cast<int>(nodes.size()), mesh.edge_interior_count());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double t = static_cast<double>(k + 1) / mesh.subdivisions;
      const Point p = mesh.fine_vertices[nodes[k]];
      EXPECT_NEAR(p.x, a.x + t * (b.x - a.x), tol);
      EXPECT_NEAR(p.y, a.y + t * (b.y - a.y), tol);
      const int d = mesh.skeleton_dof[nodes[k]];
      if (mesh.coarse.edges[e].on_boundary()) {
        EXPECT_EQ(d, -1);
        EXPECT_TRUE(mesh.boundary_node[nodes[k]]);
      } else {
        EXPECT_EQ(mesh.dof_edge[d], e);
      }
    }
  }
  for (int tau = 0; tau < mesh.coarse.num_triangles(); ++tau) {
    const auto& t = mesh.coarse.triangles[tau];
    const Point a = mesh.coarse.vertices[t[0]];
    const Point b = mesh.coarse.vertices[t[1]];
    const Point c = mesh.coarse.vertices[t[2]];
    for (int v : mesh.interior_nodes[tau]) {
      const Point p = mesh.fine_vertices[v];
      EXPECT_GT(signed_area(a, b, p), tol);
      EXPECT_GT(signed_area(b, c, p), tol);
      EXPECT_GT(signed_area(c, a, p), tol);
      EXPECT_EQ(mesh.skeleton_dof[v], -1);
    }
    EXPECT_EQ(static_cast<int>(mesh.boundary_loop[tau].size()), 3 * mesh.subdivisions);
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, RefinedMesh,
                         ::testing::Values(std::pair{2, 1}, std::pair{2, 3}, std::pair{3, 2},
                                           std::pair{4, 2}));

TEST(Patch, SingleLayerIsTheElement) {
  const CoarseMesh m = build_coarse_mesh(3);
  for (int k = 0; k < m.num_triangles(); ++k) {
    EXPECT_EQ(patch(m, k, 1).elements, std::vector<int>{k});
  }
}

// The two corner elements off the diagonal through the centre do not touch
// it, so they need one layer more than the rest.
TEST(Patch, SmallMeshSaturates) {
  const CoarseMesh m = build_coarse_mesh(2);
  int late = 0;
  for (int k = 0; k < m.num_triangles(); ++k) {
    EXPECT_EQ(patch(m, k, 4).elements.size(), 8u);
    late += patch(m, k, 3).elements.size() < 8u ? 1 : 0;
  }
  EXPECT_EQ(late, 2);
}

TEST(Patch, MatchesNeighbourSweepAndGrowsMonotonically) {
  const CoarseMesh m = build_coarse_mesh(5);
  for (int k = 0; k < m.num_triangles(); k += 7) {
    std::vector<int> previous;
    for (int j = 1; j <= 6; ++j) {
      const Patch p = patch(m, k, j);
      const std::set<int> oracle = patch_oracle(m, k, j);
      EXPECT_EQ(p.elements, std::vector<int>(oracle.begin(), oracle.end())) << k << ' ' << j;
      EXPECT_TRUE(std::is_sorted(p.elements.begin(), p.elements.end()));
      EXPECT_TRUE(std::includes(p.elements.begin(), p.elements.end(), previous.begin(),
                                previous.end()));
      for (int t : p.elements) EXPECT_TRUE(p.contains(t));
      previous = p.elements;
    }
  }
}

TEST(Patch, RejectsBadArguments) {
  const CoarseMesh m = build_coarse_mesh(2);
  EXPECT_THROW(patch(m, -1, 1), InvalidParameter);
  EXPECT_THROW(patch(m, 8, 1), InvalidParameter);
  EXPECT_THROW(patch(m, 0, 0), InvalidParameter);
}

TEST(Patch, EdgeInside) {
  const CoarseMesh m = build_coarse_mesh(3);
  const Patch single = patch(m, 4, 1);
  for (int e = 0; e < m.num_edges(); ++e) {
    const bool expected = m.edges[e].on_boundary() && m.edges[e].triangles[0] == 4;
    EXPECT_EQ(edge_inside(m, single, e), expected) << e;
  }
  const Patch all = patch(m, 4, 10);
  for (int e = 0; e < m.num_edges(); ++e) EXPECT_TRUE(edge_inside(m, all, e));
}

TEST(Patch, OverlapConstantBoundsCounts) {
  const CoarseMesh m = build_coarse_mesh(6);
  const int layers = 3;
  const double c = overlap_constant(m, layers);
  EXPECT_GT(c, 0.0);
  for (int j = 1; j <= layers; ++j) {
    std::vector<int> count(m.num_triangles(), 0);
    for (int k = 0; k < m.num_triangles(); ++k) {
      for (int t : patch(m, k, j + 1).elements) ++count[t];
    }
    for (int v : count) EXPECT_LE(v, (c * j) * (c * j) * (1.0 + 1e-12));
  }
}

}  // namespace
}  // namespace acms
