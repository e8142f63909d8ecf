#pragma once

#include <array>
#include <vector>

#include "acms/types.hpp"

namespace acms {

struct CoarseEdge {
  std::array<int, 2> vertices{};
  /// One entry for boundary edges, two for interior edges.
  std::vector<int> triangles;

  bool on_boundary() const { return triangles.size() == 1; }
};

/// Structured triangulation of the unit square: n x n cells, each split along
/// the diagonal from (x_i, y_j) to (x_{i+1}, y_{j+1}).
struct CoarseMesh {
  int cells_per_side = 0;
  double H = 0.0;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<CoarseEdge> edges;
  /// triangle_edges[t][k] joins local vertices k and (k+1)%3 of triangle t.
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<bool> boundary_vertex;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_interior_vertices() const;
  int num_interior_edges() const;
};

/// Coarse mesh together with its uniform red refinement and the skeleton
/// numbering used by every trace-space operator.
///
/// Fine node numbering: coarse vertices keep their index, then edge-interior
/// nodes edge by edge (ordered from edges[e].vertices[0] to vertices[1]), then
/// element-interior nodes element by element.
///
/// Skeleton degrees of freedom (the nodes of N_h) are the interior coarse
/// vertices (N_H, numbered first) followed by the edge-interior nodes of all
/// interior coarse edges. Nodes on the outer boundary carry no degree of freedom.
struct TwoLevelMesh {
  CoarseMesh coarse;
  int levels = 0;
  /// Fine segments per coarse edge, 2^levels.
  int subdivisions = 0;
  double h = 0.0;

  std::vector<Point> fine_vertices;
  std::vector<std::array<int, 3>> fine_triangles;
  std::vector<int> parent_triangle;
  std::vector<bool> boundary_node;

  std::vector<std::vector<int>> edge_nodes;
  std::vector<std::vector<int>> interior_nodes;
  std::vector<std::vector<int>> element_triangles;
  /// Closed boundary loop of each coarse triangle: v0, nodes of edge (v0,v1),
  /// v1, nodes of edge (v1,v2), v2, nodes of edge (v2,v0). Size 3 * subdivisions.
  std::vector<std::vector<int>> boundary_loop;

  std::vector<int> skeleton_dof;   // per fine node, -1 if not in N_h
  std::vector<int> skeleton_nodes; // per skeleton dof, the fine node
  std::vector<int> vertex_dof;     // per coarse vertex, -1 on the boundary
  std::vector<int> dof_edge;       // per skeleton dof, owning coarse edge or -1 for N_H
  int num_coarse_dofs = 0;

  int num_fine_nodes() const { return static_cast<int>(fine_vertices.size()); }
  int num_skeleton_dofs() const { return static_cast<int>(skeleton_nodes.size()); }
  /// Nodes interior to each coarse edge, 2^levels - 1.
  int edge_interior_count() const { return subdivisions - 1; }
};

struct Patch {
  int center = 0;
  int layers = 1;
  std::vector<int> elements;  // sorted ascending

  bool contains(int element) const;
};

CoarseMesh build_coarse_mesh(int cells_per_side);
TwoLevelMesh refine(const CoarseMesh& coarse, int levels);

/// T_1(K) = {K}; T_{j+1}(K) adds every triangle sharing a vertex with T_j(K).
Patch patch(const CoarseMesh& mesh, int element, int layers);

/// Fitted overlap constant: smallest c with #{K : tau in T_{j+1}(K)} <= (c j)^2
/// over all tau and 1 <= j <= max_layers.
double overlap_constant(const CoarseMesh& mesh, int max_layers);

/// True when every coarse triangle adjacent to `edge` belongs to the patch.
bool edge_inside(const CoarseMesh& mesh, const Patch& p, int edge);

}  // namespace acms
