#include "acms/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "acms/errors.hpp"

namespace acms {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

}  // namespace

int CoarseMesh::num_interior_vertices() const {
  return static_cast<int>(std::count(boundary_vertex.begin(), boundary_vertex.end(), false));
}

int CoarseMesh::num_interior_edges() const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(),
                                        [](const CoarseEdge& e) { return !e.on_boundary(); }));
}

bool Patch::contains(int element) const {
  return std::binary_search(elements.begin(), elements.end(), element);
}

CoarseMesh build_coarse_mesh(int n) {
  if (n < 1) {
    throw InvalidParameter("build_coarse_mesh: cells per side must be >= 1, got " +
                           std::to_string(n));
  }
  CoarseMesh mesh;
  mesh.cells_per_side = n;
  mesh.H = 1.0 / n;

  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
      mesh.boundary_vertex.push_back(i == 0 || j == 0 || i == n || j == n);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }

  std::map<std::pair<int, int>, int> edge_index;
  mesh.triangle_edges.resize(mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, mesh.num_edges());
      if (inserted) {
        mesh.edges.push_back(CoarseEdge{{a, b}, {}});
      }
      mesh.edges[it->second].triangles.push_back(t);
      mesh.triangle_edges[t][k] = it->second;
    }
  }
  return mesh;
}

TwoLevelMesh refine(const CoarseMesh& coarse, int levels) {
  if (levels < 1 || levels > 10) {
    throw InvalidParameter("refine: refinement levels must be in [1, 10], got " +
                           std::to_string(levels));
  }
  TwoLevelMesh mesh;
  mesh.coarse = coarse;
  mesh.levels = levels;
  const int m = 1 << levels;
  mesh.subdivisions = m;
  mesh.h = coarse.H / m;

  for (int t = 0; t < coarse.num_triangles(); ++t) {
    const auto& tri = coarse.triangles[t];
    if (signed_area(coarse.vertices[tri[0]], coarse.vertices[tri[1]], coarse.vertices[tri[2]]) <=
        0.0) {
      throw GeometryError("refine: coarse triangle " + std::to_string(t) +
                          " is degenerate or clockwise");
    }
  }

  // Coarse vertices first.
  mesh.fine_vertices = coarse.vertices;
  mesh.boundary_node = coarse.boundary_vertex;

  // Edge-interior nodes, ordered from vertices[0] to vertices[1].
  mesh.edge_nodes.resize(coarse.edges.size());
  for (int e = 0; e < coarse.num_edges(); ++e) {
    const auto& edge = coarse.edges[e];
    const Point a = coarse.vertices[edge.vertices[0]];
    const Point b = coarse.vertices[edge.vertices[1]];
    for (int s = 1; s < m; ++s) {
      const double t = static_cast<double>(s) / m;
      mesh.edge_nodes[e].push_back(mesh.num_fine_nodes());
      mesh.fine_vertices.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
      mesh.boundary_node.push_back(edge.on_boundary());
    }
  }

  // Local lattice (i, k), i + k <= m, at a + i/m (b - a) + k/m (c - a).
  const auto lattice = [m](int i, int k) { return k * (m + 1) - k * (k - 1) / 2 + i; };
  const int lattice_size = (m + 1) * (m + 2) / 2;

  mesh.interior_nodes.resize(coarse.triangles.size());
  mesh.element_triangles.resize(coarse.triangles.size());
  mesh.boundary_loop.resize(coarse.triangles.size());

  for (int t = 0; t < coarse.num_triangles(); ++t) {
    const auto& tri = coarse.triangles[t];
    const Point a = coarse.vertices[tri[0]];
    const Point b = coarse.vertices[tri[1]];
    const Point c = coarse.vertices[tri[2]];
    std::vector<int> local(lattice_size, -1);

    // Position s in (0, m) along local edge k, measured from local vertex k.
    const auto edge_node = [&](int k, int s) {
      const int e = coarse.triangle_edges[t][k];
      const bool forward = coarse.edges[e].vertices[0] == tri[k];
      return mesh.edge_nodes[e][forward ? s - 1 : m - s - 1];
    };

    for (int k = 0; k <= m; ++k) {
      for (int i = 0; i + k <= m; ++i) {
        int node = -1;
        if (i == 0 && k == 0) {
          node = tri[0];
        } else if (i == m) {
          node = tri[1];
        } else if (k == m) {
          node = tri[2];
        } else if (k == 0) {
          node = edge_node(0, i);
        } else if (i + k == m) {
          node = edge_node(1, k);
        } else if (i == 0) {
          node = edge_node(2, m - k);
        } else {
          node = mesh.num_fine_nodes();
          const double u = static_cast<double>(i) / m;
          const double v = static_cast<double>(k) / m;
          mesh.fine_vertices.push_back(
              {a.x + u * (b.x - a.x) + v * (c.x - a.x), a.y + u * (b.y - a.y) + v * (c.y - a.y)});
          mesh.boundary_node.push_back(false);
          mesh.interior_nodes[t].push_back(node);
        }
        local[lattice(i, k)] = node;
      }
    }

    for (int k = 0; k < m; ++k) {
      for (int i = 0; i + k < m; ++i) {
        mesh.element_triangles[t].push_back(static_cast<int>(mesh.fine_triangles.size()));
        mesh.fine_triangles.push_back(
            {local[lattice(i, k)], local[lattice(i + 1, k)], local[lattice(i, k + 1)]});
        mesh.parent_triangle.push_back(t);
        if (i + k + 1 < m) {
          mesh.element_triangles[t].push_back(static_cast<int>(mesh.fine_triangles.size()));
          mesh.fine_triangles.push_back({local[lattice(i + 1, k)], local[lattice(i + 1, k + 1)],
                                         local[lattice(i, k + 1)]});
          mesh.parent_triangle.push_back(t);
        }
      }
    }

    auto& loop = mesh.boundary_loop[t];
    for (int k = 0; k < 3; ++k) {
      loop.push_back(tri[k]);
      for (int s = 1; s < m; ++s) {
        loop.push_back(edge_node(k, s));
      }
    }
  }

  // Skeleton numbering: N_H first, then edge-interior nodes of interior edges.
  mesh.skeleton_dof.assign(mesh.fine_vertices.size(), -1);
  mesh.vertex_dof.assign(coarse.vertices.size(), -1);
  for (int v = 0; v < coarse.num_vertices(); ++v) {
    if (!coarse.boundary_vertex[v]) {
      mesh.vertex_dof[v] = mesh.num_skeleton_dofs();
      mesh.skeleton_dof[v] = mesh.num_skeleton_dofs();
      mesh.skeleton_nodes.push_back(v);
      mesh.dof_edge.push_back(-1);
    }
  }
  mesh.num_coarse_dofs = mesh.num_skeleton_dofs();
  for (int e = 0; e < coarse.num_edges(); ++e) {
    if (coarse.edges[e].on_boundary()) continue;
    for (int node : mesh.edge_nodes[e]) {
      mesh.skeleton_dof[node] = mesh.num_skeleton_dofs();
      mesh.skeleton_nodes.push_back(node);
      mesh.dof_edge.push_back(e);
    }
  }
  return mesh;
}

Patch patch(const CoarseMesh& mesh, int element, int layers) {
  if (element < 0 || element >= mesh.num_triangles()) {
    throw InvalidParameter("patch: element " + std::to_string(element) + " out of range");
  }
  if (layers < 1) {
    throw InvalidParameter("patch: layers must be >= 1");
  }
  std::vector<std::vector<int>> vertex_triangles(mesh.vertices.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int v : mesh.triangles[t]) vertex_triangles[v].push_back(t);
  }

  std::vector<bool> in(mesh.triangles.size(), false);
  in[element] = true;
  std::vector<int> frontier{element};
  for (int layer = 1; layer < layers && !frontier.empty(); ++layer) {
    std::vector<int> next;
    for (int t : frontier) {
      for (int v : mesh.triangles[t]) {
        for (int s : vertex_triangles[v]) {
          if (!in[s]) {
            in[s] = true;
            next.push_back(s);
          }
        }
      }
    }
    frontier = std::move(next);
  }

  Patch p;
  p.center = element;
  p.layers = layers;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (in[t]) p.elements.push_back(t);
  }
  return p;
}

double overlap_constant(const CoarseMesh& mesh, int max_layers) {
  double c = 0.0;
  for (int j = 1; j <= max_layers; ++j) {
    std::vector<int> count(mesh.triangles.size(), 0);
    for (int K = 0; K < mesh.num_triangles(); ++K) {
      for (int t : patch(mesh, K, j + 1).elements) ++count[t];
    }
    const int worst = *std::max_element(count.begin(), count.end());
    c = std::max(c, std::sqrt(static_cast<double>(worst)) / j);
  }
  return c;
}

bool edge_inside(const CoarseMesh& mesh, const Patch& p, int edge) {
  const auto& tris = mesh.edges[edge].triangles;
  return std::all_of(tris.begin(), tris.end(), [&](int t) { return p.contains(t); });
}

}  // namespace acms
