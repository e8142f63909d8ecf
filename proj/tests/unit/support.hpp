#pragma once

#include <random>
#include <string>

#include "acms/assembly.hpp"
#include "acms/coefficient.hpp"
#include "acms/geometry.hpp"
#include "acms/random.hpp"
#include "acms/substructure.hpp"

namespace acms::test {

struct Setup {
  TwoLevelMesh mesh;
  CoefficientField field;
};

inline Setup make_setup(int n, int r, const std::string& pattern = "constant:1",
                        const std::string& rho = "constant:1") {
  Setup s{refine(build_coarse_mesh(n), r), {}};
  s.field = build_field(s.mesh, PatternSpec::parse(pattern), WeightSpec::parse(rho));
  return s;
}

inline Vector random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 2.0 * uniform01(rng) - 1.0;
  return v;
}

inline SkeletonFunction random_skeleton(const TwoLevelMesh& mesh, std::uint64_t seed) {
  return {random_vector(mesh.num_skeleton_dofs(), seed)};
}

/// Dense copy of the Dirichlet-eliminated global stiffness over interior fine nodes.
struct InteriorSystem {
  std::vector<int> nodes;     // fine node per row
  std::vector<int> position;  // row per fine node, -1 on the boundary
  Matrix stiffness;
};

inline InteriorSystem interior_system(const TwoLevelMesh& mesh, const FineSystem& sys) {
  InteriorSystem out;
  out.position.assign(mesh.num_fine_nodes(), -1);
  for (int v = 0; v < mesh.num_fine_nodes(); ++v) {
    if (!mesh.boundary_node[v]) {
      out.position[v] = static_cast<int>(out.nodes.size());
      out.nodes.push_back(v);
    }
  }
  const Matrix k(sys.stiffness);
  const auto n = static_cast<Eigen::Index>(out.nodes.size());
  out.stiffness.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out.stiffness(i, j) = k(out.nodes[i], out.nodes[j]);
  }
  return out;
}

}  // namespace acms::test
