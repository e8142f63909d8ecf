#pragma once

#include <array>
#include <vector>

#include "acms/assembly.hpp"
#include "acms/coefficient.hpp"
#include "acms/geometry.hpp"
#include "acms/types.hpp"

namespace acms {

/// Dense per-element operators of one coarse triangle. Boundary quantities use
/// the closed boundary loop order of TwoLevelMesh::boundary_loop, including the
/// nodes on the outer boundary (which carry no skeleton dof).
struct ElementBlocks {
  std::vector<int> boundary_nodes;
  std::vector<int> boundary_dofs;  // skeleton dof per boundary node, -1 on the outer boundary
  std::vector<int> interior_nodes;

  Matrix interior_stiffness;  // K_II
  Matrix interior_mass;       // rho-weighted M_II
  Eigen::LLT<Matrix> interior_factor;
  /// Discrete harmonic extension, interior values = extension * boundary values.
  Matrix extension;
  /// Schur energy S^tau on the boundary loop.
  Matrix schur;
  /// rho-weighted L^2 Gram matrix of the extended boundary functions.
  Matrix extension_mass;
};

/// Element-local discrete harmonic extension T and the skeleton forms built
/// from it. Holds no reference to the mesh it was built from.
class HarmonicExtender {
 public:
  HarmonicExtender(const TwoLevelMesh& mesh, const CoefficientField& field);

  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_dofs() const { return num_dofs_; }
  int num_fine_nodes() const { return num_fine_nodes_; }
  const ElementBlocks& element(int tau) const { return elements_[tau]; }

  /// Tmu: skeleton values copied, interiors filled element by element.
  FineFunction extend(const SkeletonFunction& mu) const;
  /// Trace on the skeleton dofs.
  SkeletonFunction trace(const FineFunction& u) const;

  /// Values of mu on the boundary loop of tau (zeros on the outer boundary).
  Vector boundary_values(int tau, const SkeletonFunction& mu) const;

  /// s_tau(mu, nu).
  double local_form(int tau, const SkeletonFunction& mu, const SkeletonFunction& nu) const;
  /// s_tau(mu, mu) for every coarse element.
  std::vector<double> element_energies(const SkeletonFunction& mu) const;
  /// Vector v with v . nu = s_tau(mu, nu) for all nu.
  Vector apply_element(int tau, const SkeletonFunction& mu) const;

  /// Global s(., .) and the rho-weighted L^2 form of extensions over Lambda_h.
  SparseMatrix skeleton_matrix() const;
  SparseMatrix skeleton_mass() const;
  /// F with F . mu = (rho g, T mu) for the assembled load vector.
  Vector skeleton_load(const Vector& load) const;

 private:
  int num_dofs_ = 0;
  int num_fine_nodes_ = 0;
  std::vector<int> skeleton_nodes_;
  std::vector<ElementBlocks> elements_;

  SparseMatrix assemble_boundary_form(bool mass) const;
};

/// s(mu, nu) = sum over elements of s_tau(mu, nu).
double skeleton_form(const SkeletonFunction& mu, const SkeletonFunction& nu,
                     const HarmonicExtender& extender);

/// Exact bubble part u_h^B: independent interior solves with the assembled load.
FineFunction bubble_solve_exact(const FineSystem& system, const HarmonicExtender& extender);

/// Edge blocks for an interior coarse edge e shared by elements[0] and
/// elements[1]. Matrices are indexed by the edge-interior nodes in
/// TwoLevelMesh::edge_nodes order.
struct EdgeBlocks {
  int edge = -1;
  std::array<int, 2> elements{};
  double target_precision = 0.0;
  std::array<Matrix, 2> S;        // S_ee
  std::array<Matrix, 2> M;        // M_ee
  std::array<Matrix, 2> S_hat;    // target^-2 M_ee + S_ee
  std::array<Matrix, 2> S_tilde;  // S_ee - S_ee^c (S_e^ce^c)^-1 S_e^ce
};

/// Throws NotApplicable for edges on the outer boundary.
EdgeBlocks edge_blocks(const TwoLevelMesh& mesh, const HarmonicExtender& extender, int edge,
                       double target_precision);

/// Positions of the edge-interior nodes of `edge` inside the boundary loop of
/// `tau`, in edge order.
std::vector<int> edge_positions(const TwoLevelMesh& mesh, int tau, int edge);

}  // namespace acms
