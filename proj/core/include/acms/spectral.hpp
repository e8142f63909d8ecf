#pragma once

#include <vector>

#include "acms/geometry.hpp"
#include "acms/substructure.hpp"
#include "acms/types.hpp"

namespace acms {

/// Eigenpairs of (S_hat + S_hat') psi = alpha (S_tilde + S_tilde') psi on one
/// interior edge, sorted by descending alpha. Columns of `eigenvectors` are
/// orthonormal in the (S_hat + S_hat') inner product. The first `num_pi`
/// columns (alpha >= threshold) form the Pi space; the rest the Delta space.
struct EdgeSpectralBasis {
  int edge = -1;
  double threshold = 0.0;
  Vector eigenvalues;
  Matrix eigenvectors;
  int num_pi = 0;
  /// Computed mu_i = 1/alpha_i before flooring, ascending.
  Vector reciprocals;
  /// Some reciprocal eigenvalues were floored.
  bool regularized = false;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  int num_delta() const { return size() - num_pi; }
};

/// Dense generalized symmetric eigensolve of the reciprocal pencil
/// S_tilde psi = (1/alpha) S_hat psi by congruence through the Cholesky factor
/// of S_hat + S_hat'. Reciprocals below 1e-12 of the largest (numerically
/// singular S_tilde) are floored and flagged as `regularized`. `alpha_stab`
/// must be >= 1; ties with the threshold go to the Pi space.
EdgeSpectralBasis edge_eigensolve(const EdgeBlocks& blocks, double alpha_stab);

/// Normwise backward error of pair i for A = S_hat + S_hat', B = S_tilde + S_tilde',
/// taken on the computed reciprocal mu = 1/alpha:
/// || mu A psi - B psi || / ((|mu| ||A|| + ||B||) ||psi||).
double pencil_residual(const EdgeBlocks& blocks, const EdgeSpectralBasis& basis, int i);

/// Edge blocks and eigenbases of every interior coarse edge, in edge order.
std::vector<EdgeSpectralBasis> edge_spectra(const TwoLevelMesh& mesh,
                                            const HarmonicExtender& extender,
                                            double target_precision, double alpha_stab);

/// Bases of Lambda_h^Pi and of the Delta fine space as sparse columns over the
/// skeleton dofs. Lambda_h^Pi lists the nodal functions of the interior coarse
/// vertices first (vanishing at every edge-interior node), then the Pi edge
/// modes extended by zero.
struct SkeletonSplit {
  SparseMatrix pi_basis;
  SparseMatrix delta_basis;
  std::vector<int> pi_edge;     // owning edge per Pi column, -1 for vertex functions
  std::vector<int> delta_edge;  // owning edge per Delta column
  std::vector<int> pi_per_edge; // indexed by coarse edge, 0 on boundary edges

  int num_pi_modes() const;
};

SkeletonSplit split_skeleton_spaces(const std::vector<EdgeSpectralBasis>& bases,
                                    const TwoLevelMesh& mesh);

/// Interior eigenpairs a_tau(v, psi) = lambda (rho v, psi)_tau with lambda
/// strictly below target^-2, ascending. Eigenvectors are rho-mass orthonormal.
struct BubbleSpectralBasis {
  int element = -1;
  Vector eigenvalues;
  Matrix eigenvectors;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

BubbleSpectralBasis bubble_eigensolve(int element, const HarmonicExtender& extender,
                                      double target_precision);

}  // namespace acms
