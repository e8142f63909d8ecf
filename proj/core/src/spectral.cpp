#include "acms/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "acms/errors.hpp"

namespace acms {

namespace {

constexpr double kShift = 1e-12;
constexpr double kIndefinite = 1e-8;

}  // namespace

EdgeSpectralBasis edge_eigensolve(const EdgeBlocks& blocks, double alpha_stab) {
  if (!(alpha_stab >= 1.0)) {
    throw InvalidParameter("edge_eigensolve: alpha_stab must be >= 1");
  }
  const Matrix a = blocks.S_hat[0] + blocks.S_hat[1];
  const Matrix b = blocks.S_tilde[0] + blocks.S_tilde[1];
  const Eigen::Index m = a.rows();

  EdgeSpectralBasis out;
  out.edge = blocks.edge;
  out.threshold = alpha_stab;

  // The left matrix carries the mass term and stays well conditioned; reduce
  // B psi = mu A psi with mu = 1/alpha through its Cholesky factor.
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("edge_eigensolve: left-hand matrix of edge " +
                         std::to_string(blocks.edge) + " is not positive definite");
  }
  const auto lower = llt.matrixL();
  Matrix c = lower.solve(b);
  c = lower.solve(c.transpose()).transpose();
  c = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("edge_eigensolve: symmetric eigensolve failed on edge " +
                         std::to_string(blocks.edge));
  }
  // Ascending mu is descending alpha.
  Vector mu = eig.eigenvalues();
  out.reciprocals = mu;
  const double scale = std::max(mu.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if (mu.minCoeff() < -kIndefinite * scale) {
    throw NumericalError("edge_eigensolve: right-hand matrix of edge " +
                             std::to_string(blocks.edge) + " is not positive definite",
                         mu.minCoeff());
  }
  const double floor = kShift * scale;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (mu[i] < floor) {
      mu[i] = floor;
      out.regularized = true;
    }
  }
  out.eigenvalues = mu.cwiseInverse();
  out.eigenvectors = llt.matrixU().solve(eig.eigenvectors());  // A-orthonormal
  out.num_pi = 0;
  while (out.num_pi < m && out.eigenvalues[out.num_pi] >= alpha_stab) ++out.num_pi;
  return out;
}

double pencil_residual(const EdgeBlocks& blocks, const EdgeSpectralBasis& basis, int i) {
  const Matrix a = blocks.S_hat[0] + blocks.S_hat[1];
  const Matrix b = blocks.S_tilde[0] + blocks.S_tilde[1];
  const Vector psi = basis.eigenvectors.col(i);
  // Homogeneous pair (1, mu): stays meaningful when alpha is infinite.
  const double mu = i < basis.reciprocals.size() ? basis.reciprocals[i] : 1.0 / basis.eigenvalues[i];
  const double scale = (std::abs(mu) * a.norm() + b.norm()) * psi.norm();
  return scale > 0.0 ? (mu * (a * psi) - b * psi).norm() / scale : 0.0;
}

std::vector<EdgeSpectralBasis> edge_spectra(const TwoLevelMesh& mesh,
                                            const HarmonicExtender& extender,
                                            double target_precision, double alpha_stab) {
  std::vector<EdgeSpectralBasis> out;
  for (int e = 0; e < mesh.coarse.num_edges(); ++e) {
    if (mesh.coarse.edges[e].on_boundary()) continue;
    out.push_back(edge_eigensolve(edge_blocks(mesh, extender, e, target_precision), alpha_stab));
  }
  return out;
}

int SkeletonSplit::num_pi_modes() const {
  return static_cast<int>(std::count_if(pi_edge.begin(), pi_edge.end(), [](int e) { return e >= 0; }));
}

SkeletonSplit split_skeleton_spaces(const std::vector<EdgeSpectralBasis>& bases,
                                    const TwoLevelMesh& mesh) {
  const int ndofs = mesh.num_skeleton_dofs();
  SkeletonSplit split;
  split.pi_per_edge.assign(mesh.coarse.num_edges(), 0);

  std::vector<bool> covered(mesh.coarse.num_edges(), false);
  std::vector<Triplet> pi;
  std::vector<Triplet> delta;
  for (int d = 0; d < mesh.num_coarse_dofs; ++d) {
    pi.emplace_back(d, static_cast<int>(split.pi_edge.size()), 1.0);
    split.pi_edge.push_back(-1);
  }
  for (const EdgeSpectralBasis& basis : bases) {
    const int e = basis.edge;
    if (e < 0 || e >= mesh.coarse.num_edges() || mesh.coarse.edges[e].on_boundary()) {
      throw InvalidParameter("split_skeleton_spaces: basis for an invalid edge");
    }
    covered[e] = true;
    const auto& nodes = mesh.edge_nodes[e];
    for (int i = 0; i < basis.size(); ++i) {
      const bool is_pi = i < basis.num_pi;
      auto& entries = is_pi ? pi : delta;
      auto& tags = is_pi ? split.pi_edge : split.delta_edge;
      const int col = static_cast<int>(tags.size());
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        entries.emplace_back(mesh.skeleton_dof[nodes[k]], col,
                             basis.eigenvectors(static_cast<Eigen::Index>(k), i));
      }
      tags.push_back(e);
    }
    split.pi_per_edge[e] = basis.num_pi;
  }
  for (int e = 0; e < mesh.coarse.num_edges(); ++e) {
    if (!mesh.coarse.edges[e].on_boundary() && !covered[e]) {
      throw InvalidParameter("split_skeleton_spaces: missing eigenbasis for edge " +
                             std::to_string(e));
    }
  }
  split.pi_basis.resize(ndofs, static_cast<Eigen::Index>(split.pi_edge.size()));
  split.pi_basis.setFromTriplets(pi.begin(), pi.end());
  split.delta_basis.resize(ndofs, static_cast<Eigen::Index>(split.delta_edge.size()));
  split.delta_basis.setFromTriplets(delta.begin(), delta.end());
  return split;
}

BubbleSpectralBasis bubble_eigensolve(int element, const HarmonicExtender& extender,
                                      double target_precision) {
  if (!(target_precision > 0.0)) {
    throw InvalidParameter("bubble_eigensolve: target precision must be positive");
  }
  const ElementBlocks& blk = extender.element(element);
  BubbleSpectralBasis out;
  out.element = element;
  const Eigen::Index ni = blk.interior_stiffness.rows();
  if (ni == 0) {
    out.eigenvalues = Vector(0);
    out.eigenvectors = Matrix(0, 0);
    return out;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(blk.interior_stiffness, blk.interior_mass);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("bubble_eigensolve: eigensolve failed on element " +
                         std::to_string(element));
  }
  const double cutoff = 1.0 / (target_precision * target_precision);
  Eigen::Index keep = 0;
  while (keep < ni && eig.eigenvalues()[keep] < cutoff) ++keep;
  out.eigenvalues = eig.eigenvalues().head(keep);
  out.eigenvectors = eig.eigenvectors().leftCols(keep);
  return out;
}

}  // namespace acms
