#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCholesky>

#include "acms/geometry.hpp"
#include "acms/spectral.hpp"
#include "acms/substructure.hpp"
#include "acms/types.hpp"

namespace acms {

enum class Method { nlod, lod, nlsd, lsd };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);
bool is_localized(Method method);
bool is_spectral(Method method);

/// Subspace of the fine-scale space (functions vanishing at N_H) spanned by
/// columns that each live on the interior nodes of one coarse edge.
struct CorrectorSubspace {
  SparseMatrix basis;
  std::vector<int> column_edge;

  int size() const { return static_cast<int>(column_edge.size()); }

  /// Nodal basis of every edge-interior skeleton dof.
  static CorrectorSubspace full(const TwoLevelMesh& mesh);
  /// Delta edge modes of a spectral split.
  static CorrectorSubspace delta(const SkeletonSplit& split);
};

/// Ideal and patch-localized correctors
///
///   s(P^K nu, mu) = s_K(nu, mu)  for all mu in the subspace (or its patch part).
///
/// Patch systems are factored once per distinct patch element set and cached.
/// The extender and skeleton matrix must outlive the solver.
class CorrectorSolver {
 public:
  CorrectorSolver(const TwoLevelMesh& mesh, const HarmonicExtender& extender,
                  const SparseMatrix& skeleton_matrix, CorrectorSubspace subspace);

  const CorrectorSubspace& subspace() const { return subspace_; }

  /// P^K nu.
  SkeletonFunction ideal(int element, const SkeletonFunction& nu) const;
  /// P nu = sum_K P^K nu, computed as one solve with right-hand side s(nu, .).
  SkeletonFunction ideal_total(const SkeletonFunction& nu) const;

  /// P^{K,j} nu, supported on edges whose neighbours all lie in T_j(K).
  SkeletonFunction localized(int element, const SkeletonFunction& nu, int layers) const;
  /// P^j nu = sum_K P^{K,j} nu.
  SkeletonFunction localized_total(const SkeletonFunction& nu, int layers) const;

  /// Subspace coordinates of s(nu, .) restricted to the subspace.
  Vector projected_residual(const SkeletonFunction& nu) const;

  std::size_t cached_patches() const { return patch_cache_.size(); }

 private:
  struct PatchSystem {
    std::vector<int> columns;
    SparseMatrix matrix;
    Eigen::SimplicialLDLT<SparseMatrix> factor;
  };

  const PatchSystem& patch_system(int element, int layers) const;
  Vector element_rhs(int element, const SkeletonFunction& nu) const;

  CoarseMesh coarse_;
  const HarmonicExtender& extender_;
  const SparseMatrix& skeleton_matrix_;
  CorrectorSubspace subspace_;
  SparseMatrix projected_;  // Q^T S Q
  mutable std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>> ideal_factor_;
  mutable std::map<std::vector<int>, std::unique_ptr<PatchSystem>> patch_cache_;
};

/// Multiscale basis: each coarse function c_i and its corrected version
/// c_i - P c_i (ideal) or c_i - P^j c_i (localized).
struct MultiscaleBasis {
  Method method = Method::nlod;
  int layers = 0;
  double alpha_stab = 0.0;
  std::vector<SkeletonFunction> coarse;
  std::vector<SkeletonFunction> functions;
  std::vector<int> source_edge;  // -1 for coarse-vertex functions

  int size() const { return static_cast<int>(functions.size()); }
};

/// Linear hat theta_H^i of coarse vertex dof i, linear along every coarse edge.
SkeletonFunction coarse_hat(const TwoLevelMesh& mesh, int vertex_dof);

/// NLOD/LOD correct the hats theta_H^i in the full fine space; NLSD/LSD
/// correct the Lambda_h^Pi basis of `split` in its Delta space.
MultiscaleBasis build_multiscale_basis(Method method, const TwoLevelMesh& mesh,
                                       const CorrectorSolver& solver, int layers,
                                       double alpha_stab, const SkeletonSplit* split = nullptr);

}  // namespace acms
