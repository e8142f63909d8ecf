#pragma once

#include <cstdint>
#include <vector>

#include "acms/coefficient.hpp"
#include "acms/corrector.hpp"
#include "acms/geometry.hpp"
#include "acms/substructure.hpp"
#include "acms/types.hpp"

namespace acms {

/// Local Poincare constant of one element: sqrt(lambda_max) / H for the pencil
/// (rho-weighted L^2 Gram, s_tau) over traces on the boundary of tau that
/// vanish at the coarse vertices.
double local_poincare_constant(const TwoLevelMesh& mesh, const HarmonicExtender& extender, int tau);
/// Maximum over all elements.
double local_poincare_constant(const TwoLevelMesh& mesh, const HarmonicExtender& extender);

struct PowerIterationResult {
  double eigenvalue = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue of M x = lambda S x for SPD S by power iteration on S^-1 M.
PowerIterationResult largest_generalized_eigenvalue(const SparseMatrix& m, const SparseMatrix& s,
                                                    double tolerance = 1e-12, int max_iterations = 5000,
                                                    std::uint64_t seed = 1);

/// Global Poincare constant: sqrt of the largest eigenvalue of (skeleton mass, s).
double global_poincare_constant(const HarmonicExtender& extender);

/// |T(chi_e mu)|^2_tau / |T mu|^2_tau, where chi_e keeps only the values of mu
/// on the interior nodes of edge e (a side of tau). mu must vanish at the
/// coarse vertices.
double face_ratio(const TwoLevelMesh& mesh, const HarmonicExtender& extender, int tau, int edge,
                  const SkeletonFunction& mu);

/// |T I_H mu|^2_tau / |T mu|^2_tau with I_H the coarse nodal interpolant. Both
/// energies vanishing counts as ratio 1.
double interpolation_ratio(const TwoLevelMesh& mesh, const HarmonicExtender& extender, int tau,
                           const SkeletonFunction& mu);

/// Nodal interpolant on the coarse vertices, linear along every coarse edge.
SkeletonFunction coarse_interpolant(const TwoLevelMesh& mesh, const SkeletonFunction& mu);

/// Largest face and interpolation ratios over `samples` random skeleton functions.
struct RatioSummary {
  double max_face_ratio = 0.0;
  double max_interpolation_ratio = 0.0;
};
RatioSummary sampled_ratios(const TwoLevelMesh& mesh, const HarmonicExtender& extender, int samples,
                            std::uint64_t seed);

/// E_j = |T phi|^2 over the elements outside T_{j+1}(K), for j = 1..max_layers.
std::vector<double> tail_energies(const CoarseMesh& mesh, const HarmonicExtender& extender,
                                  const SkeletonFunction& phi, int element, int max_layers);

/// Least-squares line y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root mean square residual.
  double residual = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Geometric fit v_k ~ C ratio^k over positive values, from a line through
/// log v_k. Non-positive values are skipped.
struct GeometricFit {
  double ratio = 0.0;
  double residual = 0.0;
  int points = 0;
};
GeometricFit fit_geometric(const std::vector<double>& values);

struct DiagnosticsRecord {
  double poincare_local = 0.0;
  std::vector<double> poincare_per_element;
  double poincare_global = 0.0;
  double kappa = 1.0;
  double overlap = 0.0;
  double max_face_ratio = 0.0;
  double max_interpolation_ratio = 0.0;
};

DiagnosticsRecord diagnostics(const TwoLevelMesh& mesh, const CoefficientField& field,
                              const HarmonicExtender& extender, int samples = 8,
                              std::uint64_t seed = 1, int overlap_layers = 4);

}  // namespace acms
