#pragma once

#include <optional>
#include <vector>

#include "acms/assembly.hpp"
#include "acms/coefficient.hpp"
#include "acms/corrector.hpp"
#include "acms/geometry.hpp"
#include "acms/spectral.hpp"
#include "acms/substructure.hpp"
#include "acms/types.hpp"

namespace acms {

/// Everything a method run needs that does not depend on the method: mesh,
/// coefficients, assembled system, extension operators and the substructured
/// reference solution u_h = u_B + T lambda_h.
///
/// Not copyable or movable: correctors keep references into it.
class Discretization {
 public:
  Discretization(TwoLevelMesh mesh, CoefficientField field, Vector g);
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  TwoLevelMesh mesh;
  CoefficientField field;
  Vector g;  // nodal values of the right-hand side
  FineSystem system;
  HarmonicExtender extender;
  SparseMatrix skeleton_matrix;
  SparseMatrix skeleton_mass;

  FineFunction reference;         // monolithic fine solve u_h
  FineFunction bubble;            // exact u_B
  SkeletonFunction skeleton;      // lambda_h = trace of u_h
  FineFunction harmonic;          // T lambda_h

  /// ||g||_{L^2_rho}.
  double g_norm = 0.0;
  /// |u_h|_{H^1_A}.
  double reference_energy = 0.0;
  /// ||u_h||_{L^2_rho}.
  double reference_l2 = 0.0;
};

/// lambda_h from the skeleton system s(lambda_h, mu) = (rho g, T mu).
SkeletonFunction exact_skeleton(const Discretization& d);

/// Galerkin solve of s(lambda, mu_i) = (rho g, T mu_i) over the basis. Throws
/// NumericalError naming the first dependent basis function when the Gram
/// matrix is singular.
SkeletonFunction solve_skeleton(const MultiscaleBasis& basis, const Discretization& d);

/// Per-element Galerkin bubble approximation in the span of the retained
/// interior eigenfunctions.
FineFunction solve_bubble_ms(const std::vector<BubbleSpectralBasis>& bases, const Discretization& d);
std::vector<BubbleSpectralBasis> bubble_spectra(const Discretization& d, double target_precision);

/// Per element: |v|^2_{H^1_A(tau)} and ||v||^2_{L^2_rho(tau)}.
std::vector<double> element_energy_squared(const Discretization& d, const Vector& v);
std::vector<double> element_l2_squared(const Discretization& d, const Vector& v);

enum class BubbleMode { exact, spectral };

struct MethodParameters {
  Method method = Method::lod;
  int layers = 2;
  double alpha_stab = 4.0;
  /// Target precision; 0 means H.
  double target_precision = 0.0;
  BubbleMode bubble = BubbleMode::exact;
};

struct MultiscaleSolution {
  Method method = Method::lod;
  SkeletonFunction skeleton;
  FineFunction harmonic;
  FineFunction bubble;
  FineFunction combined;
  double H = 0.0;
  double h = 0.0;
  int layers = 0;
  double alpha_stab = 0.0;
  double target_precision = 0.0;
  double contrast = 1.0;
  int basis_size = 0;
  int pi_modes = 0;
  int delta_modes = 0;
};

struct ErrorReport {
  double energy = 0.0;
  double l2 = 0.0;
  double relative_energy = 0.0;
  double relative_l2 = 0.0;
  /// |T(lambda_h - lambda_ms)|_{H^1_A}.
  double harmonic_energy = 0.0;
  double relative_harmonic = 0.0;
  double g_norm = 0.0;
  /// c_PL * H * ||g|| for the low-contrast methods.
  double bound_low_contrast = 0.0;
  /// sqrt(9 alpha_stab) * target * ||g|| for the spectral methods.
  double bound_spectral = 0.0;
};

/// Builds the corrector space and basis for `params.method` and solves.
MultiscaleSolution solve_multiscale(const Discretization& d, const MethodParameters& params);

/// Same, with a prebuilt basis.
MultiscaleSolution assemble_solution(const Discretization& d, const MultiscaleBasis& basis,
                                     const MethodParameters& params);

/// `poincare_local` is c_PL from diagnostics; pass 0 to skip that bound.
ErrorReport error_report(const Discretization& d, const MultiscaleSolution& s,
                         double poincare_local = 0.0);

}  // namespace acms
