#include "acms/methods.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <string>

#include "acms/errors.hpp"
#include "refined_solve.hpp"

namespace acms {

namespace {

constexpr double kSkeletonTolerance = 1e-10;
double resolve_target(const Discretization& d, double target) {
  return target > 0.0 ? target : d.mesh.coarse.H;
}

}  // namespace

Discretization::Discretization(TwoLevelMesh mesh_in, CoefficientField field_in, Vector g_in)
    : mesh(std::move(mesh_in)),
      field(std::move(field_in)),
      g(std::move(g_in)),
      system(assemble(mesh, field, g)),
      extender(mesh, field),
      skeleton_matrix(extender.skeleton_matrix()),
      skeleton_mass(extender.skeleton_mass()) {
  reference = fine_solve(system);
  bubble = bubble_solve_exact(system, extender);
  skeleton = extender.trace(reference);
  harmonic = extender.extend(skeleton);
  g_norm = std::sqrt(std::max(0.0, g.dot(system.mass_rho * g)));
  reference_energy = std::sqrt(std::max(0.0, energy_squared(mesh, field, reference.values)));
  reference_l2 = std::sqrt(std::max(0.0, weighted_l2_squared(mesh, field, reference.values)));
}

SkeletonFunction exact_skeleton(const Discretization& d) {
  const Vector rhs = d.extender.skeleton_load(d.system.load);
  SkeletonFunction out{Vector::Zero(d.extender.num_dofs())};
  if (rhs.isZero(0.0) || rhs.size() == 0) return out;
  Eigen::SimplicialLDLT<SparseMatrix> factor(d.skeleton_matrix);
  if (factor.info() != Eigen::Success) {
    throw NumericalError("exact_skeleton: skeleton matrix factorization failed");
  }
  out.values = detail::refined_solve(factor, d.skeleton_matrix, rhs, kSkeletonTolerance, "exact_skeleton");
  return out;
}

SkeletonFunction solve_skeleton(const MultiscaleBasis& basis, const Discretization& d) {
  const int nd = d.extender.num_dofs();
  const int nb = basis.size();
  SkeletonFunction out{Vector::Zero(nd)};
  if (nb == 0) return out;

  Matrix b(nd, nb);
  Vector rhs(nb);
  for (int i = 0; i < nb; ++i) {
    b.col(i) = basis.functions[i].values;
    rhs[i] = d.system.load.dot(d.extender.extend(basis.functions[i]).values);
  }
  Matrix gram = b.transpose() * (d.skeleton_matrix * b);
  gram = 0.5 * (gram + gram.transpose());
  if (rhs.isZero(0.0)) return out;

  Eigen::LLT<Matrix> llt(gram);
  bool singular = llt.info() != Eigen::Success;
  Eigen::ColPivHouseholderQR<Matrix> qr;
  if (!singular) {
    const Vector diag = llt.matrixL().toDenseMatrix().diagonal();
    singular = diag.minCoeff() <= 1e-8 * diag.maxCoeff();
  }
  if (singular) {
    qr.compute(gram);
    const auto rank = qr.rank();
    const int offending = rank < nb ? qr.colsPermutation().indices()[rank] : 0;
    throw NumericalError("solve_skeleton: multiscale basis is rank deficient at function " +
                             std::to_string(offending) + " (rank " + std::to_string(rank) +
                             " of " + std::to_string(nb) + ")",
                         static_cast<double>(offending));
  }
  const Vector c = detail::refined_solve(llt, gram, rhs, kSkeletonTolerance, "solve_skeleton");
  out.values = b * c;
  return out;
}

std::vector<BubbleSpectralBasis> bubble_spectra(const Discretization& d, double target_precision) {
  std::vector<BubbleSpectralBasis> out;
  out.reserve(d.extender.num_elements());
  for (int tau = 0; tau < d.extender.num_elements(); ++tau) {
    out.push_back(bubble_eigensolve(tau, d.extender, target_precision));
  }
  return out;
}

FineFunction solve_bubble_ms(const std::vector<BubbleSpectralBasis>& bases, const Discretization& d) {
  FineFunction u{Vector::Zero(d.mesh.num_fine_nodes())};
  for (const BubbleSpectralBasis& basis : bases) {
    if (basis.size() == 0) continue;
    const ElementBlocks& blk = d.extender.element(basis.element);
    Vector f(blk.interior_nodes.size());
    for (std::size_t i = 0; i < blk.interior_nodes.size(); ++i) {
      f[static_cast<Eigen::Index>(i)] = d.system.load[blk.interior_nodes[i]];
    }
    // psi_i^T K psi_j = lambda_i delta_ij, so the Galerkin system is diagonal.
    const Vector c = (basis.eigenvectors.transpose() * f).cwiseQuotient(basis.eigenvalues);
    const Vector x = basis.eigenvectors * c;
    for (std::size_t i = 0; i < blk.interior_nodes.size(); ++i) {
      u.values[blk.interior_nodes[i]] = x[static_cast<Eigen::Index>(i)];
    }
  }
  return u;
}

std::vector<double> element_energy_squared(const Discretization& d, const Vector& v) {
  std::vector<double> out(d.mesh.coarse.num_triangles());
  for (int tau = 0; tau < d.mesh.coarse.num_triangles(); ++tau) {
    out[tau] = energy_squared(d.mesh, d.field, v, {tau});
  }
  return out;
}

std::vector<double> element_l2_squared(const Discretization& d, const Vector& v) {
  std::vector<double> out(d.mesh.coarse.num_triangles());
  for (int tau = 0; tau < d.mesh.coarse.num_triangles(); ++tau) {
    out[tau] = weighted_l2_squared(d.mesh, d.field, v, {tau});
  }
  return out;
}

MultiscaleSolution assemble_solution(const Discretization& d, const MultiscaleBasis& basis,
                                     const MethodParameters& params) {
  MultiscaleSolution s;
  s.method = basis.method;
  s.skeleton = solve_skeleton(basis, d);
  s.harmonic = d.extender.extend(s.skeleton);
  const double target = resolve_target(d, params.target_precision);
  if (params.bubble == BubbleMode::spectral) {
    s.bubble = solve_bubble_ms(bubble_spectra(d, target), d);
  } else {
    s.bubble = d.bubble;
  }
  s.combined = FineFunction{s.harmonic.values + s.bubble.values};
  s.H = d.mesh.coarse.H;
  s.h = d.mesh.h;
  s.layers = basis.layers;
  s.alpha_stab = basis.alpha_stab;
  s.target_precision = target;
  s.contrast = d.field.contrast();
  s.basis_size = basis.size();
  for (int e : basis.source_edge) {
    if (e >= 0) ++s.pi_modes;
  }
  return s;
}

MultiscaleSolution solve_multiscale(const Discretization& d, const MethodParameters& params) {
  const double target = resolve_target(d, params.target_precision);
  std::optional<SkeletonSplit> split;
  CorrectorSubspace subspace;
  if (is_spectral(params.method)) {
    split = split_skeleton_spaces(edge_spectra(d.mesh, d.extender, target, params.alpha_stab), d.mesh);
    subspace = CorrectorSubspace::delta(*split);
  } else {
    subspace = CorrectorSubspace::full(d.mesh);
  }
  const CorrectorSolver solver(d.mesh, d.extender, d.skeleton_matrix, std::move(subspace));
  const MultiscaleBasis basis = build_multiscale_basis(params.method, d.mesh, solver, params.layers,
                                                       params.alpha_stab, split ? &*split : nullptr);
  MultiscaleSolution s = assemble_solution(d, basis, params);
  s.delta_modes = solver.subspace().size();
  return s;
}

ErrorReport error_report(const Discretization& d, const MultiscaleSolution& s,
                         double poincare_local) {
  ErrorReport r;
  r.energy = energy_error(d.reference, s.combined, d.mesh, d.field);
  r.l2 = weighted_l2_error(d.reference, s.combined, d.mesh, d.field);
  const Vector diff = d.skeleton.values - s.skeleton.values;
  r.harmonic_energy = std::sqrt(std::max(0.0, diff.dot(d.skeleton_matrix * diff)));
  const auto relative = [](double e, double ref) { return ref > 0.0 ? e / ref : e; };
  r.relative_energy = relative(r.energy, d.reference_energy);
  r.relative_l2 = relative(r.l2, d.reference_l2);
  r.relative_harmonic = relative(r.harmonic_energy, d.reference_energy);
  r.g_norm = d.g_norm;
  if (poincare_local > 0.0) r.bound_low_contrast = poincare_local * s.H * r.g_norm;
  if (s.alpha_stab > 0.0) {
    r.bound_spectral = std::sqrt(9.0 * s.alpha_stab) * s.target_precision * r.g_norm;
  }
  return r;
}

}  // namespace acms
