#include "acms/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "acms/errors.hpp"
#include "acms/random.hpp"

namespace acms {

namespace {

// Boundary-loop positions of tau carrying an edge-interior skeleton dof.
std::vector<int> fine_scale_positions(const TwoLevelMesh& mesh, const ElementBlocks& blk) {
  std::vector<int> pos;
  for (int i = 0; i < static_cast<int>(blk.boundary_dofs.size()); ++i) {
    if (blk.boundary_dofs[i] >= mesh.num_coarse_dofs) pos.push_back(i);
  }
  return pos;
}

}  // namespace

double local_poincare_constant(const TwoLevelMesh& mesh, const HarmonicExtender& extender, int tau) {
  const ElementBlocks& blk = extender.element(tau);
  const std::vector<int> pos = fine_scale_positions(mesh, blk);
  if (pos.empty()) return 0.0;
  const auto n = static_cast<Eigen::Index>(pos.size());
  Matrix s(n, n);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      s(i, j) = blk.schur(pos[i], pos[j]);
      m(i, j) = blk.extension_mass(pos[i], pos[j]);
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(m, s, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("local_poincare_constant: eigensolve failed on element " +
                         std::to_string(tau));
  }
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff())) / mesh.coarse.H;
}

double local_poincare_constant(const TwoLevelMesh& mesh, const HarmonicExtender& extender) {
  double c = 0.0;
  for (int tau = 0; tau < extender.num_elements(); ++tau) {
    c = std::max(c, local_poincare_constant(mesh, extender, tau));
  }
  return c;
}

PowerIterationResult largest_generalized_eigenvalue(const SparseMatrix& m, const SparseMatrix& s,
                                                    double tolerance, int max_iterations,
                                                    std::uint64_t seed) {
  PowerIterationResult out;
  if (m.rows() == 0) {
    out.converged = true;
    return out;
  }
  Eigen::SimplicialLDLT<SparseMatrix> factor(s);
  if (factor.info() != Eigen::Success || !(factor.vectorD().minCoeff() > 0.0)) {
    throw NumericalError("largest_generalized_eigenvalue: right-hand matrix is not positive definite");
  }
  std::mt19937_64 rng(seed);
  Vector x(m.rows());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = 0.5 + uniform01(rng);
  double previous = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    x = factor.solve(m * x);
    x /= x.norm();
    const double lambda = x.dot(m * x) / x.dot(s * x);
    out.eigenvalue = lambda;
    out.iterations = it;
    if (it > 1 && std::abs(lambda - previous) <= tolerance * std::abs(lambda)) {
      out.converged = true;
      break;
    }
    previous = lambda;
  }
  return out;
}

double global_poincare_constant(const HarmonicExtender& extender) {
  const PowerIterationResult r =
      largest_generalized_eigenvalue(extender.skeleton_mass(), extender.skeleton_matrix());
  return std::sqrt(std::max(0.0, r.eigenvalue));
}

double face_ratio(const TwoLevelMesh& mesh, const HarmonicExtender& extender, int tau, int edge,
                  const SkeletonFunction& mu) {
  const ElementBlocks& blk = extender.element(tau);
  const Vector full = extender.boundary_values(tau, mu);
  Vector cut = Vector::Zero(full.size());
  for (int p : edge_positions(mesh, tau, edge)) cut[p] = full[p];
  const double den = full.dot(blk.schur * full);
  if (!(den > 0.0)) return 0.0;
  return cut.dot(blk.schur * cut) / den;
}

SkeletonFunction coarse_interpolant(const TwoLevelMesh& mesh, const SkeletonFunction& mu) {
  SkeletonFunction out{Vector::Zero(mesh.num_skeleton_dofs())};
  const auto vertex_value = [&](int v) {
    const int d = mesh.vertex_dof[v];
    return d >= 0 ? mu.values[d] : 0.0;
  };
  for (int d = 0; d < mesh.num_coarse_dofs; ++d) out.values[d] = mu.values[d];
  const double m = mesh.subdivisions;
  for (int e = 0; e < mesh.coarse.num_edges(); ++e) {
    const CoarseEdge& ce = mesh.coarse.edges[e];
    if (ce.on_boundary()) continue;
    const double a = vertex_value(ce.vertices[0]);
    const double b = vertex_value(ce.vertices[1]);
    const auto& nodes = mesh.edge_nodes[e];
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double t = static_cast<double>(k + 1) / m;
      out.values[mesh.skeleton_dof[nodes[k]]] = (1.0 - t) * a + t * b;
    }
  }
  return out;
}

double interpolation_ratio(const TwoLevelMesh& mesh, const HarmonicExtender& extender, int tau,
                           const SkeletonFunction& mu) {
  const ElementBlocks& blk = extender.element(tau);
  const Vector full = extender.boundary_values(tau, mu);
  const Vector interp = extender.boundary_values(tau, coarse_interpolant(mesh, mu));
  const double den = full.dot(blk.schur * full);
  const double num = interp.dot(blk.schur * interp);
  const double scale = blk.schur.diagonal().cwiseAbs().maxCoeff() *
                       std::max(full.squaredNorm(), interp.squaredNorm());
  const double floor = 1e-12 * scale;
  if (den <= floor) {
    return num <= floor ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return num / den;
}

RatioSummary sampled_ratios(const TwoLevelMesh& mesh, const HarmonicExtender& extender, int samples,
                            std::uint64_t seed) {
  RatioSummary out;
  std::mt19937_64 rng(seed);
  const int nd = mesh.num_skeleton_dofs();
  for (int k = 0; k < samples; ++k) {
    SkeletonFunction mu{Vector(nd)};
    for (int d = 0; d < nd; ++d) mu.values[d] = 2.0 * uniform01(rng) - 1.0;
    SkeletonFunction fine = mu;
    fine.values.head(mesh.num_coarse_dofs).setZero();
    for (int tau = 0; tau < mesh.coarse.num_triangles(); ++tau) {
      out.max_interpolation_ratio =
          std::max(out.max_interpolation_ratio, interpolation_ratio(mesh, extender, tau, mu));
      for (int e : mesh.coarse.triangle_edges[tau]) {
        if (mesh.coarse.edges[e].on_boundary()) continue;
        out.max_face_ratio = std::max(out.max_face_ratio, face_ratio(mesh, extender, tau, e, fine));
      }
    }
  }
  return out;
}

std::vector<double> tail_energies(const CoarseMesh& mesh, const HarmonicExtender& extender,
                                  const SkeletonFunction& phi, int element, int max_layers) {
  const std::vector<double> energy = extender.element_energies(phi);
  std::vector<double> out;
  out.reserve(std::max(0, max_layers));
  for (int j = 1; j <= max_layers; ++j) {
    const Patch p = patch(mesh, element, j + 1);
    double tail = 0.0;
    for (int tau = 0; tau < mesh.num_triangles(); ++tau) {
      if (!p.contains(tau)) tail += energy[tau];
    }
    out.push_back(std::max(0.0, tail));
  }
  return out;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidParameter("fit_line: need at least two points of matching length");
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  Matrix a(n, 2);
  Vector b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[i];
    b[i] = y[i];
  }
  const Vector c = a.colPivHouseholderQr().solve(b);
  LinearFit fit;
  fit.intercept = c[0];
  fit.slope = c[1];
  fit.residual = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(n));
  return fit;
}

GeometricFit fit_geometric(const std::vector<double>& values) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] > 0.0) {
      x.push_back(static_cast<double>(k));
      y.push_back(std::log(values[k]));
    }
  }
  GeometricFit out;
  out.points = static_cast<int>(x.size());
  if (x.size() < 2) return out;
  const LinearFit line = fit_line(x, y);
  out.ratio = std::exp(line.slope);
  out.residual = line.residual;
  return out;
}

DiagnosticsRecord diagnostics(const TwoLevelMesh& mesh, const CoefficientField& field,
                              const HarmonicExtender& extender, int samples, std::uint64_t seed,
                              int overlap_layers) {
  DiagnosticsRecord r;
  r.poincare_per_element.resize(extender.num_elements());
  for (int tau = 0; tau < extender.num_elements(); ++tau) {
    r.poincare_per_element[tau] = local_poincare_constant(mesh, extender, tau);
    r.poincare_local = std::max(r.poincare_local, r.poincare_per_element[tau]);
  }
  r.poincare_global = global_poincare_constant(extender);
  r.kappa = local_bounds(field, mesh).kappa_max;
  r.overlap = overlap_constant(mesh.coarse, overlap_layers);
  const RatioSummary ratios = sampled_ratios(mesh, extender, samples, seed);
  r.max_face_ratio = ratios.max_face_ratio;
  r.max_interpolation_ratio = ratios.max_interpolation_ratio;
  return r;
}

}  // namespace acms
