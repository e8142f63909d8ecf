#include "acms/corrector.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <unordered_map>

#include "acms/errors.hpp"
#include "refined_solve.hpp"

namespace acms {

namespace {

constexpr double kCorrectorTolerance = 1e-10;

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::nlod: return "nlod";
    case Method::lod: return "lod";
    case Method::nlsd: return "nlsd";
    case Method::lsd: return "lsd";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "nlod") return Method::nlod;
  if (lower == "lod") return Method::lod;
  if (lower == "nlsd") return Method::nlsd;
  if (lower == "lsd") return Method::lsd;
  throw InvalidParameter("unknown method '" + std::string(text) + "' (expected nlod, lod, nlsd or lsd)");
}

bool is_localized(Method method) { return method == Method::lod || method == Method::lsd; }
bool is_spectral(Method method) { return method == Method::nlsd || method == Method::lsd; }

CorrectorSubspace CorrectorSubspace::full(const TwoLevelMesh& mesh) {
  CorrectorSubspace out;
  const int ndofs = mesh.num_skeleton_dofs();
  std::vector<Triplet> entries;
  for (int d = mesh.num_coarse_dofs; d < ndofs; ++d) {
    entries.emplace_back(d, static_cast<int>(out.column_edge.size()), 1.0);
    out.column_edge.push_back(mesh.dof_edge[d]);
  }
  out.basis.resize(ndofs, out.size());
  out.basis.setFromTriplets(entries.begin(), entries.end());
  return out;
}

CorrectorSubspace CorrectorSubspace::delta(const SkeletonSplit& split) {
  CorrectorSubspace out;
  out.basis = split.delta_basis;
  out.column_edge = split.delta_edge;
  return out;
}

CorrectorSolver::CorrectorSolver(const TwoLevelMesh& mesh, const HarmonicExtender& extender,
                                 const SparseMatrix& skeleton_matrix, CorrectorSubspace subspace)
    : coarse_(mesh.coarse),
      extender_(extender),
      skeleton_matrix_(skeleton_matrix),
      subspace_(std::move(subspace)) {
  if (subspace_.basis.rows() != skeleton_matrix_.rows() ||
      subspace_.basis.cols() != subspace_.size()) {
    throw InvalidParameter("CorrectorSolver: subspace does not match the skeleton space");
  }
  projected_ = SparseMatrix(subspace_.basis.transpose() * (skeleton_matrix_ * subspace_.basis));
  projected_.prune(0.0);
}

Vector CorrectorSolver::element_rhs(int element, const SkeletonFunction& nu) const {
  return subspace_.basis.transpose() * extender_.apply_element(element, nu);
}

Vector CorrectorSolver::projected_residual(const SkeletonFunction& nu) const {
  return subspace_.basis.transpose() * (skeleton_matrix_ * nu.values);
}

SkeletonFunction CorrectorSolver::ideal(int element, const SkeletonFunction& nu) const {
  const Vector rhs = element_rhs(element, nu);
  SkeletonFunction out{Vector::Zero(skeleton_matrix_.rows())};
  if (subspace_.size() == 0 || rhs.isZero(0.0)) return out;
  if (!ideal_factor_) {
    ideal_factor_ = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>(projected_);
    if (ideal_factor_->info() != Eigen::Success) {
      ideal_factor_.reset();
      throw NumericalError("corrector: projected system is singular");
    }
  }
  const Vector c = detail::refined_solve(*ideal_factor_, projected_, rhs, kCorrectorTolerance, "corrector");
  out.values = subspace_.basis * c;
  return out;
}

SkeletonFunction CorrectorSolver::ideal_total(const SkeletonFunction& nu) const {
  SkeletonFunction out{Vector::Zero(skeleton_matrix_.rows())};
  if (subspace_.size() == 0) return out;
  const Vector rhs = projected_residual(nu);
  if (rhs.isZero(0.0)) return out;
  if (!ideal_factor_) {
    ideal_factor_ = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>(projected_);
    if (ideal_factor_->info() != Eigen::Success) {
      ideal_factor_.reset();
      throw NumericalError("corrector: projected system is singular");
    }
  }
  const Vector c = detail::refined_solve(*ideal_factor_, projected_, rhs, kCorrectorTolerance, "corrector");
  out.values = subspace_.basis * c;
  return out;
}

const CorrectorSolver::PatchSystem& CorrectorSolver::patch_system(int element, int layers) const {
  const Patch p = patch(coarse_, element, layers);
  auto it = patch_cache_.find(p.elements);
  if (it != patch_cache_.end()) return *it->second;

  auto sys = std::make_unique<PatchSystem>();
  std::vector<bool> edge_ok(coarse_.num_edges(), false);
  for (int e = 0; e < coarse_.num_edges(); ++e) edge_ok[e] = edge_inside(coarse_, p, e);
  for (int c = 0; c < subspace_.size(); ++c) {
    if (edge_ok[subspace_.column_edge[c]]) sys->columns.push_back(c);
  }
  if (!sys->columns.empty()) {
    std::unordered_map<int, int> local;
    for (std::size_t i = 0; i < sys->columns.size(); ++i) local[sys->columns[i]] = static_cast<int>(i);
    std::vector<Triplet> entries;
    for (int c : sys->columns) {
      for (SparseMatrix::InnerIterator jt(projected_, c); jt; ++jt) {
        const auto f = local.find(static_cast<int>(jt.row()));
        if (f != local.end()) entries.emplace_back(f->second, local[c], jt.value());
      }
    }
    const auto n = static_cast<Eigen::Index>(sys->columns.size());
    SparseMatrix a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());
    sys->matrix = a;
    sys->factor.compute(sys->matrix);
    if (sys->factor.info() != Eigen::Success) {
      throw NumericalError("corrector: patch system of element " + std::to_string(element) +
                           " is singular");
    }
  }
  auto& ref = *sys;
  patch_cache_.emplace(p.elements, std::move(sys));
  return ref;
}

SkeletonFunction CorrectorSolver::localized(int element, const SkeletonFunction& nu,
                                            int layers) const {
  if (layers < 1) throw InvalidParameter("localized corrector: layers must be >= 1");
  SkeletonFunction out{Vector::Zero(skeleton_matrix_.rows())};
  if (subspace_.size() == 0) return out;
  const PatchSystem& sys = patch_system(element, layers);
  if (sys.columns.empty()) return out;
  const Vector full_rhs = element_rhs(element, nu);
  Vector rhs(sys.columns.size());
  for (std::size_t i = 0; i < sys.columns.size(); ++i) {
    rhs[static_cast<Eigen::Index>(i)] = full_rhs[sys.columns[i]];
  }
  if (rhs.isZero(0.0)) return out;
  const Vector c = detail::refined_solve(sys.factor, sys.matrix, rhs, kCorrectorTolerance, "localized corrector");
  Vector coeffs = Vector::Zero(subspace_.size());
  for (std::size_t i = 0; i < sys.columns.size(); ++i) {
    coeffs[sys.columns[i]] = c[static_cast<Eigen::Index>(i)];
  }
  out.values = subspace_.basis * coeffs;
  return out;
}

SkeletonFunction CorrectorSolver::localized_total(const SkeletonFunction& nu, int layers) const {
  SkeletonFunction out{Vector::Zero(skeleton_matrix_.rows())};
  for (int k = 0; k < extender_.num_elements(); ++k) {
    if (extender_.boundary_values(k, nu).isZero(0.0)) continue;
    out.values += localized(k, nu, layers).values;
  }
  return out;
}

SkeletonFunction coarse_hat(const TwoLevelMesh& mesh, int vertex_dof) {
  if (vertex_dof < 0 || vertex_dof >= mesh.num_coarse_dofs) {
    throw InvalidParameter("coarse_hat: vertex dof out of range");
  }
  const int vertex = mesh.skeleton_nodes[vertex_dof];
  SkeletonFunction out{Vector::Zero(mesh.num_skeleton_dofs())};
  out.values[vertex_dof] = 1.0;
  const double m = mesh.subdivisions;
  for (int e = 0; e < mesh.coarse.num_edges(); ++e) {
    const CoarseEdge& ce = mesh.coarse.edges[e];
    if (ce.on_boundary()) continue;
    const bool first = ce.vertices[0] == vertex;
    if (!first && ce.vertices[1] != vertex) continue;
    const auto& nodes = mesh.edge_nodes[e];
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double t = static_cast<double>(k + 1) / m;
      out.values[mesh.skeleton_dof[nodes[k]]] = first ? 1.0 - t : t;
    }
  }
  return out;
}

MultiscaleBasis build_multiscale_basis(Method method, const TwoLevelMesh& mesh,
                                       const CorrectorSolver& solver, int layers,
                                       double alpha_stab, const SkeletonSplit* split) {
  if (is_localized(method) && layers < 1) {
    throw InvalidParameter("build_multiscale_basis: layers must be >= 1");
  }
  MultiscaleBasis out;
  out.method = method;
  out.layers = is_localized(method) ? layers : 0;
  out.alpha_stab = is_spectral(method) ? alpha_stab : 0.0;

  if (is_spectral(method)) {
    if (split == nullptr) {
      throw InvalidParameter("build_multiscale_basis: spectral methods need edge eigenbases");
    }
    for (Eigen::Index c = 0; c < split->pi_basis.cols(); ++c) {
      out.coarse.push_back(SkeletonFunction{Vector(split->pi_basis.col(c))});
      out.source_edge.push_back(split->pi_edge[static_cast<std::size_t>(c)]);
    }
  } else {
    for (int d = 0; d < mesh.num_coarse_dofs; ++d) {
      out.coarse.push_back(coarse_hat(mesh, d));
      out.source_edge.push_back(-1);
    }
  }

  out.functions.reserve(out.coarse.size());
  for (const SkeletonFunction& c : out.coarse) {
    const SkeletonFunction p =
        is_localized(method) ? solver.localized_total(c, layers) : solver.ideal_total(c);
    out.functions.push_back(SkeletonFunction{c.values - p.values});
  }
  return out;
}

}  // namespace acms
