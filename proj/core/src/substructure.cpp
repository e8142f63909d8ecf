#include "acms/substructure.hpp"

#include <algorithm>
#include <string>

#include "acms/errors.hpp"

namespace acms {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix select(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  }
  return out;
}

// For a symmetric matrix with constants in its kernel the Schur complement has
// the same kernel. Rebuilding the diagonal from the off-diagonal row sums keeps
// that kernel exact; the direct difference loses it to cancellation at high
// contrast.
void restore_constant_kernel(Matrix& s) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (j != i) off += s(i, j);
    }
    s(i, i) = -off;
  }
}

}  // namespace

HarmonicExtender::HarmonicExtender(const TwoLevelMesh& mesh, const CoefficientField& field)
    : num_dofs_(mesh.num_skeleton_dofs()),
      num_fine_nodes_(mesh.num_fine_nodes()),
      skeleton_nodes_(mesh.skeleton_nodes) {
  if (field.tensor.size() != mesh.fine_triangles.size()) {
    throw InvalidParameter("HarmonicExtender: field does not match mesh");
  }
  const int nc = mesh.coarse.num_triangles();
  elements_.resize(nc);
  std::vector<int> local(mesh.num_fine_nodes(), -1);

  for (int tau = 0; tau < nc; ++tau) {
    ElementBlocks& blk = elements_[tau];
    blk.boundary_nodes = mesh.boundary_loop[tau];
    blk.interior_nodes = mesh.interior_nodes[tau];
    const int nb = static_cast<int>(blk.boundary_nodes.size());
    const int ni = static_cast<int>(blk.interior_nodes.size());
    for (int i = 0; i < nb; ++i) local[blk.boundary_nodes[i]] = i;
    for (int i = 0; i < ni; ++i) local[blk.interior_nodes[i]] = nb + i;
    blk.boundary_dofs.resize(nb);
    for (int i = 0; i < nb; ++i) blk.boundary_dofs[i] = mesh.skeleton_dof[blk.boundary_nodes[i]];

    Matrix k = Matrix::Zero(nb + ni, nb + ni);
    Matrix m = Matrix::Zero(nb + ni, nb + ni);
    for (int t : mesh.element_triangles[tau]) {
      const auto verts = fine_triangle_vertices(mesh, t);
      const LocalMatrix kt = local_stiffness(verts, field.tensor[t]);
      const LocalMatrix mt = local_mass(verts, field.rho[t]);
      const auto& tri = mesh.fine_triangles[t];
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          k(local[tri[a]], local[tri[b]]) += kt(a, b);
          m(local[tri[a]], local[tri[b]]) += mt(a, b);
        }
      }
    }
    for (int v : blk.boundary_nodes) local[v] = -1;
    for (int v : blk.interior_nodes) local[v] = -1;

    blk.interior_stiffness = k.bottomRightCorner(ni, ni);
    blk.interior_mass = m.bottomRightCorner(ni, ni);
    Matrix lift = Matrix::Identity(nb + ni, nb);
    if (ni > 0) {
      blk.interior_factor.compute(blk.interior_stiffness);
      if (blk.interior_factor.info() != Eigen::Success) {
        throw NumericalError("HarmonicExtender: interior block of element " +
                             std::to_string(tau) + " is not positive definite");
      }
      blk.extension = -blk.interior_factor.solve(k.bottomLeftCorner(ni, nb));
      lift.bottomRows(ni) = blk.extension;
    } else {
      blk.extension = Matrix::Zero(0, nb);
    }
    blk.schur = symmetrized(lift.transpose() * k * lift);
    if (ni > 0) restore_constant_kernel(blk.schur);
    blk.extension_mass = symmetrized(lift.transpose() * m * lift);
  }
}

FineFunction HarmonicExtender::extend(const SkeletonFunction& mu) const {
  FineFunction u{Vector::Zero(num_fine_nodes_)};
  for (int d = 0; d < num_dofs_; ++d) u.values[skeleton_nodes_[d]] = mu.values[d];
  for (int tau = 0; tau < num_elements(); ++tau) {
    const ElementBlocks& blk = elements_[tau];
    if (blk.interior_nodes.empty()) continue;
    const Vector inner = blk.extension * boundary_values(tau, mu);
    for (std::size_t i = 0; i < blk.interior_nodes.size(); ++i) {
      u.values[blk.interior_nodes[i]] = inner[static_cast<Eigen::Index>(i)];
    }
  }
  return u;
}

SkeletonFunction HarmonicExtender::trace(const FineFunction& u) const {
  SkeletonFunction mu{Vector(num_dofs_)};
  for (int d = 0; d < num_dofs_; ++d) mu.values[d] = u.values[skeleton_nodes_[d]];
  return mu;
}

Vector HarmonicExtender::boundary_values(int tau, const SkeletonFunction& mu) const {
  const auto& dofs = elements_[tau].boundary_dofs;
  Vector out(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = dofs[i] >= 0 ? mu.values[dofs[i]] : 0.0;
  }
  return out;
}

double HarmonicExtender::local_form(int tau, const SkeletonFunction& mu,
                                    const SkeletonFunction& nu) const {
  return boundary_values(tau, mu).dot(elements_[tau].schur * boundary_values(tau, nu));
}

std::vector<double> HarmonicExtender::element_energies(const SkeletonFunction& mu) const {
  std::vector<double> out(elements_.size());
  for (int tau = 0; tau < num_elements(); ++tau) out[tau] = local_form(tau, mu, mu);
  return out;
}

Vector HarmonicExtender::apply_element(int tau, const SkeletonFunction& mu) const {
  const ElementBlocks& blk = elements_[tau];
  const Vector local = blk.schur * boundary_values(tau, mu);
  Vector out = Vector::Zero(num_dofs_);
  for (std::size_t i = 0; i < blk.boundary_dofs.size(); ++i) {
    if (blk.boundary_dofs[i] >= 0) out[blk.boundary_dofs[i]] += local[static_cast<Eigen::Index>(i)];
  }
  return out;
}

SparseMatrix HarmonicExtender::assemble_boundary_form(bool mass) const {
  std::vector<Triplet> entries;
  for (const ElementBlocks& blk : elements_) {
    const Matrix& local = mass ? blk.extension_mass : blk.schur;
    const auto& dofs = blk.boundary_dofs;
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      if (dofs[i] < 0) continue;
      for (std::size_t j = 0; j < dofs.size(); ++j) {
        if (dofs[j] < 0) continue;
        entries.emplace_back(dofs[i], dofs[j],
                             local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
    }
  }
  SparseMatrix out(num_dofs_, num_dofs_);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

SparseMatrix HarmonicExtender::skeleton_matrix() const { return assemble_boundary_form(false); }
SparseMatrix HarmonicExtender::skeleton_mass() const { return assemble_boundary_form(true); }

Vector HarmonicExtender::skeleton_load(const Vector& load) const {
  Vector f(num_dofs_);
  for (int d = 0; d < num_dofs_; ++d) f[d] = load[skeleton_nodes_[d]];
  for (const ElementBlocks& blk : elements_) {
    if (blk.interior_nodes.empty()) continue;
    Vector inner(blk.interior_nodes.size());
    for (std::size_t i = 0; i < blk.interior_nodes.size(); ++i) {
      inner[static_cast<Eigen::Index>(i)] = load[blk.interior_nodes[i]];
    }
    const Vector lifted = blk.extension.transpose() * inner;
    for (std::size_t i = 0; i < blk.boundary_dofs.size(); ++i) {
      if (blk.boundary_dofs[i] >= 0) f[blk.boundary_dofs[i]] += lifted[static_cast<Eigen::Index>(i)];
    }
  }
  return f;
}

double skeleton_form(const SkeletonFunction& mu, const SkeletonFunction& nu,
                     const HarmonicExtender& extender) {
  double s = 0.0;
  for (int tau = 0; tau < extender.num_elements(); ++tau) s += extender.local_form(tau, mu, nu);
  return s;
}

FineFunction bubble_solve_exact(const FineSystem& system, const HarmonicExtender& extender) {
  FineFunction u{Vector::Zero(system.load.size())};
  for (int tau = 0; tau < extender.num_elements(); ++tau) {
    const ElementBlocks& blk = extender.element(tau);
    if (blk.interior_nodes.empty()) continue;
    Vector rhs(blk.interior_nodes.size());
    for (std::size_t i = 0; i < blk.interior_nodes.size(); ++i) {
      rhs[static_cast<Eigen::Index>(i)] = system.load[blk.interior_nodes[i]];
    }
    const Vector x = blk.interior_factor.solve(rhs);
    for (std::size_t i = 0; i < blk.interior_nodes.size(); ++i) {
      u.values[blk.interior_nodes[i]] = x[static_cast<Eigen::Index>(i)];
    }
  }
  return u;
}

std::vector<int> edge_positions(const TwoLevelMesh& mesh, int tau, int edge) {
  const auto& loop = mesh.boundary_loop[tau];
  std::vector<int> pos;
  pos.reserve(mesh.edge_nodes[edge].size());
  for (int node : mesh.edge_nodes[edge]) {
    const auto it = std::find(loop.begin(), loop.end(), node);
    if (it == loop.end()) {
      throw InvalidParameter("edge_positions: edge " + std::to_string(edge) +
                             " is not on the boundary of element " + std::to_string(tau));
    }
    pos.push_back(static_cast<int>(it - loop.begin()));
  }
  return pos;
}

EdgeBlocks edge_blocks(const TwoLevelMesh& mesh, const HarmonicExtender& extender, int edge,
                       double target_precision) {
  if (edge < 0 || edge >= mesh.coarse.num_edges()) {
    throw InvalidParameter("edge_blocks: edge index out of range");
  }
  if (!(target_precision > 0.0)) {
    throw InvalidParameter("edge_blocks: target precision must be positive");
  }
  const auto& ce = mesh.coarse.edges[edge];
  if (ce.on_boundary()) {
    throw NotApplicable("edge_blocks: edge " + std::to_string(edge) +
                        " lies on the outer boundary and carries no eigenproblem");
  }

  EdgeBlocks out;
  out.edge = edge;
  out.target_precision = target_precision;
  const double weight = 1.0 / (target_precision * target_precision);
  for (int side = 0; side < 2; ++side) {
    const int tau = ce.triangles[side];
    out.elements[side] = tau;
    const ElementBlocks& blk = extender.element(tau);
    const std::vector<int> e = edge_positions(mesh, tau, edge);
    std::vector<int> complement;
    std::vector<int> kept;  // e followed by the Dirichlet positions
    kept.insert(kept.end(), e.begin(), e.end());
    for (int i = 0; i < static_cast<int>(blk.boundary_dofs.size()); ++i) {
      if (std::find(e.begin(), e.end(), i) != e.end()) continue;
      (blk.boundary_dofs[i] >= 0 ? complement : kept).push_back(i);
    }
    out.S[side] = select(blk.schur, e, e);
    out.M[side] = select(blk.extension_mass, e, e);
    out.S_hat[side] = weight * out.M[side] + out.S[side];
    if (complement.empty()) {
      out.S_tilde[side] = out.S[side];
    } else {
      // Eliminate e^c from the element Schur complement while keeping the
      // Dirichlet positions, so the reduced matrix still annihilates constants.
      const Matrix s_cc = select(blk.schur, complement, complement);
      const Matrix s_ck = select(blk.schur, complement, kept);
      Eigen::LLT<Matrix> llt(s_cc);
      if (llt.info() != Eigen::Success) {
        throw NumericalError("edge_blocks: complement block of element " + std::to_string(tau) +
                             " is not positive definite");
      }
      Matrix reduced = symmetrized(select(blk.schur, kept, kept) - s_ck.transpose() * llt.solve(s_ck));
      restore_constant_kernel(reduced);
      const auto ne = static_cast<Eigen::Index>(e.size());
      out.S_tilde[side] = reduced.topLeftCorner(ne, ne);
    }
  }
  return out;
}

}  // namespace acms
