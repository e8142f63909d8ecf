#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "acms/errors.hpp"
#include "acms/substructure.hpp"
#include "support.hpp"

namespace acms {
namespace {

struct Partition {
  std::vector<int> skeleton;  // rows of the interior system carrying a skeleton dof, in dof order
  std::vector<int> bubble;    // remaining rows
};

Partition partition(const TwoLevelMesh& mesh, const test::InteriorSystem& sys) {
  Partition p;
  for (int d = 0; d < mesh.num_skeleton_dofs(); ++d) p.skeleton.push_back(sys.position[mesh.skeleton_nodes[d]]);
  for (std::size_t i = 0; i < sys.nodes.size(); ++i) {
    if (mesh.skeleton_dof[sys.nodes[i]] < 0) p.bubble.push_back(static_cast<int>(i));
  }
  return p;
}

Matrix select(const Matrix& m, const std::vector<int>& r, const std::vector<int>& c) {
  Matrix out(r.size(), c.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) out(i, j) = m(r[i], c[j]);
  }
  return out;
}

class SubstructureFields : public ::testing::TestWithParam<const char*> {};

// s equals the Schur complement of the global stiffness onto the skeleton.
TEST_P(SubstructureFields, SkeletonMatrixIsGlobalSchurComplement) {
  const auto s = test::make_setup(3, 2, GetParam());
  const HarmonicExtender ext(s.mesh, s.field);
  const FineSystem sys = assemble(s.mesh, s.field, Vector::Zero(s.mesh.num_fine_nodes()));
  const auto in = test::interior_system(s.mesh, sys);
  const Partition p = partition(s.mesh, in);
  const Matrix kss = select(in.stiffness, p.skeleton, p.skeleton);
  const Matrix ksb = select(in.stiffness, p.skeleton, p.bubble);
  const Matrix kbb = select(in.stiffness, p.bubble, p.bubble);
  const Matrix oracle = kss - ksb * kbb.llt().solve(ksb.transpose());
  const Matrix sk(ext.skeleton_matrix());
  EXPECT_LT((sk - oracle).norm(), 1e-10 * oracle.norm());
}

TEST_P(SubstructureFields, ExtensionIsHarmonicAndFormIsItsEnergy) {
  const auto s = test::make_setup(3, 2, GetParam());
  const HarmonicExtender ext(s.mesh, s.field);
  const FineSystem sys = assemble(s.mesh, s.field, Vector::Zero(s.mesh.num_fine_nodes()));
  const SkeletonFunction mu = test::random_skeleton(s.mesh, 1);
  const SkeletonFunction nu = test::random_skeleton(s.mesh, 2);
  const FineFunction tmu = ext.extend(mu);
  const FineFunction tnu = ext.extend(nu);
  // Stiffness residual vanishes at every element-interior node.
  const Vector r = sys.stiffness * tmu.values;
  const double scale = Matrix(sys.stiffness).norm() * tmu.values.norm();
  for (int tau = 0; tau < s.mesh.coarse.num_triangles(); ++tau) {
    for (int v : s.mesh.interior_nodes[tau]) EXPECT_LT(std::abs(r[v]), 1e-12 * scale);
  }
  const double a = tnu.values.dot(sys.stiffness * tmu.values);
  EXPECT_NEAR(skeleton_form(mu, nu, ext), a, 1e-10 * std::abs(a) + 1e-14);
  EXPECT_NEAR(mu.values.dot(ext.skeleton_matrix() * nu.values), a, 1e-10 * std::abs(a) + 1e-14);
  EXPECT_EQ(ext.trace(tmu).values, mu.values);
  // Element energies add up to the total.
  double total = 0.0;
  for (double e : ext.element_energies(mu)) total += e;
  EXPECT_NEAR(total, skeleton_form(mu, mu, ext), 1e-10 * total);
  // The weighted mass form integrates the extensions.
  const double mass = tnu.values.dot(sys.mass_rho * tmu.values);
  EXPECT_NEAR(mu.values.dot(ext.skeleton_mass() * nu.values), mass, 1e-12 * std::abs(mass) + 1e-15);
}

TEST_P(SubstructureFields, ElementSchurAnnihilatesConstantsAndIsSemidefinite) {
  const auto s = test::make_setup(2, 3, GetParam());
  const HarmonicExtender ext(s.mesh, s.field);
  for (int tau = 0; tau < ext.num_elements(); ++tau) {
    const Matrix& st = ext.element(tau).schur;
    EXPECT_LT((st * Vector::Ones(st.rows())).norm(), 1e-12 * st.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(st, Eigen::EigenvaluesOnly);
    EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-12 * st.norm());
  }
}

// Exact bubble part equals one monolithic solve over all element-interior nodes.
TEST_P(SubstructureFields, BubbleSolveMatchesMonolithicInteriorSolve) {
  const auto s = test::make_setup(3, 2, GetParam());
  const HarmonicExtender ext(s.mesh, s.field);
  const FineSystem sys = assemble(s.mesh, s.field, test::random_vector(s.mesh.num_fine_nodes(), 9));
  const FineFunction ub = bubble_solve_exact(sys, ext);
  const auto in = test::interior_system(s.mesh, sys);
  const Partition p = partition(s.mesh, in);
  const Matrix kbb = select(in.stiffness, p.bubble, p.bubble);
  Vector f(p.bubble.size());
  for (std::size_t i = 0; i < p.bubble.size(); ++i) f[i] = sys.load[in.nodes[p.bubble[i]]];
  const Vector x = kbb.llt().solve(f);
  for (std::size_t i = 0; i < p.bubble.size(); ++i) {
    EXPECT_NEAR(ub.values[in.nodes[p.bubble[i]]], x[i], 1e-10 * x.cwiseAbs().maxCoeff());
  }
  for (int v = 0; v < s.mesh.num_fine_nodes(); ++v) {
    if (s.mesh.skeleton_dof[v] >= 0 || s.mesh.boundary_node[v]) EXPECT_EQ(ub.values[v], 0.0);
  }
}

TEST_P(SubstructureFields, SplittingReproducesFineSolution) {
  const auto s = test::make_setup(3, 2, GetParam());
  const HarmonicExtender ext(s.mesh, s.field);
  const FineSystem sys = assemble(s.mesh, s.field, test::random_vector(s.mesh.num_fine_nodes(), 4));
  const FineFunction u = fine_solve(sys);
  const FineFunction ub = bubble_solve_exact(sys, ext);
  const FineFunction uh = ext.extend(ext.trace(u));
  const double ref = std::sqrt(energy_squared(s.mesh, s.field, u.values));
  EXPECT_LT(energy_error(u, FineFunction{ub.values + uh.values}, s.mesh, s.field), 1e-10 * ref);
  // Skeleton load: F . mu = (rho g, T mu).
  const SkeletonFunction mu = test::random_skeleton(s.mesh, 6);
  const double f = sys.load.dot(ext.extend(mu).values);
  EXPECT_NEAR(ext.skeleton_load(sys.load).dot(mu.values), f, 1e-12 * std::abs(f) + 1e-15);
}

TEST_P(SubstructureFields, EdgeBlocksMatchDirectEliminationAndAreOrdered) {
  const auto s = test::make_setup(3, 2, GetParam());
  const HarmonicExtender ext(s.mesh, s.field);
  const double target = s.mesh.coarse.H;
  for (int e = 0; e < s.mesh.coarse.num_edges(); ++e) {
    if (s.mesh.coarse.edges[e].on_boundary()) {
      EXPECT_THROW(edge_blocks(s.mesh, ext, e, target), NotApplicable);
      continue;
    }
    const EdgeBlocks b = edge_blocks(s.mesh, ext, e, target);
    for (int side = 0; side < 2; ++side) {
      const int tau = b.elements[side];
      const ElementBlocks& blk = ext.element(tau);
      const std::vector<int> pos = edge_positions(s.mesh, tau, e);
      ASSERT_EQ(static_cast<int>(pos.size()), s.mesh.edge_interior_count());
      for (std::size_t k = 0; k < pos.size(); ++k) {
        EXPECT_EQ(blk.boundary_nodes[pos[k]], s.mesh.edge_nodes[e][k]);
      }
      // Element stiffness on boundary loop + interior; eliminate the interior
      // and the free part of e^c in one step.
      const int nb = static_cast<int>(blk.boundary_nodes.size());
      const Matrix k = [&] {
        std::vector<int> local(s.mesh.num_fine_nodes(), -1);
        for (int i = 0; i < nb; ++i) local[blk.boundary_nodes[i]] = i;
        for (std::size_t i = 0; i < blk.interior_nodes.size(); ++i) local[blk.interior_nodes[i]] = nb + static_cast<int>(i);
        Matrix out = Matrix::Zero(nb + blk.interior_nodes.size(), nb + blk.interior_nodes.size());
        for (int t : s.mesh.element_triangles[tau]) {
          const LocalMatrix kt = local_stiffness(fine_triangle_vertices(s.mesh, t), s.field.tensor[t]);
          const auto& tri = s.mesh.fine_triangles[t];
          for (int a = 0; a < 3; ++a) {
            for (int c = 0; c < 3; ++c) out(local[tri[a]], local[tri[c]]) += kt(a, c);
          }
        }
        return out;
      }();
      std::vector<int> eliminated;
      for (int i = 0; i < nb; ++i) {
        if (blk.boundary_dofs[i] >= 0 && std::find(pos.begin(), pos.end(), i) == pos.end()) eliminated.push_back(i);
      }
      for (std::size_t i = 0; i < blk.interior_nodes.size(); ++i) eliminated.push_back(nb + static_cast<int>(i));
      const Matrix kff = select(k, eliminated, eliminated);
      const Matrix kfe = select(k, eliminated, pos);
      const Matrix oracle = select(k, pos, pos) - kfe.transpose() * kff.llt().solve(kfe);
      EXPECT_LT((b.S_tilde[side] - oracle).norm(), 1e-9 * b.S[side].norm()) << "edge " << e;

      EXPECT_LT((b.S_hat[side] - b.S[side] - b.M[side] / (target * target)).norm(), 1e-14 * b.S_hat[side].norm());
      // S_tilde <= S <= S_hat.
      Eigen::SelfAdjointEigenSolver<Matrix> lo(b.S[side] - b.S_tilde[side], Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<Matrix> hi(b.S_hat[side] - b.S[side], Eigen::EigenvaluesOnly);
      EXPECT_GT(lo.eigenvalues().minCoeff(), -1e-10 * b.S_hat[side].norm());
      EXPECT_GT(hi.eigenvalues().minCoeff(), -1e-10 * b.S_hat[side].norm());
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Fields, SubstructureFields,
                         ::testing::Values("constant:1", "tensor:2,0.4,1", "random_checkerboard:1,1e4,12,3",
                                           "inclusions:1,1e6,3,0.7"));

TEST(HarmonicExtender, LinearTraceExtendsToLinearFunction) {
  const auto s = test::make_setup(3, 3);
  const HarmonicExtender ext(s.mesh, s.field);
  const auto f = [](Point p) { return 0.3 + 2.0 * p.x - 1.5 * p.y; };
  const Vector u = sample(s.mesh, f);
  // Skeleton functions are zero on the outer boundary, so compare element by
  // element on elements away from it through the boundary-loop values.
  for (int tau = 0; tau < ext.num_elements(); ++tau) {
    const ElementBlocks& blk = ext.element(tau);
    Vector bv(blk.boundary_nodes.size());
    for (std::size_t i = 0; i < blk.boundary_nodes.size(); ++i) bv[i] = u[blk.boundary_nodes[i]];
    const Vector inner = blk.extension * bv;
    for (std::size_t i = 0; i < blk.interior_nodes.size(); ++i) {
      EXPECT_NEAR(inner[i], u[blk.interior_nodes[i]], 1e-12);
    }
  }
}

TEST(HarmonicExtender, RejectsMismatchedField) {
  const auto s = test::make_setup(2, 1);
  const auto other = test::make_setup(2, 2);
  EXPECT_THROW(HarmonicExtender(s.mesh, other.field), InvalidParameter);
}

TEST(EdgeBlocks, RejectsBadArguments) {
  const auto s = test::make_setup(2, 1);
  const HarmonicExtender ext(s.mesh, s.field);
  EXPECT_THROW(edge_blocks(s.mesh, ext, -1, 0.5), InvalidParameter);
  int interior = 0;
  while (s.mesh.coarse.edges[interior].on_boundary()) ++interior;
  EXPECT_THROW(edge_blocks(s.mesh, ext, interior, 0.0), InvalidParameter);
}

}  // namespace
}  // namespace acms
