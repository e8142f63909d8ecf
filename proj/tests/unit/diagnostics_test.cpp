#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "acms/diagnostics.hpp"
#include "acms/errors.hpp"
#include "support.hpp"

namespace acms {
namespace {

TEST(PowerIteration, MatchesDenseGeneralizedEigensolver) {
  const int n = 30;
  Matrix a = Matrix::Zero(n, n);
  Matrix b = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0;
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = -1.0;
    b(i, i) = 1.0 + 0.1 * i;
  }
  const SparseMatrix s = a.sparseView();
  const SparseMatrix m = b.sparseView();
  const PowerIterationResult r = largest_generalized_eigenvalue(m, s, 1e-14, 100000);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> oracle(b, a, Eigen::EigenvaluesOnly);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.eigenvalue, oracle.eigenvalues().maxCoeff(), 1e-8 * oracle.eigenvalues().maxCoeff());
}

TEST(PowerIteration, EmptyAndIndefinite) {
  EXPECT_TRUE(largest_generalized_eigenvalue(SparseMatrix(0, 0), SparseMatrix(0, 0)).converged);
  SparseMatrix bad(2, 2);
  bad.insert(0, 0) = -1.0;
  bad.insert(1, 1) = 1.0;
  EXPECT_THROW(largest_generalized_eigenvalue(bad, bad), NumericalError);
}

TEST(Poincare, LocalConstantMatchesDensePencil) {
  const auto s = test::make_setup(2, 2, "checkerboard:1,10,4");
  const HarmonicExtender ext(s.mesh, s.field);
  for (int tau = 0; tau < ext.num_elements(); ++tau) {
    const ElementBlocks& blk = ext.element(tau);
    std::vector<int> pos;
    for (std::size_t i = 0; i < blk.boundary_dofs.size(); ++i) {
      if (blk.boundary_dofs[i] >= s.mesh.num_coarse_dofs) pos.push_back(static_cast<int>(i));
    }
    Matrix ms(pos.size(), pos.size());
    Matrix ss(pos.size(), pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (std::size_t j = 0; j < pos.size(); ++j) {
        ms(i, j) = blk.extension_mass(pos[i], pos[j]);
        ss(i, j) = blk.schur(pos[i], pos[j]);
      }
    }
    // Largest eigenvalue of the nonsymmetric product S^-1 M.
    Eigen::EigenSolver<Matrix> oracle(ss.llt().solve(ms), false);
    const double expected = std::sqrt(oracle.eigenvalues().real().maxCoeff()) / s.mesh.coarse.H;
    EXPECT_NEAR(local_poincare_constant(s.mesh, ext, tau), expected, 1e-10 * expected);
  }
}

// Scaling A by c scales both local and global constants by c^-1/2.
TEST(Poincare, CoefficientScaling) {
  const auto a = test::make_setup(3, 2, "checkerboard:1,5,6");
  const auto b = test::make_setup(3, 2, "checkerboard:4,20,6");
  const HarmonicExtender ea(a.mesh, a.field);
  const HarmonicExtender eb(b.mesh, b.field);
  EXPECT_NEAR(local_poincare_constant(b.mesh, eb), 0.5 * local_poincare_constant(a.mesh, ea), 1e-10);
  EXPECT_NEAR(global_poincare_constant(eb), 0.5 * global_poincare_constant(ea), 1e-8);
}

TEST(Poincare, GlobalConstantMatchesDenseSolver) {
  const auto s = test::make_setup(3, 2);
  const HarmonicExtender ext(s.mesh, s.field);
  const Matrix m(ext.skeleton_mass());
  const Matrix k(ext.skeleton_matrix());
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> oracle(m, k, Eigen::EigenvaluesOnly);
  EXPECT_NEAR(global_poincare_constant(ext), std::sqrt(oracle.eigenvalues().maxCoeff()), 1e-8);
}

TEST(Ratios, InterpolantAndFaceRatios) {
  const auto s = test::make_setup(3, 2, "random_checkerboard:1,100,6,3");
  const HarmonicExtender ext(s.mesh, s.field);
  const SkeletonFunction mu = test::random_skeleton(s.mesh, 4);
  const SkeletonFunction coarse = coarse_interpolant(s.mesh, mu);
  EXPECT_EQ(coarse.values.head(s.mesh.num_coarse_dofs), mu.values.head(s.mesh.num_coarse_dofs));
  // The interpolant is a projection.
  EXPECT_LT((coarse_interpolant(s.mesh, coarse).values - coarse.values).norm(), 1e-14);
  for (int tau = 0; tau < ext.num_elements(); ++tau) {
    EXPECT_NEAR(interpolation_ratio(s.mesh, ext, tau, coarse), 1.0, 1e-10);
    EXPECT_DOUBLE_EQ(interpolation_ratio(s.mesh, ext, tau, SkeletonFunction{Vector::Zero(mu.values.size())}), 1.0);
  }
  SkeletonFunction fine = mu;
  fine.values.head(s.mesh.num_coarse_dofs).setZero();
  for (int tau = 0; tau < ext.num_elements(); ++tau) {
    std::vector<int> interior_edges;
    for (int e : s.mesh.coarse.triangle_edges[tau]) {
      if (!s.mesh.coarse.edges[e].on_boundary()) interior_edges.push_back(e);
    }
    for (int e : interior_edges) {
      const double r = face_ratio(s.mesh, ext, tau, e, fine);
      EXPECT_GE(r, 0.0);
      if (interior_edges.size() == 1) EXPECT_NEAR(r, 1.0, 1e-12);
    }
  }
  const RatioSummary sum = sampled_ratios(s.mesh, ext, 3, 7);
  EXPECT_GE(sum.max_face_ratio, 1.0 - 1e-12);
  EXPECT_GT(sum.max_interpolation_ratio, 0.0);
  EXPECT_EQ(sum.max_face_ratio, sampled_ratios(s.mesh, ext, 3, 7).max_face_ratio);
}

TEST(TailEnergies, NonIncreasingAndBoundedByTotal) {
  const auto s = test::make_setup(6, 2);
  const HarmonicExtender ext(s.mesh, s.field);
  const SkeletonFunction mu = test::random_skeleton(s.mesh, 2);
  const std::vector<double> tails = tail_energies(s.mesh.coarse, ext, mu, 30, 14);
  double total = 0.0;
  for (double e : ext.element_energies(mu)) total += e;
  ASSERT_EQ(tails.size(), 14u);
  EXPECT_LE(tails[0], total);
  for (std::size_t k = 1; k < tails.size(); ++k) EXPECT_LE(tails[k], tails[k - 1]);
  EXPECT_EQ(tails.back(), 0.0);
}

TEST(Fits, LineAndGeometric) {
  const LinearFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.residual, 0.0, 1e-12);
  EXPECT_THROW(fit_line({1}, {1}), InvalidParameter);
  EXPECT_THROW(fit_line({1, 2}, {1}), InvalidParameter);

  const GeometricFit g = fit_geometric({3.0, 1.5, 0.75, 0.375});
  EXPECT_NEAR(g.ratio, 0.5, 1e-12);
  EXPECT_EQ(g.points, 4);
  const GeometricFit skip = fit_geometric({2.0, 0.0, 0.5});
  EXPECT_EQ(skip.points, 2);
  EXPECT_NEAR(skip.ratio, 0.5, 1e-12);
  EXPECT_EQ(fit_geometric({1.0}).points, 1);
}

TEST(Diagnostics, RecordIsConsistent) {
  const auto s = test::make_setup(3, 2, "checkerboard:1,100,6");
  const HarmonicExtender ext(s.mesh, s.field);
  const DiagnosticsRecord r = diagnostics(s.mesh, s.field, ext, 2, 1, 3);
  EXPECT_EQ(static_cast<int>(r.poincare_per_element.size()), ext.num_elements());
  EXPECT_DOUBLE_EQ(r.poincare_local, *std::max_element(r.poincare_per_element.begin(), r.poincare_per_element.end()));
  EXPECT_DOUBLE_EQ(r.kappa, 100.0);
  EXPECT_DOUBLE_EQ(r.overlap, overlap_constant(s.mesh.coarse, 3));
  EXPECT_GT(r.poincare_global, 0.0);
}

}  // namespace
}  // namespace acms
