#pragma once

#include <array>
#include <functional>
#include <vector>

#include "acms/coefficient.hpp"
#include "acms/geometry.hpp"
#include "acms/types.hpp"

namespace acms {

using LocalMatrix = Eigen::Matrix3d;

/// Exact P1 stiffness for a constant tensor: area * grad(phi_i)^T A grad(phi_j).
LocalMatrix local_stiffness(const std::array<Point, 3>& vertices, const Tensor2& a);
/// Consistent P1 mass for a constant weight: rho * area / 12 * [[2,1,1],[1,2,1],[1,1,2]].
LocalMatrix local_mass(const std::array<Point, 3>& vertices, double rho);

std::array<Point, 3> fine_triangle_vertices(const TwoLevelMesh& mesh, int t);

/// Global P1 matrices over all fine nodes (boundary rows included) and the
/// load (rho g, phi_i) with g interpolated as a P1 function.
struct FineSystem {
  SparseMatrix stiffness;
  SparseMatrix mass_rho;
  Vector load;
  std::vector<bool> dirichlet;
};

FineSystem assemble(const TwoLevelMesh& mesh, const CoefficientField& field, const Vector& g);

/// Nodal interpolant of a point function.
Vector sample(const TwoLevelMesh& mesh, const std::function<double(Point)>& f);

/// Relative residual target of the reference solve.
inline constexpr double kFineSolveTolerance = 1e-10;

/// Solves the Dirichlet-eliminated system; throws NumericalError if the
/// relative residual exceeds kFineSolveTolerance.
FineFunction fine_solve(const FineSystem& system);

/// Element-summed A-weighted H^1 seminorm squared, |u|^2_{H^1_A}. When
/// `elements` is non-empty only fine triangles whose parent is listed count.
double energy_squared(const TwoLevelMesh& mesh, const CoefficientField& field, const Vector& u,
                      const std::vector<int>& coarse_elements = {});
double weighted_l2_squared(const TwoLevelMesh& mesh, const CoefficientField& field,
                           const Vector& u, const std::vector<int>& coarse_elements = {});

/// |u - v|_{H^1_A} and ||u - v||_{L^2_rho}.
double energy_error(const FineFunction& u, const FineFunction& v, const TwoLevelMesh& mesh,
                    const CoefficientField& field);
double weighted_l2_error(const FineFunction& u, const FineFunction& v, const TwoLevelMesh& mesh,
                         const CoefficientField& field);

}  // namespace acms
