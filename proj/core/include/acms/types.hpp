#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace acms {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Nodal values of a P1 function on every fine node (zero on the Dirichlet
/// boundary for members of V_h).
struct FineFunction {
  Vector values;
};

/// Nodal values on the fine skeleton nodes, indexed by skeleton degree of
/// freedom (see TwoLevelMesh::skeleton_nodes). Values on the outer boundary
/// are implicitly zero.
struct SkeletonFunction {
  Vector values;
};

}  // namespace acms
