#include "acms/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <string>

#include "acms/errors.hpp"
#include "refined_solve.hpp"

namespace acms {

namespace {

double twice_area(const std::array<Point, 3>& p) {
  return (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
}

void check_triangle(const std::array<Point, 3>& p) {
  const double d = twice_area(p);
  const double scale = std::abs(p[1].x - p[0].x) + std::abs(p[1].y - p[0].y) +
                       std::abs(p[2].x - p[0].x) + std::abs(p[2].y - p[0].y);
  if (!(std::abs(d) > 1e-14 * scale * scale)) {
    throw GeometryError("degenerate triangle");
  }
}

template <class Local>
double element_quadratic_sum(const TwoLevelMesh& mesh, const Vector& u,
                             const std::vector<int>& coarse_elements, Local&& local) {
  double sum = 0.0;
  const auto add_triangle = [&](int t) {
    const auto& tri = mesh.fine_triangles[t];
    const Eigen::Vector3d ue(u[tri[0]], u[tri[1]], u[tri[2]]);
    sum += ue.dot(local(t) * ue);
  };
  if (coarse_elements.empty()) {
    for (int t = 0; t < static_cast<int>(mesh.fine_triangles.size()); ++t) add_triangle(t);
  } else {
    for (int tau : coarse_elements) {
      for (int t : mesh.element_triangles[tau]) add_triangle(t);
    }
  }
  return sum;
}

}  // namespace

LocalMatrix local_stiffness(const std::array<Point, 3>& p, const Tensor2& a) {
  check_triangle(p);
  const double d = twice_area(p);
  // grad(phi_i) = rot90(p_{i+2} - p_{i+1}) / (2 area)
  Eigen::Matrix<double, 2, 3> grad;
  for (int i = 0; i < 3; ++i) {
    const Point& q1 = p[(i + 1) % 3];
    const Point& q2 = p[(i + 2) % 3];
    grad(0, i) = (q1.y - q2.y) / d;
    grad(1, i) = (q2.x - q1.x) / d;
  }
  Eigen::Matrix2d A;
  A << a.xx, a.xy, a.xy, a.yy;
  return 0.5 * std::abs(d) * grad.transpose() * A * grad;
}

LocalMatrix local_mass(const std::array<Point, 3>& p, double rho) {
  check_triangle(p);
  const double area = 0.5 * std::abs(twice_area(p));
  LocalMatrix m;
  m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return rho * area / 12.0 * m;
}

std::array<Point, 3> fine_triangle_vertices(const TwoLevelMesh& mesh, int t) {
  const auto& tri = mesh.fine_triangles[t];
  return {mesh.fine_vertices[tri[0]], mesh.fine_vertices[tri[1]], mesh.fine_vertices[tri[2]]};
}

Vector sample(const TwoLevelMesh& mesh, const std::function<double(Point)>& f) {
  Vector g(mesh.num_fine_nodes());
  for (int v = 0; v < mesh.num_fine_nodes(); ++v) g[v] = f(mesh.fine_vertices[v]);
  return g;
}

FineSystem assemble(const TwoLevelMesh& mesh, const CoefficientField& field, const Vector& g) {
  const int nt = static_cast<int>(mesh.fine_triangles.size());
  const int nn = mesh.num_fine_nodes();
  if (static_cast<int>(field.tensor.size()) != nt) {
    throw InvalidParameter("assemble: field has " + std::to_string(field.tensor.size()) +
                           " elements, mesh has " + std::to_string(nt));
  }
  if (g.size() != nn) {
    throw InvalidParameter("assemble: load data must have one value per fine node");
  }

  std::vector<Triplet> k_entries;
  std::vector<Triplet> m_entries;
  k_entries.reserve(9 * static_cast<std::size_t>(nt));
  m_entries.reserve(9 * static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    const auto verts = fine_triangle_vertices(mesh, t);
    const LocalMatrix k = local_stiffness(verts, field.tensor[t]);
    const LocalMatrix m = local_mass(verts, field.rho[t]);
    const auto& tri = mesh.fine_triangles[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        k_entries.emplace_back(tri[i], tri[j], k(i, j));
        m_entries.emplace_back(tri[i], tri[j], m(i, j));
      }
    }
  }

  FineSystem sys;
  sys.stiffness.resize(nn, nn);
  sys.stiffness.setFromTriplets(k_entries.begin(), k_entries.end());
  sys.mass_rho.resize(nn, nn);
  sys.mass_rho.setFromTriplets(m_entries.begin(), m_entries.end());
  sys.load = sys.mass_rho * g;
  sys.dirichlet = mesh.boundary_node;
  return sys;
}

FineFunction fine_solve(const FineSystem& system) {
  const int nn = static_cast<int>(system.load.size());
  std::vector<int> free_index(nn, -1);
  std::vector<int> free_nodes;
  for (int v = 0; v < nn; ++v) {
    if (!system.dirichlet[v]) {
      free_index[v] = static_cast<int>(free_nodes.size());
      free_nodes.push_back(v);
    }
  }
  const int nf = static_cast<int>(free_nodes.size());

  std::vector<Triplet> entries;
  entries.reserve(system.stiffness.nonZeros());
  for (int k = 0; k < system.stiffness.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(system.stiffness, k); it; ++it) {
      const int r = free_index[it.row()];
      const int c = free_index[it.col()];
      if (r >= 0 && c >= 0) entries.emplace_back(r, c, it.value());
    }
  }
  SparseMatrix a(nf, nf);
  a.setFromTriplets(entries.begin(), entries.end());
  Vector b(nf);
  for (int i = 0; i < nf; ++i) b[i] = system.load[free_nodes[i]];

  FineFunction u{Vector::Zero(nn)};
  if (nf == 0 || b.norm() == 0.0) return u;

  Eigen::SimplicialLDLT<SparseMatrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("fine_solve: factorization failed");
  }
  const Vector x = detail::refined_solve(solver, a, b, kFineSolveTolerance, "fine_solve");
  for (int i = 0; i < nf; ++i) u.values[free_nodes[i]] = x[i];
  return u;
}

double energy_squared(const TwoLevelMesh& mesh, const CoefficientField& field, const Vector& u,
                      const std::vector<int>& coarse_elements) {
  return element_quadratic_sum(mesh, u, coarse_elements, [&](int t) {
    return local_stiffness(fine_triangle_vertices(mesh, t), field.tensor[t]);
  });
}

double weighted_l2_squared(const TwoLevelMesh& mesh, const CoefficientField& field,
                           const Vector& u, const std::vector<int>& coarse_elements) {
  return element_quadratic_sum(mesh, u, coarse_elements, [&](int t) {
    return local_mass(fine_triangle_vertices(mesh, t), field.rho[t]);
  });
}

double energy_error(const FineFunction& u, const FineFunction& v, const TwoLevelMesh& mesh,
                    const CoefficientField& field) {
  return std::sqrt(std::max(0.0, energy_squared(mesh, field, u.values - v.values)));
}

double weighted_l2_error(const FineFunction& u, const FineFunction& v, const TwoLevelMesh& mesh,
                         const CoefficientField& field) {
  return std::sqrt(std::max(0.0, weighted_l2_squared(mesh, field, u.values - v.values)));
}

}  // namespace acms
