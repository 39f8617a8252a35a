#include "pqga/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace pqga {

Vector project_ball(const Vector& x, double radius_sq) {
  if (radius_sq <= 0) {
    throw std::invalid_argument("project_ball: radius_sq must be positive");
  }
  if (!x.allFinite()) {
    throw std::invalid_argument("project_ball: nonfinite input");
  }
  const double nsq = x.squaredNorm();
  if (nsq <= radius_sq) return x;
  return x * (std::sqrt(radius_sq) / std::sqrt(nsq));
}

Vector project_halfspace(const Vector& x, const Vector& a, double b) {
  const double viol = a.dot(x) - b;
  if (viol <= 0) return x;
  return x - (viol / a.squaredNorm()) * a;
}

Vector project_ball_halfspaces(const Vector& x, double radius_sq,
                               const Matrix& A, const Vector& b,
                               double stop_tol, int max_sweeps) {
  const Eigen::Index m = A.rows();
  // Dykstra: one correction term per set (ball + m halfspaces).
  std::vector<Vector> corrections(static_cast<std::size_t>(m) + 1,
                                  Vector::Zero(x.size()));
  Vector z = x;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const Vector z_before = z;
    {
      Vector y = z + corrections[0];
      Vector p = project_ball(y, radius_sq);
      corrections[0] = y - p;
      z = p;
    }
    for (Eigen::Index c = 0; c < m; ++c) {
      Vector y = z + corrections[static_cast<std::size_t>(c) + 1];
      Vector p = project_halfspace(y, A.row(c).transpose(), b(c));
      corrections[static_cast<std::size_t>(c) + 1] = y - p;
      z = p;
    }
    if ((z - z_before).norm() <= stop_tol) break;
  }
  return z;
}

}  // namespace pqga
