#include "pqga/synthetic.hpp"

#include <cmath>
#include <stdexcept>

namespace pqga::synthetic {

void SyntheticConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("synthetic: dim must be positive");
  if (!(feasible_radius > 0) || !(target_radius > 0) || target_drift < 0) {
    throw std::invalid_argument("synthetic: radii must be positive");
  }
  if (target_radius > feasible_radius) {
    throw std::invalid_argument("synthetic: targets must stay inside the feasible set");
  }
  if (constraint == Constraint::kBall) {
    if (!(inner_radius > 0) || inner_radius > feasible_radius) {
      throw std::invalid_argument("synthetic: inner radius must lie in (0, feasible_radius]");
    }
  } else {
    if (affine_A.rows() == 0 || affine_A.rows() != affine_b.size() ||
        affine_A.cols() != dim) {
      throw std::invalid_argument("synthetic: affine constraint shape mismatch");
    }
    if ((affine_b.array() <= 0).any()) {
      throw std::invalid_argument("synthetic: affine offsets must be positive");
    }
  }
}

SyntheticSimulation::SyntheticSimulation(const SyntheticConfig& config,
                                         std::uint64_t seed, int horizon)
    : config_(config) {
  config_.validate();
  if (horizon < 1) throw std::invalid_argument("synthetic: horizon must be positive");
  RngStream rng = derive_stream(seed, "targets");
  targets_.reserve(horizon);
  Vector direction(config_.dim);
  for (int d = 0; d < config_.dim; ++d) direction(d) = rng.normal();
  direction.normalize();
  for (int t = 0; t < horizon; ++t) {
    targets_.push_back(config_.target_radius * direction);
    Vector step(config_.dim);
    for (int d = 0; d < config_.dim; ++d) step(d) = rng.normal();
    direction += config_.target_drift * step;
    direction.normalize();
  }
}

ProblemInstance SyntheticSimulation::problem() const {
  ProblemInstance p;
  const SyntheticConfig& cfg = config_;
  const double r = cfg.feasible_radius;
  const double r_sq = r * r;
  p.decision_dim = cfg.dim;

  p.loss_value = [this](int t, const Vector& x) {
    return (x - target(t)).squaredNorm();
  };
  p.loss_gradient = [this](int t, const Vector& x) {
    return Vector(2.0 * (x - target(t)));
  };
  p.project_feasible = [r_sq](const Vector& x) { return project_ball(x, r_sq); };

  // ||x - a||^2 is exactly 2-strongly convex and 2-smooth.
  p.strong_convexity = 1.0;
  p.smoothness = 1.0;
  p.grad_bound = 2.0 * (r + cfg.target_radius);
  p.set_radius = 2.0 * r;

  if (cfg.constraint == SyntheticConfig::Constraint::kBall) {
    const double inner_sq = cfg.inner_radius * cfg.inner_radius;
    p.constraint_dim = 1;
    p.constraint = [inner_sq](const Vector& x) {
      Vector g(1);
      g(0) = x.squaredNorm() - inner_sq;
      return g;
    };
    p.constraint_jacobian = [](const Vector& x) {
      Matrix j(1, x.size());
      j.row(0) = 2.0 * x.transpose();
      return j;
    };
    p.project_constrained = [r_sq, inner_sq](const Vector& x) {
      return project_ball(x, std::min(r_sq, inner_sq));
    };
    p.constraint_curvature = 2.0;
    p.constraint_lipschitz = 2.0 * r;
    p.constraint_bound = std::max(inner_sq, r_sq - inner_sq);
    p.interior_margin = inner_sq;  // g(0) = -inner_radius^2
  } else {
    const Matrix A = cfg.affine_A;
    const Vector b = cfg.affine_b;
    p.constraint_dim = static_cast<int>(A.rows());
    p.constraint = [A, b](const Vector& x) { return Vector(A * x - b); };
    p.constraint_jacobian = [A](const Vector&) { return A; };
    p.project_constrained = [r_sq, A, b](const Vector& x) {
      return project_ball_halfspaces(x, r_sq, A, b);
    };
    p.constraint_curvature = 0.0;
    const double sigma_max = A.jacobiSvd().singularValues()(0);
    p.constraint_lipschitz = sigma_max;
    p.constraint_bound = sigma_max * r + b.norm();
    p.interior_margin = b.minCoeff();  // g(0) = -b
  }
  return p;
}

}  // namespace pqga::synthetic
