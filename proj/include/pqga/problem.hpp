#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace pqga {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Euclidean projection onto the ball { x : ||x||^2 <= radius_sq }.
Vector project_ball(const Vector& x, double radius_sq);

/// Euclidean projection onto the halfspace { x : a'x <= b }.
Vector project_halfspace(const Vector& x, const Vector& a, double b);

/// Projection onto the intersection of a ball and a set of halfspaces via
/// cyclic alternating projections with Dykstra corrections, so the returned
/// point is the metric projection rather than just a feasible point.
Vector project_ball_halfspaces(const Vector& x, double radius_sq,
                               const Matrix& A, const Vector& b,
                               double stop_tol = 1e-10, int max_sweeps = 10000);

/// Per-period inputs handed to a problem-supplied closed-form solver for the
/// decision subproblem. Slots identify the delivered feedbacks so the solver
/// can re-evaluate gradients at the descent iterate.
struct SubproblemInput {
  Vector x_prev;              // decision of the closing period
  Vector x_descent;           // descent iterate the linearization anchors to
  Vector queue_weight;        // Q_{i+1} + gamma*T_i*g(x_prev), componentwise >= 0
  double gamma = 0;
  int duration = 1;           // T_i
  int next_duration = 1;      // T_{i+1}
  std::vector<int> feedback_slots;
};

/// An online problem: time-indexed losses over a compact convex feasible set
/// X0, plus long-term constraint functions g whose accumulated value must
/// stay nonpositive. All bounds (D, L, rho, beta, G, eps, R) refer to the
/// usual strong-convexity / smoothness / boundedness constants over X0.
struct ProblemInstance {
  int decision_dim = 0;
  int constraint_dim = 0;

  std::function<double(int t, const Vector&)> loss_value;
  std::function<Vector(int t, const Vector&)> loss_gradient;
  std::function<Vector(const Vector&)> constraint;            // g(x), dim C
  std::function<Matrix(const Vector&)> constraint_jacobian;   // C x n
  std::function<Vector(const Vector&)> project_feasible;      // onto X0
  std::function<Vector(const Vector&)> project_constrained;   // onto X0 ∩ {g<=0}

  double grad_bound = 0;            // D
  double smoothness = 0;            // L   (losses are 2L-smooth)
  double strong_convexity = 0;      // rho (losses are 2*rho-strongly convex)
  double constraint_lipschitz = 0;  // beta
  double constraint_bound = 0;      // G
  double interior_margin = 0;       // eps
  double set_radius = 0;            // R
  double constraint_curvature = 0;  // max spectral norm of any Hessian of g^c

  /// Optional fast paths. When absent the generic solvers are used.
  std::function<Vector(const Vector& x, const std::vector<int>& slots,
                       int duration, double alpha)>
      closed_form_descent_step;
  std::function<Vector(const SubproblemInput&, double alpha, double eta)>
      closed_form_subproblem;
  /// Minimizer of sum_j w_j * f_{slot_j}(x) over X0 ∩ {g<=0}.
  std::function<Vector(const std::vector<int>& slots,
                       const std::vector<double>& weights)>
      constrained_weighted_solver;

  /// Per-slot application observables (power, per-user rates, normalized
  /// deviation). Absent for purely synthetic problems.
  struct SlotSample {
    double normalized_deviation = 0;  // f_t(x)/||demand_t||^2
    double power = 0;
    double rate_sum = 0;  // summed over users
    bool demand_zero = false;
  };
  std::function<SlotSample(int t, const Vector&)> slot_sample;

  bool has_slot_samples() const { return static_cast<bool>(slot_sample); }
};

}  // namespace pqga
