#pragma once

#include <stdexcept>
#include <vector>

#include "pqga/problem.hpp"
#include "pqga/schedule.hpp"
#include "pqga/trace.hpp"

namespace pqga {

/// Algorithm parameters: descent step weight alpha, proximal weight eta,
/// queue scaling gamma, and the number of aggregated descent steps J.
struct PqgaParams {
  double alpha = 1.0;
  double eta = 1.0;
  double gamma = 1.0;
  int steps_J = 0;
  double inner_tolerance = 1e-8;
  int inner_max_iters = 10000;

  void validate() const {
    if (!(alpha > 0)) throw std::invalid_argument("params: alpha must be > 0");
    if (!(eta > 0)) throw std::invalid_argument("params: eta must be > 0");
    if (!(gamma > 0)) throw std::invalid_argument("params: gamma must be > 0");
    if (steps_J < 0) throw std::invalid_argument("params: J must be >= 0");
  }
};

/// Thrown when an inner solve cannot reach its tolerance; carries the last
/// iterate and residual for diagnosis.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, Vector last_iterate, double residual,
              int iterations)
      : std::runtime_error(what),
        last_iterate(std::move(last_iterate)),
        residual(residual),
        iterations(iterations) {}
  Vector last_iterate;
  double residual = 0;
  int iterations = 0;
};

/// Thrown when a run aborts mid-horizon; carries the periods finished so far.
class RunError : public std::runtime_error {
 public:
  RunError(const std::string& what, RunTrace partial)
      : std::runtime_error(what), partial_trace(std::move(partial)) {}
  RunTrace partial_trace;
};

/// Virtual queue recursion: componentwise
///   Q' = max{ -gamma*T*g, Q + gamma*T*g }.
/// The result is always componentwise nonnegative, dominates |gamma*T*g|,
/// and grows by at most ||gamma*T*g|| in norm.
Vector queue_update(const Vector& queue, const Vector& g_value, double gamma,
                    int duration);

/// Duration-scaled gradient aggregate (T/S) * sum of the supplied gradients.
Vector aggregated_gradient(const std::vector<Vector>& gradients, int duration);

/// Same aggregate with every gradient re-evaluated at x.
Vector aggregated_gradient_at(const ProblemInstance& problem,
                              const std::vector<int>& slots, int duration,
                              const Vector& x);

/// J steps of projected aggregated gradient descent from x_start:
///   x <- P_X0{ x - (1/2a) * (T/S) * sum_s grad f_s(x) }.
/// J = 0 returns x_start unchanged. Uses the problem's closed-form step when
/// available unless use_closed_form is false.
Vector multi_step_descent(const ProblemInstance& problem, const Vector& x_start,
                          const std::vector<int>& slots, int duration, int steps,
                          double alpha, bool use_closed_form = true);

/// Minimizer over X0 of the double-regularized per-period objective
///   (T/S) sum_s [grad f_s(xd)]'(x - xd) + a||x - xd||^2 + e||x - xp||^2
///     + w' [gamma * T_next * g(x)],
/// where xd is the descent iterate, xp the previous decision and w the
/// updated queue weight (componentwise nonnegative). Falls back to projected
/// gradient on the 2(a+e)-strongly-convex objective when the problem has no
/// closed form. iterations_out, when non-null, receives the inner iteration
/// count (0 for closed-form solves).
Vector solve_period_subproblem(const ProblemInstance& problem,
                               const SubproblemInput& input,
                               const PqgaParams& params,
                               bool use_closed_form = true,
                               int* iterations_out = nullptr);

struct PqgaState {
  Vector x;
  Vector queue;
  int period = 0;
};

struct StepReport {
  Vector constraint_value;   // g(x_i) used in the queue update
  double queue_norm = 0;     // ||Q_{i+1}||
  int inner_iterations = 0;
  bool held = false;
};

/// One boundary update: queue update from the closing period's decision,
/// J-step descent, then the subproblem solve for the next decision. With no
/// surviving feedback the decision is held but the queue still advances.
StepReport pqga_step(PqgaState& state, const ProblemInstance& problem,
                     const std::vector<int>& slots, int duration,
                     int next_duration, const PqgaParams& params,
                     bool use_closed_form = true);

/// Full run over a schedule starting from x0 in X0 with Q_0 = 0. The queue
/// is advanced across every boundary including the final one, so the trace
/// always carries Q_I.
RunTrace run_pqga(const ProblemInstance& problem, const PeriodSchedule& schedule,
                  const PqgaParams& params, const Vector& x0,
                  bool use_closed_form = true);

/// Per-slot virtual-queue baseline: every update period is treated as one
/// super slot of unit duration, the delivered gradients enter as their plain
/// average, the constraint enters unscaled, and no extra descent steps are
/// taken (J = 0). Identical inputs on a unit-duration schedule reproduce
/// run_pqga exactly.
RunTrace run_superslot(const ProblemInstance& problem,
                       const PeriodSchedule& schedule, const PqgaParams& params,
                       const Vector& x0, bool use_closed_form = true);

/// Fills loss/constraint/application statistics for a fixed decision
/// sequence (one decision per period) without any queue bookkeeping.
RunTrace evaluate_decisions(const ProblemInstance& problem,
                            const PeriodSchedule& schedule,
                            const std::vector<Vector>& decisions);

}  // namespace pqga
