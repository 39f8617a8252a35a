#include "pqga/oracles.hpp"

#include <cmath>
#include <string>

namespace pqga {

namespace {

// Projected gradient over the constrained set for a weighted sum of losses.
// The weighted objective is 2L*sum(w)-smooth, so 1/(2L*sum(w)) is a safe
// fixed step.
OracleSolution constrained_weighted_minimize(const ProblemInstance& problem,
                                             const std::vector<int>& slots,
                                             const std::vector<double>& weights,
                                             const OracleOptions& opts) {
  OracleSolution sol;
  if (slots.empty()) {
    throw std::invalid_argument("oracle: no feedbacks to optimize over");
  }
  auto objective = [&](const Vector& x) {
    double v = 0;
    for (std::size_t j = 0; j < slots.size(); ++j) {
      v += weights[j] * problem.loss_value(slots[j], x);
    }
    return v;
  };

  if (problem.constrained_weighted_solver) {
    sol.point = problem.constrained_weighted_solver(slots, weights);
    sol.objective = objective(sol.point);
    return sol;
  }

  auto gradient = [&](const Vector& x) {
    Vector g = weights[0] * problem.loss_gradient(slots[0], x);
    for (std::size_t j = 1; j < slots.size(); ++j) {
      g.noalias() += weights[j] * problem.loss_gradient(slots[j], x);
    }
    return g;
  };

  double weight_sum = 0;
  for (double w : weights) weight_sum += w;
  const double step = 1.0 / (2.0 * problem.smoothness * weight_sum);

  Vector x = problem.project_constrained(Vector::Zero(problem.decision_dim));
  for (int it = 0; it < opts.max_iters; ++it) {
    const Vector candidate = problem.project_constrained(x - step * gradient(x));
    const double residual = (x - candidate).norm();
    if (residual <= opts.tolerance) {
      sol.point = x;
      sol.objective = objective(x);
      sol.solver_residual = residual;
      sol.iterations = it;
      return sol;
    }
    x = candidate;
  }
  throw SolverError("oracle: projected-gradient residual above tolerance after " +
                        std::to_string(opts.max_iters) + " iterations",
                    x, opts.tolerance, opts.max_iters);
}

}  // namespace

OracleSolution per_period_optimizer(const ProblemInstance& problem,
                                    const std::vector<int>& slots, int duration,
                                    const OracleOptions& opts) {
  const double w = static_cast<double>(duration) / static_cast<double>(slots.size());
  return constrained_weighted_minimize(problem, slots,
                                       std::vector<double>(slots.size(), w), opts);
}

OracleSolution offline_fixed_optimizer(const ProblemInstance& problem,
                                       const PeriodSchedule& schedule,
                                       const OracleOptions& opts) {
  std::vector<int> slots;
  std::vector<double> weights;
  for (int i = 0; i < schedule.periods(); ++i) {
    const auto delivered = schedule.deliverable(i);
    if (delivered.empty()) continue;
    const double w = static_cast<double>(schedule.duration(i)) /
                     static_cast<double>(delivered.size());
    for (const FeedbackSlot& f : delivered) {
      slots.push_back(f.emitted_slot);
      weights.push_back(w);
    }
  }
  return constrained_weighted_minimize(problem, slots, weights, opts);
}

std::vector<OracleSolution> per_period_sequence(const ProblemInstance& problem,
                                                const PeriodSchedule& schedule,
                                                const OracleOptions& opts) {
  std::vector<OracleSolution> out;
  out.reserve(static_cast<std::size_t>(schedule.periods()));
  for (int i = 0; i < schedule.periods(); ++i) {
    const auto delivered = schedule.deliverable(i);
    if (delivered.empty()) {
      OracleSolution held;
      held.point = out.empty()
                       ? problem.project_constrained(Vector::Zero(problem.decision_dim))
                       : out.back().point;
      out.push_back(std::move(held));
      continue;
    }
    std::vector<int> slots;
    slots.reserve(delivered.size());
    for (const FeedbackSlot& f : delivered) slots.push_back(f.emitted_slot);
    out.push_back(per_period_optimizer(problem, slots, schedule.duration(i), opts));
  }
  return out;
}

std::vector<Vector> per_period_policy(const std::vector<OracleSolution>& sequence) {
  std::vector<Vector> out;
  out.reserve(sequence.size());
  for (const OracleSolution& s : sequence) out.push_back(s.point);
  return out;
}

std::vector<Vector> delayed_optimal_policy(const std::vector<OracleSolution>& sequence,
                                           const Vector& initial_decision) {
  std::vector<Vector> out;
  out.reserve(sequence.size());
  out.push_back(initial_decision);
  for (std::size_t i = 1; i < sequence.size(); ++i) {
    out.push_back(sequence[i - 1].point);
  }
  return out;
}

std::vector<Vector> offline_policy(const OracleSolution& fixed, int periods) {
  return std::vector<Vector>(static_cast<std::size_t>(periods), fixed.point);
}

}  // namespace pqga
