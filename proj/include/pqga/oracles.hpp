#pragma once

#include <vector>

#include "pqga/problem.hpp"
#include "pqga/schedule.hpp"
#include "pqga/solver.hpp"

namespace pqga {

struct OracleSolution {
  Vector point;             // lies in X0 ∩ {g <= 0}
  double objective = 0;     // weighted loss at the point
  double solver_residual = 0;
  int iterations = 0;
};

struct OracleOptions {
  double tolerance = 1e-8;
  int max_iters = 200000;
};

/// Minimizer of (T_i/S_i) * sum_s f_{tau_i^s}(x) over X0 ∩ {g <= 0}. Uses the
/// problem's constrained weighted solver when available, otherwise projected
/// gradient with a fixed cold start at the projection of the origin.
OracleSolution per_period_optimizer(const ProblemInstance& problem,
                                    const std::vector<int>& slots, int duration,
                                    const OracleOptions& opts = {});

/// Minimizer of sum_i (T_i/S_i) sum_s f_{tau_i^s}(x) over X0 ∩ {g <= 0},
/// given every delivered feedback of the horizon.
OracleSolution offline_fixed_optimizer(const ProblemInstance& problem,
                                       const PeriodSchedule& schedule,
                                       const OracleOptions& opts = {});

/// Benchmark sequence {x_i°} for every period of the schedule. Periods with
/// no surviving feedback repeat the previous point (the first such period
/// falls back to the projection of the origin).
std::vector<OracleSolution> per_period_sequence(const ProblemInstance& problem,
                                                const PeriodSchedule& schedule,
                                                const OracleOptions& opts = {});

/// Clairvoyant policy: plays x_i° in period i.
std::vector<Vector> per_period_policy(const std::vector<OracleSolution>& sequence);

/// One-period-delayed policy: plays x_{i-1}° in period i and the supplied
/// initial decision in period 0.
std::vector<Vector> delayed_optimal_policy(const std::vector<OracleSolution>& sequence,
                                           const Vector& initial_decision);

/// Fixed-in-hindsight policy: plays x* every period.
std::vector<Vector> offline_policy(const OracleSolution& fixed, int periods);

}  // namespace pqga
