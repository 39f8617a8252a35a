#pragma once

#include <span>
#include <vector>

#include "pqga/problem.hpp"
#include "pqga/schedule.hpp"
#include "pqga/trace.hpp"

namespace pqga {

/// Cumulative loss gap against per-period benchmark losses computed with the
/// same weights T_i/S_i over the same delivered feedback sets.
double dynamic_regret(const RunTrace& trace,
                      std::span<const double> benchmark_weighted_losses);

/// Same gap against the weighted losses of one fixed decision.
double static_regret(const RunTrace& trace,
                     std::span<const double> fixed_weighted_losses);

/// Signed duration-weighted accumulation sum_i T_i * g^c(x_i) per constraint.
Eigen::VectorXd constraint_violation(const RunTrace& trace);

/// Accumulation of the constraint values at the durations actually used by
/// the queue updates (T_i for the periodic algorithm, 1 for the super-slot
/// baseline). This is the quantity certified by ||Q_I||/gamma.
Eigen::VectorXd queue_scale_violation(const RunTrace& trace);

/// The queue certificate ||Q_I||/gamma; requires a queue-bearing trace.
double violation_certificate(const RunTrace& trace);

struct VariationMeasures {
  double path_length = 0;         // sum_i ||x_i° - x_{i+1}°||
  double duration_variation = 0;  // sum_i (T_i - T_{i+1})^2
  double squared_gradients = 0;   // sum_i ||(T_i/S_i) sum_s grad f_s(x_i°)||^2
};

/// Variation of the benchmark sequence and schedule. The last difference in
/// each sum is taken against a duplicate of the final entry.
VariationMeasures variation_measures(const std::vector<Vector>& benchmark_points,
                                     const PeriodSchedule& schedule,
                                     const ProblemInstance& problem);

struct ApplicationMetrics {
  double normalized_deviation = 0;  // fbar(T)
  double average_power = 0;         // pbar(T)
  double per_user_rate = 0;         // rbar(T)
};

/// Time-averaged application metrics over the full horizon. `users` is the
/// rate normalization K (ignored when the trace has no rate samples).
ApplicationMetrics application_metrics(const RunTrace& trace, int users);

/// Least-squares slope of log(value) against log(time); used to report
/// growth exponents of the variation measures. Nonpositive samples are
/// skipped; returns 0 when fewer than two usable samples remain.
double estimate_growth_exponent(std::span<const double> times,
                                std::span<const double> values);

}  // namespace pqga
