#include "pqga/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace pqga {

namespace {

double regret_against(const RunTrace& trace, std::span<const double> benchmark) {
  if (benchmark.size() != trace.periods.size()) {
    throw std::invalid_argument("regret: benchmark length mismatch");
  }
  double sum = 0;
  for (std::size_t i = 0; i < trace.periods.size(); ++i) {
    sum += trace.periods[i].weighted_loss - benchmark[i];
  }
  return sum;
}

}  // namespace

double dynamic_regret(const RunTrace& trace,
                      std::span<const double> benchmark_weighted_losses) {
  return regret_against(trace, benchmark_weighted_losses);
}

double static_regret(const RunTrace& trace,
                     std::span<const double> fixed_weighted_losses) {
  return regret_against(trace, fixed_weighted_losses);
}

Eigen::VectorXd constraint_violation(const RunTrace& trace) {
  if (trace.periods.empty()) return Eigen::VectorXd();
  Eigen::VectorXd vo = Eigen::VectorXd::Zero(trace.periods[0].constraint_value.size());
  for (const PeriodRecord& rec : trace.periods) {
    vo += static_cast<double>(rec.duration) * rec.constraint_value;
  }
  return vo;
}

Eigen::VectorXd queue_scale_violation(const RunTrace& trace) {
  if (trace.periods.empty()) return Eigen::VectorXd();
  Eigen::VectorXd vo = Eigen::VectorXd::Zero(trace.periods[0].constraint_value.size());
  for (const PeriodRecord& rec : trace.periods) {
    vo += static_cast<double>(rec.queue_duration) * rec.constraint_value;
  }
  return vo;
}

double violation_certificate(const RunTrace& trace) {
  if (!trace.has_queue()) {
    throw std::invalid_argument("violation_certificate: trace has no queue");
  }
  return trace.final_queue.norm() / trace.gamma;
}

VariationMeasures variation_measures(const std::vector<Vector>& benchmark_points,
                                     const PeriodSchedule& schedule,
                                     const ProblemInstance& problem) {
  const int I = schedule.periods();
  if (static_cast<int>(benchmark_points.size()) != I) {
    throw std::invalid_argument("variation_measures: benchmark length mismatch");
  }
  VariationMeasures m;
  for (int i = 0; i + 1 < I; ++i) {
    m.path_length += (benchmark_points[i] - benchmark_points[i + 1]).norm();
    const double dT = schedule.duration(i) - schedule.duration(i + 1);
    m.duration_variation += dT * dT;
  }
  for (int i = 0; i < I; ++i) {
    const auto delivered = schedule.deliverable(i);
    if (delivered.empty()) continue;
    Vector agg = Vector::Zero(problem.decision_dim);
    for (const FeedbackSlot& f : delivered) {
      agg += problem.loss_gradient(f.emitted_slot, benchmark_points[i]);
    }
    agg *= static_cast<double>(schedule.duration(i)) /
           static_cast<double>(delivered.size());
    m.squared_gradients += agg.squaredNorm();
  }
  return m;
}

ApplicationMetrics application_metrics(const RunTrace& trace, int users) {
  ApplicationMetrics m;
  if (trace.horizon <= 0) return m;
  double dev = 0, rates = 0, power = 0;
  for (const PeriodRecord& rec : trace.periods) {
    dev += rec.app_deviation_sum;
    rates += rec.app_rate_sum;
    power += static_cast<double>(rec.duration) * rec.app_power;
  }
  const double T = static_cast<double>(trace.horizon);
  m.normalized_deviation = dev / T;
  m.average_power = power / T;
  m.per_user_rate = users > 0 ? rates / (T * static_cast<double>(users)) : 0;
  return m;
}

double estimate_growth_exponent(std::span<const double> times,
                                std::span<const double> values) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("estimate_growth_exponent: length mismatch");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= 0 || values[i] <= 0) continue;
    const double lx = std::log(times[i]);
    const double ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0;
  const double denom = n * sxx - sx * sx;
  if (denom == 0) return 0;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace pqga
