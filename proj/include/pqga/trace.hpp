#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pqga {

/// Per-period record of a finished run. Application fields stay zero when
/// the problem does not expose per-slot samples.
struct PeriodRecord {
  int period = 0;
  int t_start = 0;
  int duration = 1;        // T_i
  int feedback_count = 0;  // S_i after the drop rule
  double weighted_loss = 0;           // (T_i/S_i) * sum_s f_{tau_i^s}(x_i)
  Eigen::VectorXd constraint_value;   // g(x_i)
  double queue_norm = 0;              // ||Q_i|| at the period start
  int queue_duration = 0;             // duration used in the queue update
  int inner_iterations = 0;           // subproblem iterations at the closing boundary
  bool held = false;                  // decision held because no feedback survived

  double app_deviation_sum = 0;  // sum over slots of f_t(x_i)/||demand_t||^2
  int app_excluded_slots = 0;    // slots skipped for zero demand
  double app_rate_sum = 0;       // sum over slots and users of log2(1+SINR)
  double app_power = 0;          // ||x_i||^2 in the application's power units
};

struct RunTrace {
  std::vector<Eigen::VectorXd> decisions;  // x_0 .. x_{I-1}
  std::vector<PeriodRecord> periods;
  Eigen::VectorXd final_queue;  // Q_I (empty for queue-free policies)
  double gamma = 0;             // queue scaling; 0 for queue-free policies
  int horizon = 0;
  int hold_events = 0;

  bool has_queue() const { return gamma > 0 && final_queue.size() > 0; }
};

}  // namespace pqga
