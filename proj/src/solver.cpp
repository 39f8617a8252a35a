#include "pqga/solver.hpp"

#include <cmath>
#include <string>

namespace pqga {

namespace {

// Single source of the queue recursion so callers can reuse the exact
// scaled violation vector `a = gamma*T*g(x)` that produced the new queue.
Vector queue_update_scaled(const Vector& queue, const Vector& a) {
  return (-a).cwiseMax(queue + a);
}

Vector scaled_violation(const Vector& g_value, double gamma, int duration) {
  if (!g_value.allFinite()) {
    throw std::invalid_argument("queue_update: nonfinite constraint value");
  }
  return (gamma * static_cast<double>(duration)) * g_value;
}

std::vector<int> emitted_slots(const std::vector<FeedbackSlot>& feedbacks) {
  std::vector<int> slots;
  slots.reserve(feedbacks.size());
  for (const FeedbackSlot& f : feedbacks) slots.push_back(f.emitted_slot);
  return slots;
}

void fill_period_stats(RunTrace& trace, const ProblemInstance& problem,
                       const PeriodSchedule& schedule) {
  for (std::size_t i = 0; i < trace.periods.size(); ++i) {
    PeriodRecord& rec = trace.periods[i];
    const Vector& x = trace.decisions[i];
    const auto slots = schedule.deliverable(static_cast<int>(i));
    rec.t_start = schedule.start(static_cast<int>(i));
    rec.duration = schedule.duration(static_cast<int>(i));
    rec.feedback_count = static_cast<int>(slots.size());
    if (!slots.empty()) {
      double sum = 0;
      for (const FeedbackSlot& f : slots) sum += problem.loss_value(f.emitted_slot, x);
      rec.weighted_loss =
          static_cast<double>(rec.duration) / static_cast<double>(slots.size()) * sum;
    }
    if (rec.constraint_value.size() == 0) rec.constraint_value = problem.constraint(x);
    if (problem.has_slot_samples()) {
      for (int t = rec.t_start; t < rec.t_start + rec.duration; ++t) {
        const auto s = problem.slot_sample(t, x);
        if (s.demand_zero) {
          ++rec.app_excluded_slots;
        } else {
          rec.app_deviation_sum += s.normalized_deviation;
        }
        rec.app_rate_sum += s.rate_sum;
        rec.app_power = s.power;
      }
    }
  }
}

}  // namespace

Vector queue_update(const Vector& queue, const Vector& g_value, double gamma,
                    int duration) {
  if (!(gamma > 0) || duration < 1) {
    throw std::invalid_argument("queue_update: gamma must be > 0 and duration >= 1");
  }
  return queue_update_scaled(queue, scaled_violation(g_value, gamma, duration));
}

Vector aggregated_gradient(const std::vector<Vector>& gradients, int duration) {
  if (gradients.empty()) {
    throw std::invalid_argument("aggregated_gradient: no feedbacks delivered");
  }
  Vector sum = gradients[0];
  for (std::size_t s = 1; s < gradients.size(); ++s) sum += gradients[s];
  return sum * (static_cast<double>(duration) / static_cast<double>(gradients.size()));
}

Vector aggregated_gradient_at(const ProblemInstance& problem,
                              const std::vector<int>& slots, int duration,
                              const Vector& x) {
  if (slots.empty()) {
    throw std::invalid_argument("aggregated_gradient: no feedbacks delivered");
  }
  Vector sum = problem.loss_gradient(slots[0], x);
  for (std::size_t s = 1; s < slots.size(); ++s) sum += problem.loss_gradient(slots[s], x);
  return sum * (static_cast<double>(duration) / static_cast<double>(slots.size()));
}

Vector multi_step_descent(const ProblemInstance& problem, const Vector& x_start,
                          const std::vector<int>& slots, int duration, int steps,
                          double alpha, bool use_closed_form) {
  if (!(alpha > 0)) throw std::invalid_argument("multi_step_descent: alpha must be > 0");
  Vector x = x_start;
  for (int j = 0; j < steps; ++j) {
    if (use_closed_form && problem.closed_form_descent_step) {
      x = problem.closed_form_descent_step(x, slots, duration, alpha);
    } else {
      const Vector agg = aggregated_gradient_at(problem, slots, duration, x);
      x = problem.project_feasible(x - agg / (2.0 * alpha));
    }
  }
  return x;
}

Vector solve_period_subproblem(const ProblemInstance& problem,
                               const SubproblemInput& input,
                               const PqgaParams& params, bool use_closed_form,
                               int* iterations_out) {
  if (iterations_out) *iterations_out = 0;
  if (use_closed_form && problem.closed_form_subproblem) {
    return problem.closed_form_subproblem(input, params.alpha, params.eta);
  }

  const double alpha = params.alpha;
  const double eta = params.eta;
  const double penalty_scale = input.gamma * static_cast<double>(input.next_duration);
  const Vector agg = aggregated_gradient_at(problem, input.feedback_slots,
                                            input.duration, input.x_descent);

  auto objective_gradient = [&](const Vector& x) -> Vector {
    Vector grad = agg + 2.0 * alpha * (x - input.x_descent) +
                  2.0 * eta * (x - input.x_prev);
    if (penalty_scale * input.queue_weight.lpNorm<1>() > 0) {
      grad.noalias() +=
          penalty_scale *
          (problem.constraint_jacobian(x).transpose() * input.queue_weight);
    }
    return grad;
  };

  // The objective is 2(alpha+eta)-strongly convex; its curvature is at most
  // 2(alpha+eta) plus the queue-weighted constraint curvature.
  const double lipschitz = 2.0 * (alpha + eta) +
                           penalty_scale * input.queue_weight.lpNorm<1>() *
                               problem.constraint_curvature;
  const double step = 1.0 / lipschitz;

  Vector x = input.x_descent;
  for (int it = 0; it < params.inner_max_iters; ++it) {
    const Vector candidate = problem.project_feasible(x - step * objective_gradient(x));
    const double residual = (x - candidate).norm();
    if (residual <= params.inner_tolerance) {
      if (iterations_out) *iterations_out = it;
      return x;
    }
    x = candidate;
  }
  const Vector candidate = problem.project_feasible(x - step * objective_gradient(x));
  throw SolverError("period subproblem: projected-gradient residual " +
                        std::to_string((x - candidate).norm()) +
                        " above tolerance after " +
                        std::to_string(params.inner_max_iters) + " iterations",
                    x, (x - candidate).norm(), params.inner_max_iters);
}

StepReport pqga_step(PqgaState& state, const ProblemInstance& problem,
                     const std::vector<int>& slots, int duration,
                     int next_duration, const PqgaParams& params,
                     bool use_closed_form) {
  params.validate();
  StepReport report;
  report.constraint_value = problem.constraint(state.x);

  const Vector a = scaled_violation(report.constraint_value, params.gamma, duration);
  const Vector queue_next = queue_update_scaled(state.queue, a);
  report.queue_norm = queue_next.norm();

  if (slots.empty()) {
    // Constraint accounting continues even without gradient information;
    // the decision is simply carried over.
    report.held = true;
    state.queue = queue_next;
    ++state.period;
    return report;
  }

  const Vector x_descent = multi_step_descent(problem, state.x, slots, duration,
                                              params.steps_J, params.alpha,
                                              use_closed_form);
  SubproblemInput input;
  input.x_prev = state.x;
  input.x_descent = x_descent;
  input.queue_weight = queue_next + a;  // componentwise >= 0 by the queue law
  input.gamma = params.gamma;
  input.duration = duration;
  input.next_duration = next_duration;
  input.feedback_slots = slots;

  state.x = solve_period_subproblem(problem, input, params, use_closed_form,
                                    &report.inner_iterations);
  state.queue = queue_next;
  ++state.period;
  return report;
}

namespace {

RunTrace run_queue_policy(const ProblemInstance& problem,
                          const PeriodSchedule& schedule, const PqgaParams& params,
                          const Vector& x0, bool use_closed_form,
                          bool superslot) {
  params.validate();
  const Vector projected = problem.project_feasible(x0);
  if ((projected - x0).norm() > 1e-9) {
    throw std::invalid_argument("run: initial decision not in the feasible set");
  }

  PqgaParams effective = params;
  if (superslot) effective.steps_J = 0;

  RunTrace trace;
  trace.gamma = params.gamma;
  trace.horizon = schedule.horizon();
  const int I = schedule.periods();
  trace.decisions.reserve(I);
  trace.periods.resize(I);

  PqgaState state;
  state.x = x0;
  state.queue = Vector::Zero(problem.constraint_dim);

  try {
    for (int i = 0; i < I; ++i) {
      trace.decisions.push_back(state.x);
      PeriodRecord& rec = trace.periods[static_cast<std::size_t>(i)];
      rec.period = i;
      rec.queue_norm = state.queue.norm();
      const int queue_duration = superslot ? 1 : schedule.duration(i);
      rec.queue_duration = queue_duration;

      const auto slots = emitted_slots(schedule.deliverable(i));
      if (i + 1 < I) {
        const int next_duration = superslot ? 1 : schedule.duration(i + 1);
        StepReport report = pqga_step(state, problem, slots, queue_duration,
                                      next_duration, effective, use_closed_form);
        rec.constraint_value = std::move(report.constraint_value);
        rec.inner_iterations = report.inner_iterations;
        rec.held = report.held;
        if (report.held) ++trace.hold_events;
      } else {
        // Horizon boundary: the queue still absorbs the final period's
        // violation so the certificate ||Q_I||/gamma covers the whole run.
        rec.constraint_value = problem.constraint(state.x);
        state.queue = queue_update(state.queue, rec.constraint_value,
                                   effective.gamma, queue_duration);
        ++state.period;
      }
    }
  } catch (const SolverError& err) {
    trace.periods.resize(trace.decisions.size());
    trace.final_queue = state.queue;
    fill_period_stats(trace, problem, schedule);
    throw RunError(std::string("run aborted at period ") +
                       std::to_string(state.period) + ": " + err.what(),
                   std::move(trace));
  }

  trace.final_queue = state.queue;
  fill_period_stats(trace, problem, schedule);
  return trace;
}

}  // namespace

RunTrace run_pqga(const ProblemInstance& problem, const PeriodSchedule& schedule,
                  const PqgaParams& params, const Vector& x0,
                  bool use_closed_form) {
  return run_queue_policy(problem, schedule, params, x0, use_closed_form, false);
}

RunTrace run_superslot(const ProblemInstance& problem,
                       const PeriodSchedule& schedule, const PqgaParams& params,
                       const Vector& x0, bool use_closed_form) {
  return run_queue_policy(problem, schedule, params, x0, use_closed_form, true);
}

RunTrace evaluate_decisions(const ProblemInstance& problem,
                            const PeriodSchedule& schedule,
                            const std::vector<Vector>& decisions) {
  if (static_cast<int>(decisions.size()) != schedule.periods()) {
    throw std::invalid_argument("evaluate_decisions: one decision per period required");
  }
  RunTrace trace;
  trace.horizon = schedule.horizon();
  trace.decisions = decisions;
  trace.periods.resize(decisions.size());
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    trace.periods[i].period = static_cast<int>(i);
  }
  fill_period_stats(trace, problem, schedule);
  return trace;
}

}  // namespace pqga
