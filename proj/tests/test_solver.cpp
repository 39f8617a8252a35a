#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "pqga/rng.hpp"
#include "pqga/solver.hpp"

using namespace pqga;

namespace {

// 1-D problem on the interval [-1, 1] with loss (x - target_t)^2 and an
// affine constraint g(x) = x - level. Targets are supplied per slot.
ProblemInstance interval_problem(std::vector<double> targets, double level) {
  ProblemInstance p;
  p.decision_dim = 1;
  p.constraint_dim = 1;
  auto targets_ptr = std::make_shared<std::vector<double>>(std::move(targets));
  p.loss_value = [targets_ptr](int t, const Vector& x) {
    const double d = x(0) - targets_ptr->at(t);
    return d * d;
  };
  p.loss_gradient = [targets_ptr](int t, const Vector& x) {
    Vector g(1);
    g(0) = 2.0 * (x(0) - targets_ptr->at(t));
    return g;
  };
  p.constraint = [level](const Vector& x) {
    Vector g(1);
    g(0) = x(0) - level;
    return g;
  };
  p.constraint_jacobian = [](const Vector& x) {
    Matrix j(1, x.size());
    j(0, 0) = 1.0;
    return j;
  };
  auto clamp = [](double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
  };
  p.project_feasible = [clamp](const Vector& x) {
    Vector y(1);
    y(0) = clamp(x(0), -1.0, 1.0);
    return y;
  };
  p.project_constrained = [clamp, level](const Vector& x) {
    Vector y(1);
    y(0) = clamp(x(0), -1.0, std::min(1.0, level));
    return y;
  };
  p.smoothness = 1.0;
  p.strong_convexity = 1.0;
  p.constraint_lipschitz = 1.0;
  p.constraint_curvature = 0.0;
  return p;
}

Vector vec1(double v) {
  Vector x(1);
  x(0) = v;
  return x;
}

}  // namespace

TEST_CASE("queue update examples") {
  Vector q(2), g(2);
  q << 0, 0;
  g << -1, 0.5;
  Vector next = queue_update(q, g, 1.0, 2);
  CHECK(next(0) == 2.0);
  CHECK(next(1) == 1.0);

  Vector q1 = vec1(3.0);
  CHECK(queue_update(q1, vec1(0.0), 0.5, 4)(0) == 3.0);
  CHECK(queue_update(vec1(1.0), vec1(-2.0), 1.0, 1)(0) == 2.0);

  CHECK_THROWS_AS(queue_update(q1, vec1(std::nan("")), 1.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(queue_update(q1, vec1(0.0), 0.0, 1), std::invalid_argument);
}

TEST_CASE("queue law and drift inequality on random transitions") {
  RngStream rng(42);
  for (int trial = 0; trial < 20000; ++trial) {
    const int C = 1 + static_cast<int>(rng.next_u64() % 4);
    Vector q(C), g(C);
    for (int c = 0; c < C; ++c) {
      q(c) = std::abs(rng.normal()) * 5.0;
      g(c) = rng.normal() * 2.0;
    }
    const double gamma = 0.1 + 3.0 * rng.uniform();
    const int duration = 1 + static_cast<int>(rng.next_u64() % 8);
    const Vector next = queue_update(q, g, gamma, duration);
    const Vector a = (gamma * static_cast<double>(duration)) * g;

    CHECK((next.array() >= 0).all());
    CHECK(((next + a).array() >= 0).all());
    CHECK(next.norm() >= a.norm());
    CHECK(next.norm() <= q.norm() + a.norm());

    const double drift = 0.5 * next.squaredNorm() - 0.5 * q.squaredNorm();
    const double rhs = q.dot(a) + a.squaredNorm();
    CHECK(drift <= rhs + 1e-9 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("aggregated gradient") {
  Vector g1(2), g2(2);
  g1 << 1, -1;
  CHECK((aggregated_gradient({g1}, 2) - (Vector(2) << 2, -2).finished()).norm() == 0.0);
  g1 << 1, 0;
  g2 << 0, 1;
  CHECK((aggregated_gradient({g1, g2}, 4) - (Vector(2) << 2, 2).finished()).norm() ==
        0.0);
  CHECK(aggregated_gradient({Vector::Zero(2)}, 1).norm() == 0.0);
  CHECK_THROWS_AS(aggregated_gradient({}, 1), std::invalid_argument);
}

TEST_CASE("aggregated gradient is linear in each feedback") {
  RngStream rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    Vector a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a(i) = rng.normal();
      b(i) = rng.normal();
    }
    const double c = rng.uniform(-2.0, 2.0);
    const Vector lhs = aggregated_gradient({a + c * b}, 3);
    const Vector rhs = aggregated_gradient({a}, 3) + c * aggregated_gradient({b}, 3);
    CHECK((lhs - rhs).norm() <= 1e-12);
  }
}

TEST_CASE("multi-step descent explicit cases") {
  // f(x) = x^2: one step from x=1 with alpha=1 lands at 0.
  auto p = interval_problem({0.0}, 10.0);
  CHECK(multi_step_descent(p, vec1(1.0), {0}, 1, 0, 1.0)(0) == 1.0);
  CHECK(multi_step_descent(p, vec1(1.0), {0}, 1, 1, 1.0)(0) == 0.0);

  // f(x) = (x-3)^2: the step moves uphill in x and the box clamps it.
  auto p3 = interval_problem({3.0}, 10.0);
  CHECK(multi_step_descent(p3, vec1(1.0), {0}, 1, 1, 1.0)(0) == 1.0);
  CHECK_THROWS_AS(multi_step_descent(p3, vec1(1.0), {0}, 1, 1, 0.0),
                  std::invalid_argument);
}

namespace {

// Independent check: minimize the subproblem objective on a 1-D grid.
double grid_minimize_subproblem(const ProblemInstance& p, const SubproblemInput& in,
                                double alpha, double eta, double resolution) {
  double best_x = -1.0;
  double best_val = std::numeric_limits<double>::infinity();
  const Vector agg = aggregated_gradient_at(p, in.feedback_slots, in.duration,
                                            in.x_descent);
  for (double x = -1.0; x <= 1.0 + 1e-12; x += resolution) {
    Vector xv = vec1(x);
    const double obj =
        agg(0) * (x - in.x_descent(0)) + alpha * std::pow(x - in.x_descent(0), 2) +
        eta * std::pow(x - in.x_prev(0), 2) +
        in.queue_weight(0) * in.gamma * in.next_duration * p.constraint(xv)(0);
    if (obj < best_val) {
      best_val = obj;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace

TEST_CASE("period subproblem matches stationarity and grid search") {
  // Loss with gradient 2 at the anchor point: f(x) = (x+1)^2 at x=0 has
  // gradient 2, duration/S = 1.
  auto p = interval_problem({-1.0}, 10.0);
  PqgaParams params;
  params.alpha = 1.0;
  params.eta = 1.0;
  params.inner_tolerance = 1e-10;

  SubproblemInput in;
  in.x_prev = vec1(0.0);
  in.x_descent = vec1(0.0);
  in.queue_weight = vec1(0.0);
  in.gamma = 1.0;
  in.duration = 1;
  in.next_duration = 1;
  in.feedback_slots = {0};

  int iters = 0;
  Vector x = solve_period_subproblem(p, in, params, true, &iters);
  CHECK(x(0) == doctest::Approx(-0.5).epsilon(1e-8));

  // Affine constraint enters with unit weight: derivative 2 + 4x + 1 = 0.
  in.queue_weight = vec1(1.0);
  x = solve_period_subproblem(p, in, params);
  CHECK(x(0) == doctest::Approx(-0.75).epsilon(1e-7));
  const double grid = grid_minimize_subproblem(p, in, params.alpha, params.eta, 1e-6);
  CHECK(std::abs(x(0) - grid) <= 1e-5);

  // A huge queue weight pushes the minimizer to the boundary.
  in.queue_weight = vec1(1000.0);
  x = solve_period_subproblem(p, in, params);
  CHECK(x(0) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(grid_minimize_subproblem(p, in, params.alpha, params.eta, 1e-6) ==
        doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("subproblem iteration cap raises a diagnostic error") {
  auto p = interval_problem({-1.0}, 10.0);
  PqgaParams params;
  params.inner_tolerance = 1e-16;  // unreachable
  params.inner_max_iters = 5;
  SubproblemInput in;
  in.x_prev = vec1(0.9);
  in.x_descent = vec1(0.0);
  in.queue_weight = vec1(0.3);
  in.gamma = 1.0;
  in.duration = 1;
  in.next_duration = 1;
  in.feedback_slots = {0};
  try {
    solve_period_subproblem(p, in, params);
    FAIL("expected SolverError");
  } catch (const SolverError& err) {
    CHECK(err.iterations == 5);
    CHECK(err.last_iterate.size() == 1);
    CHECK(err.residual > 0);
  }
}

TEST_CASE("pqga step fixed point with zero gradients and zero violation") {
  auto p = interval_problem({0.5}, 10.0);  // target equals start: zero gradient
  // g(x) = x - 10 is negative but gamma*T*g enters the queue; to get an exact
  // fixed point use a constraint that is zero at the point.
  auto p0 = interval_problem({0.5}, 0.5);
  PqgaState state;
  state.x = vec1(0.5);
  state.queue = Vector::Zero(1);
  PqgaParams params;
  StepReport rep = pqga_step(state, p0, {0}, 1, 1, params);
  CHECK(state.x(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.constraint_value(0) == 0.0);
  (void)p;
}

TEST_CASE("pqga run matches a hand-rolled single-step replay") {
  // J = 0, one feedback per period, alternating targets.
  const std::vector<double> targets = {0.8, -0.6, 0.4, 0.9, -0.2, 0.1};
  auto p = interval_problem(targets, 0.25);
  auto schedule = make_schedule({1, 1, 1, 1, 1, 1}, FeedbackPattern{}, DelayPattern{});
  PqgaParams params;
  params.alpha = 2.0;
  params.eta = 1.5;
  params.gamma = 0.7;
  params.steps_J = 0;
  params.inner_tolerance = 1e-12;
  params.inner_max_iters = 100000;

  RunTrace trace = run_pqga(p, schedule, params, vec1(0.0));

  // Independent replay of the recursion: queue update, then the clamped
  // stationary point of the 1-D quadratic-plus-linear objective.
  double x = 0.0;
  Vector queue = Vector::Zero(1);
  for (int i = 0; i + 1 < schedule.periods(); ++i) {
    const double g = x - 0.25;
    const double a = params.gamma * 1.0 * g;
    const double q_next = std::max(-a, queue(0) + a);
    const double w = q_next + a;
    const double agg = 2.0 * (x - targets[static_cast<std::size_t>(i)]);
    double next = x - (agg + w * params.gamma) / (2.0 * (params.alpha + params.eta));
    next = std::min(1.0, std::max(-1.0, next));
    queue(0) = q_next;
    x = next;
    CHECK(trace.decisions[static_cast<std::size_t>(i) + 1](0) ==
          doctest::Approx(x).epsilon(1e-8));
    CHECK(trace.periods[static_cast<std::size_t>(i) + 1].queue_norm ==
          doctest::Approx(std::abs(q_next)).epsilon(1e-12));
  }
}

TEST_CASE("single-period run applies x0 and still closes the queue") {
  auto p = interval_problem({0.3}, 0.1);
  auto schedule = make_schedule({5}, FeedbackPattern{}, DelayPattern{});
  PqgaParams params;
  RunTrace trace = run_pqga(p, schedule, params, vec1(0.4));
  CHECK(trace.decisions.size() == 1);
  CHECK(trace.decisions[0](0) == 0.4);
  CHECK(trace.periods[0].duration == 5);
  // Final queue absorbs gamma*T*g(x0) = 1*5*0.3.
  CHECK(trace.final_queue(0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("zero-feedback period holds the decision but advances the queue") {
  FeedbackPattern pattern;
  pattern.default_offsets = {1};
  DelayPattern delays;
  delays.cycle = {0, 5, 0};  // second period's feedback arrives too late
  auto schedule = make_schedule({2, 2, 2}, pattern, delays);
  REQUIRE(schedule.surviving_count(1) == 0);

  auto p = interval_problem({0.9, 0.9, 0.9, 0.9, 0.9, 0.9}, 0.0);
  PqgaParams params;
  RunTrace trace = run_pqga(p, schedule, params, vec1(0.5));
  CHECK(trace.hold_events == 1);
  CHECK(trace.periods[1].held);  // the hold closes period 1's boundary
  CHECK(trace.periods[1].feedback_count == 0);
  CHECK(trace.decisions[2](0) == trace.decisions[1](0));
  // Queue kept accumulating g = x - 0 = x > 0 across all three boundaries.
  CHECK(trace.final_queue(0) > 0.0);
}

TEST_CASE("run aborts with a partial trace on solver failure") {
  auto p = interval_problem({0.8, -0.6, 0.4}, 0.25);
  auto schedule = make_schedule({1, 1, 1}, FeedbackPattern{}, DelayPattern{});
  PqgaParams params;
  params.inner_tolerance = 1e-18;
  params.inner_max_iters = 2;
  try {
    run_pqga(p, schedule, params, vec1(0.0));
    FAIL("expected RunError");
  } catch (const RunError& err) {
    CHECK(err.partial_trace.decisions.size() == 1);
    CHECK(err.partial_trace.periods.size() == 1);
  }
}
