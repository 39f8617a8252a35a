#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pqga/problem.hpp"
#include "pqga/rng.hpp"
#include "pqga/schedule.hpp"

using namespace pqga;

TEST_CASE("per-slot schedule") {
  auto s = make_schedule({1, 1, 1}, FeedbackPattern{}, DelayPattern{});
  CHECK(s.horizon() == 3);
  CHECK(s.max_duration() == 1);
  for (int i = 0; i < 3; ++i) {
    CHECK(s.surviving_count(i) == 1);
    CHECK(s.deliverable(i).size() == 1);
    CHECK(s.deliverable(i)[0].emitted_slot == s.start(i));
  }
}

TEST_CASE("alternating durations with duration-keyed offsets") {
  FeedbackPattern pattern;
  pattern.offsets_by_duration[8] = {0, 4};
  pattern.default_offsets = {0};
  auto s = make_schedule({8, 4, 8, 4}, pattern, DelayPattern{});
  CHECK(s.horizon() == 24);
  CHECK(s.max_duration() == 8);
  CHECK(s.surviving_count(0) == 2);
  CHECK(s.surviving_count(1) == 1);
  CHECK(s.surviving_count(2) == 2);
  CHECK(s.surviving_count(3) == 1);
  CHECK(s.deliverable(2)[1].emitted_slot == s.start(2) + 4);
}

TEST_CASE("feedback arriving past the horizon boundary is dropped") {
  FeedbackPattern pattern;
  pattern.default_offsets = {1};
  DelayPattern delays;
  delays.cycle = {2};
  auto s = make_schedule({2}, pattern, delays);
  CHECK(s.horizon() == 2);
  CHECK(s.emissions(0).size() == 1);
  CHECK(s.emissions(0)[0].arrival_slot == 3);
  CHECK(s.surviving_count(0) == 0);
  CHECK(s.deliverable(0).empty());
  CHECK(s.has_starved_period());
}

TEST_CASE("delays within the period keep both feedbacks") {
  FeedbackPattern pattern;
  pattern.default_offsets = {0, 4};
  DelayPattern delays;
  delays.cycle = {1};
  auto s = make_schedule({8}, pattern, delays);
  CHECK(s.deliverable(0).size() == 2);
}

TEST_CASE("feedback past the period end is dropped") {
  FeedbackPattern pattern;
  pattern.default_offsets = {3};
  DelayPattern delays;
  delays.cycle = {2};
  auto s = make_schedule({4, 4}, pattern, delays);
  CHECK(s.deliverable(0).empty());  // arrival 5 >= next start 4
}

TEST_CASE("out-of-order arrivals are sorted by arrival slot") {
  FeedbackPattern pattern;
  pattern.default_offsets = {0, 4};
  DelayPattern delays;
  delays.cycle = {6, 1};
  auto s = make_schedule({8}, pattern, delays);
  auto delivered = s.deliverable(0);
  REQUIRE(delivered.size() == 2);
  CHECK(delivered[0].emitted_slot == 4);
  CHECK(delivered[1].emitted_slot == 0);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(make_schedule({}, FeedbackPattern{}, DelayPattern{}),
                  std::invalid_argument);
  FeedbackPattern outside;
  outside.default_offsets = {5};
  CHECK_THROWS_AS(make_schedule({4}, outside, DelayPattern{}),
                  std::invalid_argument);
  DelayPattern negative;
  negative.cycle = {-1};
  CHECK_THROWS_AS(make_schedule({4}, FeedbackPattern{}, negative),
                  std::invalid_argument);
  auto s = make_schedule({4}, FeedbackPattern{}, DelayPattern{});
  CHECK_THROWS_AS(s.deliverable(1), std::out_of_range);
  CHECK_THROWS_AS(s.deliverable(-1), std::out_of_range);
}

TEST_CASE("schedule conservation and truncation") {
  RngStream rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> pattern;
    const int len = 1 + static_cast<int>(rng.next_u64() % 4);
    for (int j = 0; j < len; ++j) {
      pattern.push_back(1 + static_cast<int>(rng.next_u64() % 9));
    }
    const int horizon = 1 + static_cast<int>(rng.next_u64() % 200);
    auto s = build_schedule(pattern, FeedbackPattern{}, DelayPattern{}, horizon);
    int total = 0;
    for (int i = 0; i < s.periods(); ++i) total += s.duration(i);
    CHECK(total == horizon);
    CHECK(s.horizon() == horizon);
  }
}

TEST_CASE("drop-rule monotonicity in the delay") {
  RngStream rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int duration = 2 + static_cast<int>(rng.next_u64() % 8);
    const int offset = static_cast<int>(rng.next_u64() % duration);
    const int delay = static_cast<int>(rng.next_u64() % 6);
    FeedbackPattern pattern;
    pattern.default_offsets = {offset};
    DelayPattern d1, d2;
    d1.cycle = {delay};
    d2.cycle = {delay + 1 + static_cast<int>(rng.next_u64() % 3)};
    auto s1 = make_schedule({duration, duration}, pattern, d1);
    auto s2 = make_schedule({duration, duration}, pattern, d2);
    CHECK(s2.surviving_count(0) <= s1.surviving_count(0));
  }
}

TEST_CASE("ball projection basics") {
  Vector x(2);
  x << 3, 4;
  CHECK((project_ball(x, 25.0) - x).norm() == 0.0);
  Vector scaled = project_ball(x, 1.0);
  CHECK(scaled(0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(scaled(1) == doctest::Approx(0.8).epsilon(1e-12));
  Vector zero = Vector::Zero(2);
  CHECK(project_ball(zero, 5.0).norm() == 0.0);
  Vector bad(2);
  bad << std::nan(""), 0.0;
  CHECK_THROWS_AS(project_ball(bad, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(project_ball(x, 0.0), std::invalid_argument);
}

TEST_CASE("ball projection is non-expansive and feasible") {
  RngStream rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 6);
    Vector x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x(i) = rng.normal() * 3.0;
      y(i) = rng.normal() * 3.0;
    }
    const double radius_sq = 0.1 + 4.0 * rng.uniform();
    const Vector px = project_ball(x, radius_sq);
    const Vector py = project_ball(y, radius_sq);
    CHECK(px.squaredNorm() <= radius_sq + 1e-12);
    CHECK((px - py).norm() <= (x - y).norm() + 1e-9);
  }
}

TEST_CASE("ball-and-halfspace projection is a metric projection") {
  RngStream rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2;
    Matrix A(2, n);
    A << 1, 0, 0, 1;
    Vector b(2);
    b << 0.5, 0.7;
    Vector x(n);
    x << rng.normal() * 2.0, rng.normal() * 2.0;
    const Vector p = project_ball_halfspaces(x, 4.0, A, b);
    CHECK(p.squaredNorm() <= 4.0 + 1e-9);
    CHECK((A * p - b).maxCoeff() <= 1e-9);
    // Projection optimality: no feasible point is closer than p.
    for (int probe = 0; probe < 40; ++probe) {
      Vector q(n);
      q << rng.uniform(-2.0, 0.5), rng.uniform(-2.0, 0.7);
      if (q.squaredNorm() > 4.0) continue;
      CHECK((x - p).norm() <= (x - q).norm() + 1e-7);
    }
  }
}
