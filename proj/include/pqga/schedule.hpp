#pragma once

#include <map>
#include <stdexcept>
#include <vector>

namespace pqga {

/// One gradient-feedback emission within an update period.
struct FeedbackSlot {
  int period = 0;        // index of the emitting period
  int emitted_slot = 0;  // absolute time slot of emission
  int arrival_slot = 0;  // emitted_slot + delay
};

/// Timeline of a horizon of T slots segmented into update periods of
/// durations T_i, together with the feedback emissions inside each period.
///
/// A feedback emitted in period i is usable for the decision made at the
/// start of period i+1 only if it arrives before that boundary; anything
/// arriving at or after t_{i+1} is dropped. Dropped feedbacks still appear
/// in the emission lists but never in deliverable().
class PeriodSchedule {
 public:
  PeriodSchedule(std::vector<int> durations,
                 std::vector<std::vector<FeedbackSlot>> feedbacks);

  int periods() const { return static_cast<int>(durations_.size()); }
  int horizon() const { return horizon_; }
  int max_duration() const { return max_duration_; }
  int duration(int i) const { return durations_.at(i); }
  int start(int i) const { return starts_.at(i); }
  /// First slot after period i (equals the horizon for the last period).
  int next_start(int i) const { return starts_.at(i) + durations_.at(i); }
  const std::vector<int>& durations() const { return durations_; }

  /// Feedbacks emitted in period i, in emission order, before the drop rule.
  const std::vector<FeedbackSlot>& emissions(int i) const;

  /// Feedbacks of period i surviving the drop rule, ordered by arrival
  /// (ties broken by emission slot).
  std::vector<FeedbackSlot> deliverable(int i) const;

  /// Number of surviving feedbacks S_i; may be zero when every feedback of
  /// the period arrives too late.
  int surviving_count(int i) const;

  /// True if some period ends up with zero surviving feedbacks.
  bool has_starved_period() const;

 private:
  std::vector<int> durations_;
  std::vector<int> starts_;
  std::vector<std::vector<FeedbackSlot>> feedbacks_;
  int horizon_ = 0;
  int max_duration_ = 0;
};

/// Describes how feedback emissions are placed inside periods: offsets keyed
/// by the period duration, with a fallback list for durations not listed.
struct FeedbackPattern {
  std::map<int, std::vector<int>> offsets_by_duration;
  std::vector<int> default_offsets{0};
};

/// Describes feedback delays: a constant, or a cycle applied across all
/// emissions in emission order.
struct DelayPattern {
  std::vector<int> cycle{0};
  int delay_for(int feedback_index) const {
    return cycle[static_cast<std::size_t>(feedback_index) % cycle.size()];
  }
};

/// Builds a schedule from explicit per-period durations. Offsets outside a
/// period or negative delays are rejected.
PeriodSchedule make_schedule(const std::vector<int>& durations,
                             const FeedbackPattern& pattern,
                             const DelayPattern& delays);

/// Repeats `duration_pattern` cyclically until the horizon is filled,
/// truncating the final period if needed, then applies the feedback and
/// delay patterns. Offsets that fall outside a truncated final period are
/// dropped.
PeriodSchedule build_schedule(const std::vector<int>& duration_pattern,
                              const FeedbackPattern& pattern,
                              const DelayPattern& delays, int horizon);

}  // namespace pqga
