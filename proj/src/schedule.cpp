#include "pqga/schedule.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace pqga {

PeriodSchedule::PeriodSchedule(std::vector<int> durations,
                               std::vector<std::vector<FeedbackSlot>> feedbacks)
    : durations_(std::move(durations)), feedbacks_(std::move(feedbacks)) {
  if (durations_.empty()) {
    throw std::invalid_argument("schedule: durations must be nonempty");
  }
  if (feedbacks_.size() != durations_.size()) {
    throw std::invalid_argument("schedule: one feedback list per period required");
  }
  starts_.resize(durations_.size());
  int t = 0;
  for (std::size_t i = 0; i < durations_.size(); ++i) {
    if (durations_[i] < 1) {
      throw std::invalid_argument("schedule: period " + std::to_string(i) +
                                  " has nonpositive duration");
    }
    starts_[i] = t;
    t += durations_[i];
    max_duration_ = std::max(max_duration_, durations_[i]);
  }
  horizon_ = t;

  for (std::size_t i = 0; i < feedbacks_.size(); ++i) {
    int prev_slot = -1;
    for (const FeedbackSlot& f : feedbacks_[i]) {
      if (f.emitted_slot < starts_[i] ||
          f.emitted_slot >= starts_[i] + durations_[i]) {
        throw std::invalid_argument("schedule: feedback slot " +
                                    std::to_string(f.emitted_slot) +
                                    " outside period " + std::to_string(i));
      }
      if (f.arrival_slot < f.emitted_slot) {
        throw std::invalid_argument("schedule: negative feedback delay in period " +
                                    std::to_string(i));
      }
      if (f.emitted_slot <= prev_slot) {
        throw std::invalid_argument(
            "schedule: feedback slots must be strictly increasing in period " +
            std::to_string(i));
      }
      prev_slot = f.emitted_slot;
    }
  }
}

const std::vector<FeedbackSlot>& PeriodSchedule::emissions(int i) const {
  if (i < 0 || i >= periods()) {
    throw std::out_of_range("schedule: period index out of range");
  }
  return feedbacks_[static_cast<std::size_t>(i)];
}

std::vector<FeedbackSlot> PeriodSchedule::deliverable(int i) const {
  const auto& emitted = emissions(i);
  const int cutoff = next_start(i);
  std::vector<FeedbackSlot> out;
  out.reserve(emitted.size());
  for (const FeedbackSlot& f : emitted) {
    if (f.arrival_slot < cutoff) out.push_back(f);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FeedbackSlot& a, const FeedbackSlot& b) {
                     if (a.arrival_slot != b.arrival_slot)
                       return a.arrival_slot < b.arrival_slot;
                     return a.emitted_slot < b.emitted_slot;
                   });
  return out;
}

int PeriodSchedule::surviving_count(int i) const {
  const auto& emitted = emissions(i);
  const int cutoff = next_start(i);
  int n = 0;
  for (const FeedbackSlot& f : emitted) {
    if (f.arrival_slot < cutoff) ++n;
  }
  return n;
}

bool PeriodSchedule::has_starved_period() const {
  for (int i = 0; i < periods(); ++i) {
    if (surviving_count(i) == 0) return true;
  }
  return false;
}

PeriodSchedule make_schedule(const std::vector<int>& durations,
                             const FeedbackPattern& pattern,
                             const DelayPattern& delays) {
  if (durations.empty()) {
    throw std::invalid_argument("make_schedule: durations must be nonempty");
  }
  for (int d : delays.cycle) {
    if (d < 0) throw std::invalid_argument("make_schedule: negative delay");
  }
  std::vector<std::vector<FeedbackSlot>> feedbacks(durations.size());
  int t = 0;
  int feedback_index = 0;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    const int T_i = durations[i];
    auto it = pattern.offsets_by_duration.find(T_i);
    const std::vector<int>& offsets = (it != pattern.offsets_by_duration.end())
                                          ? it->second
                                          : pattern.default_offsets;
    for (int off : offsets) {
      FeedbackSlot f;
      f.period = static_cast<int>(i);
      f.emitted_slot = t + off;
      f.arrival_slot = f.emitted_slot + delays.delay_for(feedback_index++);
      feedbacks[i].push_back(f);
    }
    t += T_i;
  }
  return PeriodSchedule(durations, std::move(feedbacks));
}

PeriodSchedule build_schedule(const std::vector<int>& duration_pattern,
                              const FeedbackPattern& pattern,
                              const DelayPattern& delays, int horizon) {
  if (duration_pattern.empty()) {
    throw std::invalid_argument("build_schedule: empty duration pattern");
  }
  if (horizon < 1) {
    throw std::invalid_argument("build_schedule: horizon must be positive");
  }
  std::vector<int> durations;
  int remaining = horizon;
  std::size_t k = 0;
  while (remaining > 0) {
    int d = duration_pattern[k % duration_pattern.size()];
    if (d < 1) throw std::invalid_argument("build_schedule: nonpositive duration");
    d = std::min(d, remaining);
    durations.push_back(d);
    remaining -= d;
    ++k;
  }
  // A truncated final period may invalidate offsets keyed to the original
  // duration; filter them against the actual duration.
  FeedbackPattern filtered = pattern;
  const int last = durations.back();
  const int orig = duration_pattern[(durations.size() - 1) % duration_pattern.size()];
  if (last != orig) {
    auto it = pattern.offsets_by_duration.find(orig);
    std::vector<int> offsets = (it != pattern.offsets_by_duration.end())
                                   ? it->second
                                   : pattern.default_offsets;
    std::erase_if(offsets, [last](int off) { return off >= last; });
    filtered.offsets_by_duration[last] = offsets;
  }
  return make_schedule(durations, filtered, delays);
}

}  // namespace pqga
