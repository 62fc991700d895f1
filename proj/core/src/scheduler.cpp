// SPDX-License-Identifier: Apache-2.0

#include "klessydra/scheduler.hpp"

namespace klessydra {

namespace {
constexpr std::uint64_t kNever = ~std::uint64_t{0};
}

Scheduler::Scheduler(unsigned baseline, unsigned pool_size, bool pad_void_slots)
    : baseline_(baseline), pool_size_(pool_size), pad_(pad_void_slots), last_fetch_(pool_size, kNever) {}

void Scheduler::rebuild(std::span<const HartStatus> statuses) {
  schedule_.clear();
  for (unsigned h = 0; h < pool_size_ && h < statuses.size(); ++h)
    if (statuses[h] == HartStatus::Running) schedule_.push_back(h);
  const std::size_t min_len = pad_ ? baseline_ : 1;
  while (schedule_.size() < min_len) schedule_.push_back(std::nullopt);
}

Scheduler::Slot Scheduler::next(std::span<const HartStatus> statuses) {
  if (!started_ || slot_ >= schedule_.size()) {
    if (started_) ++round_;
    started_ = true;
    rebuild(statuses);
    slot_ = 0;
  }
  ++tick_;
  const Slot s = schedule_[slot_];
  if (!s) {
    ++slot_;
    return std::nullopt;
  }
  // Inactive harts are skipped: their slot stays void for the rest of the round.
  if (statuses[*s] != HartStatus::Running) {
    ++slot_;
    return std::nullopt;
  }
  // Spacing guard across round rebuilds: hold the slot until the hart's
  // previous fetch is at least `baseline` slots old.
  if (pad_ && last_fetch_[*s] != kNever && tick_ - last_fetch_[*s] < baseline_) return std::nullopt;
  ++slot_;
  last_fetch_[*s] = tick_;
  harc_ = *s;
  return s;
}

Scheduler::Slot Scheduler::peek(std::span<const HartStatus> statuses) const {
  Scheduler copy = *this;
  return copy.next(statuses);
}

}  // namespace klessydra
