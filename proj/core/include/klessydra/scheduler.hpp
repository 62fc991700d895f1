// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "klessydra/hart.hpp"

namespace klessydra {

/// The harc counter. Each round visits every running hart once in ascending
/// id order; when fewer than `baseline` harts run, void slots pad the round up
/// to `baseline`. The round is rebuilt only at its boundary, so a hart that
/// wakes mid-round joins the next one.
class Scheduler {
 public:
  /// nullopt is a void slot.
  using Slot = std::optional<unsigned>;

  Scheduler(unsigned baseline, unsigned pool_size, bool pad_void_slots = true);

  /// Advances one fetch slot.
  Slot next(std::span<const HartStatus> statuses);
  /// What next() would return, without advancing.
  Slot peek(std::span<const HartStatus> statuses) const;
  /// A pipeline advance with fetch suppressed (halt drain, debug).
  void tick_idle() { ++tick_; }

  const std::vector<Slot>& schedule() const { return schedule_; }
  std::uint64_t round() const { return round_; }
  std::size_t slot_index() const { return slot_; }
  /// Hart selected by the most recent non-void slot.
  unsigned harc() const { return harc_; }

 private:
  void rebuild(std::span<const HartStatus> statuses);

  unsigned baseline_;
  unsigned pool_size_;
  bool pad_;
  std::vector<Slot> schedule_;
  std::size_t slot_ = 0;
  std::uint64_t round_ = 0;
  bool started_ = false;
  unsigned harc_ = 0;
  std::uint64_t tick_ = 0;
  std::vector<std::uint64_t> last_fetch_;
};

}  // namespace klessydra
