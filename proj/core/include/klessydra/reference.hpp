// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "klessydra/config.hpp"
#include "klessydra/hart.hpp"
#include "klessydra/memory.hpp"
#include "klessydra/pipeline.hpp"

namespace klessydra {

/// Functional golden model: harts take turns in ascending id order, one whole
/// instruction per step, with the same execute kernel and no timing.
class ReferenceInterpreter {
 public:
  explicit ReferenceInterpreter(const CoreConfig& cfg, Memory memory = Memory{});

  /// Executes one instruction of the next running hart. Returns false once
  /// a stop condition holds.
  bool step();
  RunResult run(std::uint64_t max_steps);

  void post_interrupt(unsigned irq, unsigned hart = 0);

  const std::vector<HartState>& harts() const { return harts_; }
  const Memory& memory() const { return mem_; }
  Memory& memory() { return mem_; }
  std::uint64_t steps() const { return steps_; }
  const std::vector<std::uint64_t>& retired() const { return retired_; }
  std::optional<StopReason> stop_reason() const { return stop_; }

 private:
  void wake();
  bool quiescent() const;

  CoreConfig cfg_;
  Memory mem_;
  std::vector<HartState> harts_;
  ExecFeatures features_;
  std::vector<std::optional<unsigned>> irq_pending_;
  std::vector<std::optional<std::pair<Addr, Word>>> last_trap_;
  std::vector<std::uint64_t> retired_;
  unsigned cursor_ = 0;
  std::uint64_t steps_ = 0;
  std::optional<StopReason> stop_;
  RunResult info_;
};

struct ReferenceResult {
  RunResult run;
  std::vector<HartState> harts;
  Memory memory;
  std::vector<std::uint64_t> retired;
};

ReferenceResult run_reference(const CoreConfig& cfg, const Memory& initial, std::uint64_t max_steps);

/// Architectural differences between two final states: registers, pc, hart
/// status, CSRs other than MHPMCOUNTER, and data memory. Empty when equal.
std::vector<std::string> compare_states(std::span<const HartState> a, const Memory& ma,
                                        std::span<const HartState> b, const Memory& mb,
                                        std::size_t max_reports = 16);

}  // namespace klessydra
