// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "klessydra/hart.hpp"

namespace klessydra {

/// Signals seen by one hart's program-counter updater in one cycle.
struct PcUpdateEvents {
  bool reset = false;                  // rst_ni asserted
  std::optional<TrapCause> exception;  // set_except_condition
  std::optional<unsigned> irq;         // irq_pending, already gated by MSTATUS.MIE
  bool mret = false;                   // set_mret_condition
  std::optional<Addr> branch_target;   // set_branch_condition
  bool branch_pending = false;         // branch_condition_pending: hold the pc
};

enum class PcSource : std::uint8_t { Reset, Exception, Interrupt, Mret, Branch, Hold, Increment };

struct PcDecision {
  PcSource source = PcSource::Increment;
  Addr next_pc = 0;
  /// Where execution resumes after a trap: the faulting pc for exceptions,
  /// the pc the lower-priority chain would have produced for interrupts.
  Addr return_pc = 0;

  bool redirects() const { return source != PcSource::Increment; }
};

/// Priority: reset > exception > interrupt > mret > branch > +4.
PcDecision pc_update(Addr pc, const PcUpdateEvents& events, Addr boot_pc, Addr mtvec, Addr mepc) noexcept;

struct CommitResult {
  PcDecision decision;
  bool slept = false;
  bool irq_taken = false;
  bool redirect = false;
};

/// Applies an executed instruction's outcome to the hart's pc, trap and
/// sleep state. `hart.pc` is expected to hold the sequential next pc already
/// (the fetch stage advanced it); only redirects and WFI overwrite it.
CommitResult commit(HartState& hart, Addr pc, const ExecOutcome& outcome, std::optional<unsigned> pending_irq,
                    Addr boot_pc) noexcept;

}  // namespace klessydra
