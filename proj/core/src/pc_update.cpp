// SPDX-License-Identifier: Apache-2.0

#include "klessydra/pc_update.hpp"

namespace klessydra {

PcDecision pc_update(Addr pc, const PcUpdateEvents& ev, Addr boot_pc, Addr mtvec, Addr mepc) noexcept {
  const Addr trap_vector = mtvec & ~Addr{3};
  if (ev.reset) return {PcSource::Reset, boot_pc, boot_pc};
  if (ev.exception) return {PcSource::Exception, trap_vector, pc};

  PcDecision lower;
  if (ev.mret)
    lower = {PcSource::Mret, mepc, mepc};
  else if (ev.branch_target)
    lower = {PcSource::Branch, *ev.branch_target, *ev.branch_target};
  else if (ev.branch_pending)
    lower = {PcSource::Hold, pc, pc};
  else
    lower = {PcSource::Increment, pc + 4, pc + 4};

  if (ev.irq) return {PcSource::Interrupt, trap_vector, lower.next_pc};
  return lower;
}

CommitResult commit(HartState& hart, Addr pc, const ExecOutcome& outcome, std::optional<unsigned> pending_irq,
                    Addr boot_pc) noexcept {
  PcUpdateEvents ev;
  ev.exception = outcome.exception;
  ev.mret = outcome.mret;
  ev.branch_target = outcome.branch_target;
  if (pending_irq && hart.csrs.interrupts_enabled()) ev.irq = pending_irq;

  CommitResult r;
  r.decision = pc_update(pc, ev, boot_pc, hart.csrs.get(Csr::MTVEC), hart.csrs.get(Csr::MEPC));
  switch (r.decision.source) {
    case PcSource::Exception:
      enter_trap(hart, *outcome.exception, r.decision.return_pc);
      r.redirect = true;
      break;
    case PcSource::Interrupt:
      enter_trap(hart, TrapCause::external_irq(*ev.irq), r.decision.return_pc);
      r.irq_taken = true;
      r.redirect = true;
      break;
    case PcSource::Mret:
      mret(hart);
      r.redirect = true;
      break;
    case PcSource::Reset:
    case PcSource::Branch:
    case PcSource::Hold:
      hart.pc = r.decision.next_pc;
      r.redirect = true;
      break;
    case PcSource::Increment:
      // WFI completes at once when an interrupt is already pending.
      if (outcome.wfi && !pending_irq) {
        hart.status = HartStatus::WfiSleeping;
        hart.pc = pc + 4;
        r.slept = true;
      }
      break;
  }
  return r;
}

}  // namespace klessydra
