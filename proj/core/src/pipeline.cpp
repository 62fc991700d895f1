// SPDX-License-Identifier: Apache-2.0

#include "klessydra/pipeline.hpp"

#include <algorithm>
#include <cassert>

#include "klessydra/pc_update.hpp"

namespace klessydra {

std::string_view state_name(FsmIeState s) {
  switch (s) {
    case FsmIeState::Sleep: return "sleep";
    case FsmIeState::Reset: return "reset";
    case FsmIeState::Debug: return "debug";
    case FsmIeState::Normal: return "normal";
    case FsmIeState::DataGrant: return "data_grant";
    case FsmIeState::DataValidWait: return "data_valid_wait";
    case FsmIeState::CsrWait: return "csr_wait";
    case FsmIeState::WfiWait: return "wfi_wait";
  }
  return "?";
}

std::string_view slot_name(SlotClass s) {
  switch (s) {
    case SlotClass::Retired: return "retire";
    case SlotClass::Trap: return "trap";
    case SlotClass::Squashed: return "squashed";
    case SlotClass::Void: return "void";
    case SlotClass::MemStall: return "mem_stall";
    case SlotClass::CsrWait: return "csr_wait";
    case SlotClass::FetchStall: return "fetch_stall";
    case SlotClass::DebugHalt: return "debug_halt";
    case SlotClass::Idle: return "idle";
  }
  return "?";
}

std::string_view stop_name(StopReason r) {
  switch (r) {
    case StopReason::Exit: return "exit";
    case StopReason::Quiescent: return "quiescent";
    case StopReason::MaxCycles: return "max_cycles";
    case StopReason::TrapLoop: return "trap_loop";
    case StopReason::DebugHalt: return "debug_halt";
  }
  return "?";
}

namespace {

StageView view_of(const StageLatch& l) { return {l.kind, l.harc, l.pc, l.raw}; }

bool reads(const DecodedInstruction& reader, unsigned rd) {
  return (reads_rs1(reader.op) && reader.rs1 == rd) || (reads_rs2(reader.op) && reader.rs2 == rd);
}

}  // namespace

Core::Core(CoreConfig cfg, Memory memory)
    : cfg_(cfg),
      mem_(std::move(memory)),
      sched_((cfg.validate(), cfg.baseline), cfg.pool_size, cfg.pad_void_slots),
      perf_(cfg.pool_size),
      irq_pending_(cfg.pool_size),
      last_trap_(cfg.pool_size),
      bp_skip_(cfg.pool_size, false) {
  mem_.set_timing({cfg_.grant_wait, cfg_.valid_wait});
  features_.amo_enabled = cfg_.amo_enabled();
  harts_.reserve(cfg_.pool_size);
  for (unsigned h = 0; h < cfg_.pool_size; ++h) {
    harts_.emplace_back(h, cfg_.boot_pc, cfg_.mcpuid());
    if (h >= cfg_.booted_harts()) harts_.back().status = HartStatus::WfiSleeping;
  }
}

std::span<const HartStatus> Core::statuses() {
  for (unsigned h = 0; h < cfg_.pool_size; ++h) status_buf_[h] = harts_[h].status;
  return {status_buf_.data(), cfg_.pool_size};
}

void Core::post_interrupt(unsigned irq, unsigned hart) {
  if (hart >= cfg_.pool_size) throw std::out_of_range("interrupt target hart outside the pool");
  irq_pending_[hart] = irq;
  auto& csr = harts_[hart].csrs;
  csr.set(Csr::MIP, csr.get(Csr::MIP) | kMipMeip);
}

void Core::schedule_interrupt(std::uint64_t at_cycle, unsigned irq, unsigned hart) {
  if (hart >= cfg_.pool_size) throw std::out_of_range("interrupt target hart outside the pool");
  irq_schedule_.emplace(at_cycle, std::make_pair(irq, hart));
}

bool Core::any_valid() const {
  const unsigned d = cfg_.depth();
  return std::any_of(latches_.begin(), latches_.begin() + d, [](const StageLatch& l) { return l.valid(); });
}

bool Core::quiescent() const {
  if (ie_hold_ || any_valid() || !irq_schedule_.empty()) return false;
  for (unsigned h = 0; h < cfg_.pool_size; ++h)
    if (harts_[h].status == HartStatus::Running || irq_pending_[h]) return false;
  return true;
}

FsmIeState Core::resolve_state() const {
  if (halted_) return FsmIeState::Debug;
  if (ie_hold_) {
    if (ie_csr_) return FsmIeState::CsrWait;
    return ie_wait_total_ - ie_wait_ < ie_grant_ ? FsmIeState::DataGrant
                                                           : FsmIeState::DataValidWait;
  }
  const bool all_sleep = std::all_of(harts_.begin(), harts_.end(),
                                     [](const HartState& h) { return h.status == HartStatus::WfiSleeping; });
  if (all_sleep && !any_valid()) return cfg_.variant == Variant::S0 ? FsmIeState::WfiWait : FsmIeState::Sleep;
  if (!fetch_enable_ && !any_valid()) return FsmIeState::Sleep;
  return FsmIeState::Normal;
}

void Core::deliver_interrupts(CycleReport& rep) {
  while (!irq_schedule_.empty() && irq_schedule_.begin()->first <= cycle_) {
    const auto [irq, hart] = irq_schedule_.begin()->second;
    irq_schedule_.erase(irq_schedule_.begin());
    post_interrupt(irq, hart);
  }
  for (unsigned h = 0; h < cfg_.pool_size; ++h) {
    HartState& hs = harts_[h];
    if (hs.status != HartStatus::WfiSleeping || !irq_pending_[h]) continue;
    hs.status = HartStatus::Running;
    rep.woke |= 1u << h;
    if (hs.csrs.interrupts_enabled()) {
      // The sleeping hart's pc already points past its WFI.
      enter_trap(hs, TrapCause::external_irq(*irq_pending_[h]), hs.pc);
      irq_pending_[h].reset();
      hs.csrs.set(Csr::MIP, hs.csrs.get(Csr::MIP) & ~kMipMeip);
      ++perf_.interrupts_taken;
    }
  }
}

StageLatch Core::fetch(CycleReport& rep) {
  StageLatch l;
  if (halt_requested_ || !fetch_enable_ || (stepping_ && step_fetched_)) {
    sched_.tick_idle();
    return l;
  }
  auto st = statuses();
  if (!breakpoints_.empty() && !stepping_) {
    if (auto peek = sched_.peek(st); peek && breakpoints_.contains(harts_[*peek].pc) && !bp_skip_[*peek]) {
      halt_requested_ = true;
      sched_.tick_idle();
      return l;
    }
  }
  const bool any_running = std::any_of(st.begin(), st.end(), [](HartStatus s) { return s == HartStatus::Running; });
  const auto slot = sched_.next(st);
  if (!slot) {
    if (any_running) {
      l.kind = LatchKind::Void;
      rep.fetch_void = true;
    }
    return l;
  }
  HartState& h = harts_[*slot];
  l.kind = LatchKind::Valid;
  l.harc = *slot;
  l.pc = h.pc;
  const AccessResult r = mem_.fetch(h.pc);
  if (r.fault) {
    l.fetch_fault = r.fault;
  } else {
    l.raw = r.data;
    l.instr = decode(r.data);
  }
  h.pc += 4;
  bp_skip_[*slot] = false;
  if (stepping_) step_fetched_ = true;
  fetch_stall_left_ = cfg_.fetch_wait;
  rep.fetched = true;
  rep.fetch_harc = l.harc;
  rep.fetch_pc = l.pc;
  return l;
}

void Core::read_operands(StageLatch& l, CycleReport& rep) {
  if (!l.valid() || l.operands_ready) return;
  l.operands_ready = true;
  if (!l.instr) return;
  const HartState& h = harts_[l.harc];
  l.rs1v = h.reg(l.instr->rs1);
  l.rs2v = h.reg(l.instr->rs2);
  // No interlock exists; report a read of a register an older in-flight
  // instruction of the same hart has yet to write.
  for (unsigned s = 2; s < cfg_.depth(); ++s) {
    const StageLatch& older = latches_[s];
    if (!older.valid() || older.harc != l.harc || !older.instr) continue;
    if (writes_rd(older.instr->op) && older.instr->rd != 0 && reads(*l.instr, older.instr->rd)) {
      rep.hazard = true;
      ++perf_.hazard_warnings;
      break;
    }
  }
}

unsigned Core::required_wait(const StageLatch& l, unsigned& grant) const {
  grant = 0;
  if (!l.instr || l.fetch_fault) return 0;
  const DecodedInstruction& d = *l.instr;
  if (is_csr(d.op)) return CsrFile::implemented(d.csr) ? cfg_.csr_extra_wait : 0;
  if (d.op == Op::AMOSWAP_W && !features_.amo_enabled) return 0;
  const auto req = memory_request(d, l.rs1v, l.rs2v);
  if (!req || mem_.check(req->addr, req->width, req->kind)) return 0;
  const unsigned w = mem_.latency(req->addr);
  if (w > 0) grant = mem_.timing().grant_wait;
  return w;
}

unsigned Core::flush_younger(unsigned harc) {
  unsigned n = 0;
  for (unsigned s = 0; s + 1 < cfg_.depth(); ++s) {
    StageLatch& l = latches_[s];
    if (l.valid() && l.harc == harc) {
      l.kind = LatchKind::Squashed;
      ++n;
    }
  }
  return n;
}

void Core::discard_in_flight() {
  const unsigned d = cfg_.depth();
  for (unsigned h = 0; h < cfg_.pool_size; ++h) {
    for (unsigned s = d; s-- > 0;) {
      if (latches_[s].valid() && latches_[s].harc == h) {
        harts_[h].pc = latches_[s].pc;
        break;
      }
    }
  }
  latches_.fill(StageLatch{});
  ie_hold_ = false;
  ie_wait_ = 0;
}

SlotClass Core::execute_last(CycleReport& rep) {
  StageLatch& l = latches_[cfg_.depth() - 1];
  const unsigned h = l.harc;
  HartState& hart = harts_[h];

  ExecOutcome out;
  if (l.fetch_fault) {
    out.retired = false;
    out.exception = l.fetch_fault;
  } else if (!l.instr) {
    out.retired = false;
    out.exception = TrapCause::exception(cause::kIllegalInstr);
  } else {
    out = execute(hart, *l.instr, l.pc, l.rs1v, l.rs2v, mem_, features_);
  }

  const auto pending = irq_pending_[h];
  const CommitResult cr = commit(hart, l.pc, out, pending, cfg_.boot_pc);
  SlotClass slot = SlotClass::Retired;

  if (out.exception) {
    slot = SlotClass::Trap;
    rep.trap = out.exception;
    rep.trap_harc = h;
    const std::pair<Addr, Word> key{l.pc, out.exception->mcause()};
    if (last_trap_[h] == key) {
      stop_ = StopReason::TrapLoop;
      stop_info_.loop_hart = h;
      stop_info_.loop_pc = l.pc;
      stop_info_.loop_cause = out.exception;
    }
    last_trap_[h] = key;
  } else {
    rep.retired = true;
    rep.retire_harc = h;
    rep.retire_pc = l.pc;
    rep.retire_raw = l.raw;
    last_trap_[h].reset();
  }

  if (cr.irq_taken) {
    irq_pending_[h].reset();
    hart.csrs.set(Csr::MIP, hart.csrs.get(Csr::MIP) & ~kMipMeip);
    ++perf_.interrupts_taken;
    if (!rep.trap) {
      rep.trap = TrapCause::external_irq(*pending);
      rep.trap_harc = h;
    }
  }

  if (cr.redirect) {
    const unsigned n = flush_younger(h);
    rep.flushed = n;
    record(perf_, PerfEvent::Flush, h, harts_, n);
    if (cr.decision.source == PcSource::Branch) record(perf_, PerfEvent::BranchRedirect, h, harts_);
  } else if (cr.slept) {
    flush_younger(h);
  }

  l = StageLatch{};
  // A software breakpoint halts precisely: younger instructions of every
  // hart are dropped and refetched on resume.
  if (out.debug_break && !stepping_) {
    discard_in_flight();
    halt_requested_ = true;
  }
  if (mem_.exit_code()) {
    rep.exited = true;
    stop_ = StopReason::Exit;
    discard_in_flight();
  }
  return slot;
}

void Core::finish_cycle(CycleReport& rep, SlotClass slot) {
  rep.slot = slot;
  switch (slot) {
    case SlotClass::Retired: record(perf_, PerfEvent::Retired, rep.retire_harc, harts_); break;
    case SlotClass::Trap: record(perf_, PerfEvent::Trap, rep.trap_harc, harts_); break;
    case SlotClass::Squashed: record(perf_, PerfEvent::Squashed, std::nullopt, harts_); break;
    case SlotClass::Void: record(perf_, PerfEvent::VoidSlot, std::nullopt, harts_); break;
    case SlotClass::MemStall: record(perf_, PerfEvent::MemStall, std::nullopt, harts_); break;
    case SlotClass::CsrWait: record(perf_, PerfEvent::CsrWait, std::nullopt, harts_); break;
    case SlotClass::FetchStall: record(perf_, PerfEvent::FetchStall, std::nullopt, harts_); break;
    case SlotClass::DebugHalt: record(perf_, PerfEvent::DebugHalt, std::nullopt, harts_); break;
    case SlotClass::Idle: record(perf_, PerfEvent::Idle, std::nullopt, harts_); break;
  }
  record(perf_, PerfEvent::Cycle, std::nullopt, harts_);
  assert(perf_.conserved());

  if (halt_requested_ && !stepping_ && !ie_hold_ && !any_valid()) {
    halt_requested_ = false;
    halted_ = true;
    latches_.fill(StageLatch{});
  }
  if (!stop_ && quiescent()) stop_ = StopReason::Quiescent;

  ++cycle_;
  state_ = resolve_state();
  rep.round = sched_.round();
  if (rep.state != FsmIeState::DataGrant && rep.state != FsmIeState::DataValidWait &&
      rep.state != FsmIeState::CsrWait)
    rep.state = state_;
  if (trace_) trace_(rep);
}

CycleReport Core::step_cycle() {
  if (stop_) throw std::logic_error("the core has stopped");
  CycleReport rep;
  rep.cycle = cycle_;
  rep.depth = cfg_.depth();

  if (halted_) {
    for (unsigned s = 0; s < rep.depth; ++s) rep.stages[s] = view_of(latches_[s]);
    finish_cycle(rep, SlotClass::DebugHalt);
    return rep;
  }

  deliver_interrupts(rep);

  if (fetch_stall_left_ > 0) {
    --fetch_stall_left_;
    if (!ie_hold_) {
      for (unsigned s = 0; s < rep.depth; ++s) rep.stages[s] = view_of(latches_[s]);
      finish_cycle(rep, SlotClass::FetchStall);
      return rep;
    }
  }

  const unsigned d = cfg_.depth();
  if (!ie_hold_) {
    for (unsigned s = d - 1; s > 0; --s) latches_[s] = latches_[s - 1];
    latches_[0] = fetch(rep);
    if (d >= 3) read_operands(latches_[1], rep);
  }
  StageLatch& last = latches_[d - 1];
  for (unsigned s = 0; s < d; ++s) rep.stages[s] = view_of(latches_[s]);

  SlotClass slot = SlotClass::Idle;
  switch (last.kind) {
    case LatchKind::Valid: {
      if (d == 2) read_operands(last, rep);
      if (!ie_hold_) {
        unsigned grant = 0;
        const unsigned w = required_wait(last, grant);
        if (w > 0) {
          ie_hold_ = true;
          ie_wait_ = ie_wait_total_ = w;
          ie_grant_ = grant;
          ie_csr_ = is_csr(last.instr->op);
        }
      }
      if (ie_wait_ > 0) {
        const unsigned index = ie_wait_total_ - ie_wait_;
        --ie_wait_;
        if (ie_csr_) {
          rep.state = FsmIeState::CsrWait;
          slot = SlotClass::CsrWait;
        } else {
          rep.state = index < ie_grant_ ? FsmIeState::DataGrant : FsmIeState::DataValidWait;
          slot = SlotClass::MemStall;
        }
        break;
      }
      ie_hold_ = false;
      slot = execute_last(rep);
      break;
    }
    case LatchKind::Squashed: slot = SlotClass::Squashed; break;
    case LatchKind::Void: slot = SlotClass::Void; break;
    case LatchKind::Empty:
      slot = (halt_requested_ || stepping_) ? SlotClass::DebugHalt : SlotClass::Idle;
      break;
  }
  if (last.kind != LatchKind::Valid) last = StageLatch{};
  finish_cycle(rep, slot);
  return rep;
}

RunResult Core::run(std::uint64_t max_cycles) {
  const std::uint64_t start = cycle_;
  for (;;) {
    RunResult r = stop_info_;
    r.cycles = cycle_;
    r.exit_code = mem_.exit_code();
    if (stop_) {
      r.reason = *stop_;
      return r;
    }
    if (halted_) {
      r.reason = StopReason::DebugHalt;
      return r;
    }
    if (cycle_ - start >= max_cycles) {
      r.reason = StopReason::MaxCycles;
      return r;
    }
    step_cycle();
  }
}

void Core::halt() {
  if (stop_ || halted_) return;
  halt_requested_ = true;
  if (!ie_hold_ && !any_valid()) {
    halt_requested_ = false;
    halted_ = true;
    latches_.fill(StageLatch{});
    state_ = FsmIeState::Debug;
  }
}

StepResult Core::debug_step(std::uint64_t max_cycles) {
  if (!halted_) throw DebugError("step requires a halted core");
  StepResult res;
  if (stop_) return res;
  halted_ = false;
  stepping_ = true;
  step_fetched_ = false;
  for (std::uint64_t i = 0; i < max_cycles && !stop_; ++i) {
    const CycleReport rep = step_cycle();
    ++res.cycles;
    if (rep.fetched) {
      res.harc = rep.fetch_harc;
      res.pc = rep.fetch_pc;
    }
    if (rep.retired) {
      res.retired = true;
      res.raw = rep.retire_raw;
    }
    if (rep.trap) res.trap = rep.trap;
    if (step_fetched_ && !ie_hold_ && !any_valid()) break;
  }
  stepping_ = false;
  step_fetched_ = false;
  halt_requested_ = false;
  latches_.fill(StageLatch{});
  if (!stop_) {
    halted_ = true;
    state_ = FsmIeState::Debug;
  }
  return res;
}

void Core::resume() {
  if (!halted_) throw DebugError("resume requires a halted core");
  halted_ = false;
  for (unsigned h = 0; h < cfg_.pool_size; ++h) bp_skip_[h] = breakpoints_.contains(harts_[h].pc);
  state_ = resolve_state();
}

void Core::require_inspectable() const {
  if (!halted_ && !stop_) throw DebugError("the core is running; halt it first");
}

Word Core::read_reg(unsigned hart, unsigned reg) const {
  require_inspectable();
  if (reg >= kNumRegs) throw std::out_of_range("register index");
  return harts_.at(hart).reg(reg);
}

void Core::write_reg(unsigned hart, unsigned reg, Word value) {
  require_inspectable();
  if (reg >= kNumRegs) throw std::out_of_range("register index");
  harts_.at(hart).set_reg(reg, value);
}

Addr Core::read_pc(unsigned hart) const {
  require_inspectable();
  return harts_.at(hart).pc;
}

void Core::write_pc(unsigned hart, Addr pc) {
  require_inspectable();
  harts_.at(hart).pc = pc;
}

std::optional<Word> Core::read_csr(unsigned hart, unsigned addr) const {
  require_inspectable();
  return harts_.at(hart).csrs.read(addr);
}

bool Core::write_csr(unsigned hart, unsigned addr, Word value) {
  require_inspectable();
  auto& csrs = harts_.at(hart).csrs;
  if (!CsrFile::implemented(addr)) return false;
  csrs.set(static_cast<Csr>(addr), value);
  return true;
}

std::vector<std::uint8_t> Core::read_mem(Addr addr, std::size_t len) const {
  require_inspectable();
  std::vector<std::uint8_t> out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    const auto b = mem_.peek(addr + static_cast<Addr>(i));
    if (!b) throw std::out_of_range("address not backed by memory");
    out.push_back(*b);
  }
  return out;
}

void Core::write_mem(Addr addr, std::span<const std::uint8_t> bytes) {
  require_inspectable();
  for (std::size_t i = 0; i < bytes.size(); ++i)
    if (!mem_.poke(addr + static_cast<Addr>(i), bytes[i])) throw std::out_of_range("address not backed by memory");
}

}  // namespace klessydra
