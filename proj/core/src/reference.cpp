// SPDX-License-Identifier: Apache-2.0

#include "klessydra/reference.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "klessydra/pc_update.hpp"

namespace klessydra {

ReferenceInterpreter::ReferenceInterpreter(const CoreConfig& cfg, Memory memory)
    : cfg_(cfg),
      mem_(std::move(memory)),
      irq_pending_(cfg.pool_size),
      last_trap_(cfg.pool_size),
      retired_(cfg.pool_size, 0) {
  cfg_.validate();
  mem_.set_timing({cfg_.grant_wait, cfg_.valid_wait});
  features_.amo_enabled = cfg_.amo_enabled();
  for (unsigned h = 0; h < cfg_.pool_size; ++h) {
    harts_.emplace_back(h, cfg_.boot_pc, cfg_.mcpuid());
    if (h >= cfg_.booted_harts()) harts_.back().status = HartStatus::WfiSleeping;
  }
}

void ReferenceInterpreter::post_interrupt(unsigned irq, unsigned hart) {
  if (hart >= cfg_.pool_size) throw std::out_of_range("interrupt target hart outside the pool");
  irq_pending_[hart] = irq;
  auto& csr = harts_[hart].csrs;
  csr.set(Csr::MIP, csr.get(Csr::MIP) | kMipMeip);
}

void ReferenceInterpreter::wake() {
  for (unsigned h = 0; h < cfg_.pool_size; ++h) {
    HartState& hs = harts_[h];
    if (hs.status != HartStatus::WfiSleeping || !irq_pending_[h]) continue;
    hs.status = HartStatus::Running;
    if (hs.csrs.interrupts_enabled()) {
      enter_trap(hs, TrapCause::external_irq(*irq_pending_[h]), hs.pc);
      irq_pending_[h].reset();
      hs.csrs.set(Csr::MIP, hs.csrs.get(Csr::MIP) & ~kMipMeip);
    }
  }
}

bool ReferenceInterpreter::quiescent() const {
  for (unsigned h = 0; h < cfg_.pool_size; ++h)
    if (harts_[h].status == HartStatus::Running || irq_pending_[h]) return false;
  return true;
}

bool ReferenceInterpreter::step() {
  if (stop_) return false;
  wake();
  if (quiescent()) {
    stop_ = StopReason::Quiescent;
    return false;
  }
  unsigned h = cursor_;
  while (harts_[h].status != HartStatus::Running) h = (h + 1) % cfg_.pool_size;
  cursor_ = (h + 1) % cfg_.pool_size;

  HartState& hart = harts_[h];
  const Addr pc = hart.pc;
  ExecOutcome out;
  const AccessResult f = mem_.fetch(pc);
  hart.pc = pc + 4;
  if (f.fault) {
    out.retired = false;
    out.exception = f.fault;
  } else if (auto d = decode(f.data)) {
    out = execute(hart, *d, pc, hart.reg(d->rs1), hart.reg(d->rs2), mem_, features_);
  } else {
    out.retired = false;
    out.exception = TrapCause::exception(cause::kIllegalInstr);
  }
  const auto pending = irq_pending_[h];
  const CommitResult cr = commit(hart, pc, out, pending, cfg_.boot_pc);
  if (cr.irq_taken) {
    irq_pending_[h].reset();
    hart.csrs.set(Csr::MIP, hart.csrs.get(Csr::MIP) & ~kMipMeip);
  }
  ++steps_;
  if (out.exception) {
    const std::pair<Addr, Word> key{pc, out.exception->mcause()};
    if (last_trap_[h] == key) {
      stop_ = StopReason::TrapLoop;
      info_.loop_hart = h;
      info_.loop_pc = pc;
      info_.loop_cause = out.exception;
    }
    last_trap_[h] = key;
  } else {
    ++retired_[h];
    last_trap_[h].reset();
  }
  if (mem_.exit_code()) stop_ = StopReason::Exit;
  return !stop_;
}

RunResult ReferenceInterpreter::run(std::uint64_t max_steps) {
  const std::uint64_t start = steps_;
  while (!stop_ && steps_ - start < max_steps) step();
  if (!stop_ && quiescent()) stop_ = StopReason::Quiescent;
  RunResult r = info_;
  r.reason = stop_.value_or(StopReason::MaxCycles);
  r.cycles = steps_;
  r.exit_code = mem_.exit_code();
  return r;
}

ReferenceResult run_reference(const CoreConfig& cfg, const Memory& initial, std::uint64_t max_steps) {
  ReferenceInterpreter ref(cfg, initial);
  ReferenceResult out{ref.run(max_steps), {}, Memory{}, {}};
  out.harts = ref.harts();
  out.memory = ref.memory();
  out.retired = ref.retired();
  return out;
}

std::vector<std::string> compare_states(std::span<const HartState> a, const Memory& ma,
                                        std::span<const HartState> b, const Memory& mb,
                                        std::size_t max_reports) {
  std::vector<std::string> diffs;
  auto note = [&](std::string s) {
    if (diffs.size() < max_reports) diffs.push_back(std::move(s));
  };
  if (a.size() != b.size()) note(fmt::format("hart count {} vs {}", a.size(), b.size()));
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t h = 0; h < n; ++h) {
    for (unsigned r = 1; r < kNumRegs; ++r)
      if (a[h].reg(r) != b[h].reg(r))
        note(fmt::format("hart {} x{}: {:#010x} vs {:#010x}", h, r, a[h].reg(r), b[h].reg(r)));
    if (a[h].pc != b[h].pc) note(fmt::format("hart {} pc: {:#010x} vs {:#010x}", h, a[h].pc, b[h].pc));
    if (a[h].status != b[h].status) note(fmt::format("hart {} status differs", h));
    for (unsigned addr = 0; addr < 0x1000; ++addr) {
      if (!CsrFile::implemented(addr) || addr == csr_addr(Csr::MHPMCOUNTER)) continue;
      const Word x = *a[h].csrs.read(addr);
      const Word y = *b[h].csrs.read(addr);
      if (x != y) note(fmt::format("hart {} {}: {:#010x} vs {:#010x}", h, csr_name(addr), x, y));
    }
  }
  const auto da = ma.data_bytes();
  const auto db = mb.data_bytes();
  if (da.size() != db.size()) {
    note("data segment sizes differ");
  } else {
    for (std::size_t i = 0; i < da.size(); ++i)
      if (da[i] != db[i])
        note(fmt::format("data[{:#010x}]: {:#04x} vs {:#04x}", ma.map().data.base + i, da[i], db[i]));
  }
  if (ma.console().output() != mb.console().output()) note("console output differs");
  return diffs;
}

}  // namespace klessydra
