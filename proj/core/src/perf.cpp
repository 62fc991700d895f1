// SPDX-License-Identifier: Apache-2.0

#include "klessydra/perf.hpp"

#include <numeric>

namespace klessydra {

std::string_view event_name(PerfEvent e) {
  switch (e) {
    case PerfEvent::Cycle: return "cycle";
    case PerfEvent::Retired: return "retired";
    case PerfEvent::Flush: return "flush";
    case PerfEvent::VoidSlot: return "void_slot";
    case PerfEvent::MemStall: return "mem_stall";
    case PerfEvent::CsrWait: return "csr_wait";
    case PerfEvent::BranchRedirect: return "branch_redirect";
    case PerfEvent::Trap: return "trap";
    case PerfEvent::FetchStall: return "fetch_stall";
    case PerfEvent::DebugHalt: return "debug_halt";
    case PerfEvent::Idle: return "idle";
    case PerfEvent::Squashed: return "squashed";
  }
  return "unknown";
}

std::uint64_t PerfCounters::total_retired() const {
  return std::accumulate(retired.begin(), retired.end(), std::uint64_t{0});
}

std::uint64_t PerfCounters::accounted_cycles() const {
  return total_retired() + trap_slots + squashed_slots + void_pad_slots + mem_stall_cycles + csr_wait_cycles +
         fetch_stall_cycles + debug_halt_cycles + idle_cycles;
}

namespace {

void mirror(HartState& h, PerfEvent e, std::uint64_t n) {
  const Word ev = static_cast<Word>(e);
  auto& csr = h.csrs;
  if ((csr.get(Csr::PCER) >> ev & 1u) == 0 || csr.get(Csr::MHPMEVENT) != ev) return;
  csr.set(Csr::MHPMCOUNTER, csr.get(Csr::MHPMCOUNTER) + static_cast<Word>(n));
}

}  // namespace

void record(PerfCounters& c, PerfEvent e, std::optional<unsigned> hart, std::span<HartState> harts,
            std::uint64_t n) {
  switch (e) {
    case PerfEvent::Cycle: c.cycles += n; break;
    case PerfEvent::Retired:
      if (hart && *hart < c.retired.size()) c.retired[*hart] += n;
      break;
    case PerfEvent::Flush: c.flush_slots += n; break;
    case PerfEvent::VoidSlot: c.void_pad_slots += n; break;
    case PerfEvent::MemStall: c.mem_stall_cycles += n; break;
    case PerfEvent::CsrWait: c.csr_wait_cycles += n; break;
    case PerfEvent::BranchRedirect: c.branches_redirecting += n; break;
    case PerfEvent::Trap: c.trap_slots += n; break;
    case PerfEvent::FetchStall: c.fetch_stall_cycles += n; break;
    case PerfEvent::DebugHalt: c.debug_halt_cycles += n; break;
    case PerfEvent::Idle: c.idle_cycles += n; break;
    case PerfEvent::Squashed: c.squashed_slots += n; break;
  }
  if (hart) {
    if (*hart < harts.size()) mirror(harts[*hart], e, n);
  } else {
    for (auto& h : harts) mirror(h, e, n);
  }
}

PerfReport report(const PerfCounters& c, double cycle_time_ns) {
  PerfReport r;
  r.ipc_per_hart.assign(c.retired.size(), 0.0);
  r.stall_cycles = c.mem_stall_cycles + c.csr_wait_cycles + c.fetch_stall_cycles;
  if (c.cycles == 0) return r;
  const auto cyc = static_cast<double>(c.cycles);
  r.ipc = static_cast<double>(c.total_retired()) / cyc;
  for (std::size_t h = 0; h < c.retired.size(); ++h) r.ipc_per_hart[h] = static_cast<double>(c.retired[h]) / cyc;
  if (cycle_time_ns > 0.0) r.mips = r.ipc / cycle_time_ns * 1000.0;
  return r;
}

nlohmann::ordered_json stats_document(const CoreConfig& cfg, const PerfCounters& c) {
  const PerfReport r = report(c, cfg.cycle_time_ns);
  nlohmann::ordered_json j;
  j["format_version"] = kStatsFormatVersion;
  j["variant"] = cfg.name();
  j["B"] = cfg.baseline;
  j["S"] = cfg.pool_size;
  j["D"] = cfg.depth();
  j["active_harts"] = cfg.booted_harts();
  j["cycles"] = c.cycles;
  j["retired"] = c.total_retired();
  j["ipc"] = r.ipc;
  j["mips"] = r.mips;
  j["flushes"] = c.flush_slots;
  j["void_slots"] = c.void_pad_slots;
  j["mem_stalls"] = c.mem_stall_cycles;
  j["cycle_time_ns"] = cfg.cycle_time_ns;
  j["retired_per_hart"] = c.retired;
  j["ipc_per_hart"] = r.ipc_per_hart;
  j["branches_redirecting"] = c.branches_redirecting;
  j["csr_waits"] = c.csr_wait_cycles;
  j["fetch_stalls"] = c.fetch_stall_cycles;
  j["debug_halt_cycles"] = c.debug_halt_cycles;
  j["idle_cycles"] = c.idle_cycles;
  j["trap_slots"] = c.trap_slots;
  j["squashed_slots"] = c.squashed_slots;
  j["interrupts_taken"] = c.interrupts_taken;
  j["hazard_warnings"] = c.hazard_warnings;
  return j;
}

}  // namespace klessydra
