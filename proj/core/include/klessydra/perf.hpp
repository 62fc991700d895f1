// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "klessydra/config.hpp"
#include "klessydra/hart.hpp"

namespace klessydra {

/// Event classes selectable through MHPMEVENT. PCER bit n enables class n.
enum class PerfEvent : std::uint8_t {
  Cycle = 1,
  Retired = 2,
  Flush = 3,
  VoidSlot = 4,
  MemStall = 5,
  CsrWait = 6,
  BranchRedirect = 7,
  Trap = 8,
  FetchStall = 9,
  DebugHalt = 10,
  Idle = 11,
  Squashed = 12,
};

std::string_view event_name(PerfEvent e);

struct PerfCounters {
  std::uint64_t cycles = 0;
  std::vector<std::uint64_t> retired;
  std::uint64_t branches_redirecting = 0;
  /// Latches invalidated by control-flow transfers, counted when flushed.
  std::uint64_t flush_slots = 0;
  std::uint64_t void_pad_slots = 0;
  std::uint64_t mem_stall_cycles = 0;
  std::uint64_t csr_wait_cycles = 0;
  std::uint64_t fetch_stall_cycles = 0;
  std::uint64_t debug_halt_cycles = 0;
  std::uint64_t idle_cycles = 0;
  /// Exception slots: the instruction reached the last stage and trapped.
  std::uint64_t trap_slots = 0;
  /// Invalidated latches as they leave the last stage.
  std::uint64_t squashed_slots = 0;
  std::uint64_t interrupts_taken = 0;
  std::uint64_t hazard_warnings = 0;

  explicit PerfCounters(unsigned harts = 1) : retired(harts, 0) {}

  std::uint64_t total_retired() const;
  /// Every cycle lands in exactly one category at the last stage.
  std::uint64_t accounted_cycles() const;
  bool conserved() const { return accounted_cycles() == cycles; }

  friend bool operator==(const PerfCounters&, const PerfCounters&) = default;
};

/// Counts one event. `hart` selects the hart for per-hart classes; core-wide
/// classes (cycle, stalls, void, idle) pass nullopt and are mirrored into
/// every hart's MHPMCOUNTER whose PCER/MHPMEVENT select them.
void record(PerfCounters& c, PerfEvent e, std::optional<unsigned> hart, std::span<HartState> harts,
            std::uint64_t n = 1);

struct PerfReport {
  double ipc = 0.0;
  std::vector<double> ipc_per_hart;
  double mips = 0.0;
  std::uint64_t stall_cycles = 0;
};

PerfReport report(const PerfCounters& c, double cycle_time_ns);

inline constexpr int kStatsFormatVersion = 1;

nlohmann::ordered_json stats_document(const CoreConfig& cfg, const PerfCounters& c);

}  // namespace klessydra
