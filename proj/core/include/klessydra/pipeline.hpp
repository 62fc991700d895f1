// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "klessydra/config.hpp"
#include "klessydra/hart.hpp"
#include "klessydra/isa.hpp"
#include "klessydra/memory.hpp"
#include "klessydra/perf.hpp"
#include "klessydra/scheduler.hpp"

namespace klessydra {

inline constexpr unsigned kMaxDepth = kMaxBaseline + 1;

enum class FsmIeState : std::uint8_t { Sleep, Reset, Debug, Normal, DataGrant, DataValidWait, CsrWait, WfiWait };

std::string_view state_name(FsmIeState s);

/// Empty: nothing was fetched into the slot (fill, halt drain, sleep).
/// Void: a padding slot from the scheduler. Squashed: flushed instruction.
enum class LatchKind : std::uint8_t { Empty, Void, Valid, Squashed };

struct StageLatch {
  LatchKind kind = LatchKind::Empty;
  unsigned harc = 0;
  Addr pc = 0;
  Word raw = 0;
  /// nullopt when the fetched word does not decode.
  std::optional<DecodedInstruction> instr;
  std::optional<TrapCause> fetch_fault;
  bool operands_ready = false;
  Word rs1v = 0;
  Word rs2v = 0;

  bool valid() const { return kind == LatchKind::Valid; }
};

/// How the last stage spent a cycle. Exactly one per cycle.
enum class SlotClass : std::uint8_t { Retired, Trap, Squashed, Void, MemStall, CsrWait, FetchStall, DebugHalt, Idle };

std::string_view slot_name(SlotClass s);

struct StageView {
  LatchKind kind = LatchKind::Empty;
  unsigned harc = 0;
  Addr pc = 0;
  Word raw = 0;
};

struct CycleReport {
  std::uint64_t cycle = 0;
  std::uint64_t round = 0;
  FsmIeState state = FsmIeState::Normal;
  SlotClass slot = SlotClass::Idle;
  unsigned depth = 0;
  /// Occupancy after this cycle's fetch, before the last stage retires.
  std::array<StageView, kMaxDepth> stages{};

  bool fetched = false;
  bool fetch_void = false;
  unsigned fetch_harc = 0;
  Addr fetch_pc = 0;

  bool retired = false;
  unsigned retire_harc = 0;
  Addr retire_pc = 0;
  Word retire_raw = 0;

  unsigned flushed = 0;
  std::optional<TrapCause> trap;
  unsigned trap_harc = 0;
  bool hazard = false;
  /// Bit h set when hart h left WFI sleep at the start of the cycle.
  std::uint32_t woke = 0;
  bool exited = false;
};

enum class StopReason : std::uint8_t { Exit, Quiescent, MaxCycles, TrapLoop, DebugHalt };

std::string_view stop_name(StopReason r);

struct RunResult {
  StopReason reason = StopReason::MaxCycles;
  std::uint64_t cycles = 0;
  std::optional<Word> exit_code;
  /// Set for TrapLoop.
  unsigned loop_hart = 0;
  Addr loop_pc = 0;
  std::optional<TrapCause> loop_cause;
};

/// Raised by debug-unit accesses while the core is running.
class DebugError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct StepResult {
  bool retired = false;
  unsigned harc = 0;
  Addr pc = 0;
  Word raw = 0;
  std::optional<TrapCause> trap;
  std::uint64_t cycles = 0;
};

/// The interleaved multithreaded core: D = B + 1 stages, stage 0 fetches,
/// stage 1 reads operands (D >= 3), the last stage executes and writes back.
class Core {
 public:
  using TraceSink = std::function<void(const CycleReport&)>;

  explicit Core(CoreConfig cfg, Memory memory = Memory{});

  const CoreConfig& config() const { return cfg_; }
  Memory& memory() { return mem_; }
  const Memory& memory() const { return mem_; }
  HartState& hart(unsigned h) { return harts_.at(h); }
  const HartState& hart(unsigned h) const { return harts_.at(h); }
  std::span<const HartState> harts() const { return harts_; }
  const PerfCounters& counters() const { return perf_; }
  const Scheduler& scheduler() const { return sched_; }
  std::span<const StageLatch> latches() const { return {latches_.data(), cfg_.depth()}; }
  std::uint64_t cycle() const { return cycle_; }
  FsmIeState state() const { return state_; }
  std::optional<StopReason> stop_reason() const { return stop_; }
  bool finished() const { return stop_.has_value(); }

  /// Advances every stage by one clock. Throws std::logic_error once the
  /// core has stopped.
  CycleReport step_cycle();
  /// Steps until a stop condition or `max_cycles` more cycles.
  RunResult run(std::uint64_t max_cycles);

  void post_interrupt(unsigned irq, unsigned hart = 0);
  /// Posts the interrupt at the start of `at_cycle`.
  void schedule_interrupt(std::uint64_t at_cycle, unsigned irq, unsigned hart = 0);
  std::optional<unsigned> pending_irq(unsigned hart) const { return irq_pending_.at(hart); }

  void set_trace(TraceSink sink) { trace_ = std::move(sink); }
  void set_debug_attached(bool on) { features_.debug_attached = on; }
  void set_fetch_enable(bool on) { fetch_enable_ = on; }

  // Debug unit.
  /// Stops fetching; the core enters Debug once in-flight instructions drain.
  void halt();
  bool halted() const { return halted_; }
  bool halt_pending() const { return halt_requested_; }
  /// Fetches one instruction of the next scheduled hart, drains it and
  /// halts again.
  StepResult debug_step(std::uint64_t max_cycles = 4096);
  void resume();
  void add_breakpoint(Addr pc) { breakpoints_.insert(pc); }
  bool remove_breakpoint(Addr pc) { return breakpoints_.erase(pc) != 0; }
  const std::set<Addr>& breakpoints() const { return breakpoints_; }

  Word read_reg(unsigned hart, unsigned reg) const;
  void write_reg(unsigned hart, unsigned reg, Word value);
  Addr read_pc(unsigned hart) const;
  void write_pc(unsigned hart, Addr pc);
  std::optional<Word> read_csr(unsigned hart, unsigned addr) const;
  bool write_csr(unsigned hart, unsigned addr, Word value);
  std::vector<std::uint8_t> read_mem(Addr addr, std::size_t len) const;
  void write_mem(Addr addr, std::span<const std::uint8_t> bytes);

 private:
  void require_inspectable() const;
  void deliver_interrupts(CycleReport& rep);
  StageLatch fetch(CycleReport& rep);
  void read_operands(StageLatch& l, CycleReport& rep);
  unsigned required_wait(const StageLatch& l, unsigned& grant) const;
  SlotClass execute_last(CycleReport& rep);
  unsigned flush_younger(unsigned harc);
  void discard_in_flight();
  bool any_valid() const;
  bool quiescent() const;
  FsmIeState resolve_state() const;
  void finish_cycle(CycleReport& rep, SlotClass slot);
  std::span<const HartStatus> statuses();

  CoreConfig cfg_;
  Memory mem_;
  std::vector<HartState> harts_;
  Scheduler sched_;
  PerfCounters perf_;
  ExecFeatures features_;
  std::array<StageLatch, kMaxDepth> latches_{};
  std::array<HartStatus, kMaxPoolSize> status_buf_{};

  std::uint64_t cycle_ = 0;
  FsmIeState state_ = FsmIeState::Reset;
  std::optional<StopReason> stop_;
  RunResult stop_info_;

  bool ie_hold_ = false;
  unsigned ie_wait_ = 0;
  unsigned ie_wait_total_ = 0;
  unsigned ie_grant_ = 0;
  bool ie_csr_ = false;
  unsigned fetch_stall_left_ = 0;
  bool fetch_enable_ = true;

  std::vector<std::optional<unsigned>> irq_pending_;
  std::multimap<std::uint64_t, std::pair<unsigned, unsigned>> irq_schedule_;
  std::vector<std::optional<std::pair<Addr, Word>>> last_trap_;

  bool halt_requested_ = false;
  bool halted_ = false;
  bool stepping_ = false;
  bool step_fetched_ = false;
  std::set<Addr> breakpoints_;
  std::vector<bool> bp_skip_;

  TraceSink trace_;
};

}  // namespace klessydra
