// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "klessydra/csr.hpp"
#include "klessydra/isa.hpp"
#include "klessydra/memory.hpp"
#include "klessydra/trap.hpp"
#include "klessydra/types.hpp"

namespace klessydra {

enum class HartStatus : std::uint8_t { Running, WfiSleeping };

/// The per-hart control and status registers.
class CsrFile {
 public:
  explicit CsrFile(unsigned hart_id = 0, Word mcpuid = 0);

  static bool implemented(unsigned addr) noexcept;
  static bool read_only(unsigned addr) noexcept;

  /// Guest view. nullopt for unimplemented addresses.
  std::optional<Word> read(unsigned addr) const noexcept;
  /// Guest write: dropped for read-only rows. Returns false for
  /// unimplemented addresses.
  bool write(unsigned addr, Word value) noexcept;

  /// Hardware-side access; bypasses the read-only rule (MHARTID excepted).
  Word get(Csr c) const noexcept;
  void set(Csr c, Word value) noexcept;

  bool interrupts_enabled() const noexcept { return (mstatus_ & kMstatusMie) != 0; }

  friend bool operator==(const CsrFile&, const CsrFile&) = default;

 private:
  Word* cell(unsigned addr) noexcept;

  Word mstatus_ = 0;
  Word mepc_ = 0;
  Word mcause_ = 0;
  Word pcer_ = 0;
  Word mestatus_ = 0;
  Word mhpmcounter_ = 0;
  Word mhpmevent_ = 0;
  Word mcpuid_ = 0;
  Word mimpid_ = kMimpidValue;
  Word mhartid_ = 0;
  Word mip_ = 0;
  Word mtvec_ = 0;
  Word mirq_ = 0;
  Word mbadaddr_ = 0;
};

/// Architectural state of one hardware thread.
struct HartState {
  std::array<Word, kNumRegs> regs{};
  Addr pc = 0;
  CsrFile csrs;
  HartStatus status = HartStatus::Running;
  unsigned id = 0;

  HartState() = default;
  HartState(unsigned hart_id, Addr boot_pc, Word mcpuid = 0)
      : pc(boot_pc), csrs(hart_id, mcpuid), id(hart_id) {}

  Word reg(unsigned r) const { return regs[r & 31]; }
  void set_reg(unsigned r, Word v) {
    if ((r & 31) != 0) regs[r & 31] = v;
  }
};

Word alu_exec(Op op, Word a, Word b) noexcept;
bool branch_eval(Op op, Word a, Word b) noexcept;

enum class CsrKind : std::uint8_t { RW, RS, RC };

/// Returns the prior value, or nullopt for an unimplemented CSR (the caller
/// raises an illegal-instruction trap). RS/RC with a zero operand do not write.
std::optional<Word> csr_access(HartState& hart, CsrKind kind, unsigned addr, Word operand) noexcept;

void enter_trap(HartState& hart, const TrapCause& cause, Addr return_pc) noexcept;
void mret(HartState& hart) noexcept;

struct ExecFeatures {
  bool amo_enabled = true;
  bool debug_attached = false;
};

/// What an executed instruction asks of the program-counter logic. Register,
/// CSR and memory effects have already been applied when this is returned;
/// trap entry and MRET are applied by the caller through pc_update.
struct ExecOutcome {
  bool retired = true;
  std::optional<TrapCause> exception;
  std::optional<Addr> branch_target;
  bool mret = false;
  bool wfi = false;
  bool debug_break = false;
};

/// The data-port request a load/store/AMO will issue, if any.
std::optional<MemoryRequest> memory_request(const DecodedInstruction& instr, Word rs1v, Word rs2v) noexcept;

/// Single-instruction semantics shared by the pipelined engine and the
/// reference interpreter. Operand values are passed in because the pipeline
/// reads them in the decode stage.
ExecOutcome execute(HartState& hart, const DecodedInstruction& instr, Addr pc, Word rs1v, Word rs2v,
                    Memory& mem, const ExecFeatures& features);

}  // namespace klessydra
