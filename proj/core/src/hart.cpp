// SPDX-License-Identifier: Apache-2.0

#include "klessydra/hart.hpp"

#include <fmt/format.h>

namespace klessydra {

bool TrapCause::carries_address() const {
  if (is_interrupt) return false;
  switch (code) {
    case cause::kInstrMisaligned: case cause::kInstrAccessFault: case cause::kLoadMisaligned:
    case cause::kLoadAccessFault: case cause::kStoreMisaligned: case cause::kStoreAccessFault:
      return true;
    default:
      return false;
  }
}

std::string describe(const TrapCause& c) {
  if (c.is_interrupt) return fmt::format("external interrupt #{}", c.tval);
  switch (c.code) {
    case cause::kInstrMisaligned: return fmt::format("instruction address misaligned ({:#010x})", c.tval);
    case cause::kInstrAccessFault: return fmt::format("instruction access fault ({:#010x})", c.tval);
    case cause::kIllegalInstr: return "illegal instruction";
    case cause::kBreakpoint: return "breakpoint";
    case cause::kLoadMisaligned: return fmt::format("load address misaligned ({:#010x})", c.tval);
    case cause::kLoadAccessFault: return fmt::format("load access fault ({:#010x})", c.tval);
    case cause::kStoreMisaligned: return fmt::format("store address misaligned ({:#010x})", c.tval);
    case cause::kStoreAccessFault: return fmt::format("store access fault ({:#010x})", c.tval);
    case cause::kEcallM: return "environment call";
    default: return fmt::format("cause {}", c.code);
  }
}

CsrFile::CsrFile(unsigned hart_id, Word mcpuid) : mcpuid_(mcpuid), mhartid_(hart_id) {}

bool CsrFile::implemented(unsigned addr) noexcept {
  switch (static_cast<Csr>(addr)) {
    case Csr::MSTATUS: case Csr::MEPC: case Csr::MCAUSE: case Csr::PCER: case Csr::MESTATUS:
    case Csr::MHPMCOUNTER: case Csr::MHPMEVENT: case Csr::MCPUID: case Csr::MIMPID:
    case Csr::MHARTID: case Csr::MIP: case Csr::MTVEC: case Csr::MIRQ: case Csr::MBADADDR:
      return true;
  }
  return false;
}

bool CsrFile::read_only(unsigned addr) noexcept {
  switch (static_cast<Csr>(addr)) {
    case Csr::MCPUID: case Csr::MIMPID: case Csr::MHARTID: case Csr::MIRQ:
      return true;
    default:
      return false;
  }
}

Word* CsrFile::cell(unsigned addr) noexcept {
  switch (static_cast<Csr>(addr)) {
    case Csr::MSTATUS: return &mstatus_;
    case Csr::MEPC: return &mepc_;
    case Csr::MCAUSE: return &mcause_;
    case Csr::PCER: return &pcer_;
    case Csr::MESTATUS: return &mestatus_;
    case Csr::MHPMCOUNTER: return &mhpmcounter_;
    case Csr::MHPMEVENT: return &mhpmevent_;
    case Csr::MCPUID: return &mcpuid_;
    case Csr::MIMPID: return &mimpid_;
    case Csr::MHARTID: return &mhartid_;
    case Csr::MIP: return &mip_;
    case Csr::MTVEC: return &mtvec_;
    case Csr::MIRQ: return &mirq_;
    case Csr::MBADADDR: return &mbadaddr_;
  }
  return nullptr;
}

std::optional<Word> CsrFile::read(unsigned addr) const noexcept {
  if (const Word* c = const_cast<CsrFile*>(this)->cell(addr)) return *c;
  return std::nullopt;
}

bool CsrFile::write(unsigned addr, Word value) noexcept {
  Word* c = cell(addr);
  if (!c) return false;
  if (read_only(addr)) return true;
  if (static_cast<Csr>(addr) == Csr::MSTATUS) value &= kMstatusMie;
  *c = value;
  return true;
}

Word CsrFile::get(Csr c) const noexcept { return *const_cast<CsrFile*>(this)->cell(csr_addr(c)); }

void CsrFile::set(Csr c, Word value) noexcept {
  if (c == Csr::MHARTID) return;
  if (c == Csr::MSTATUS) value &= kMstatusMie;
  *cell(csr_addr(c)) = value;
}

Word alu_exec(Op op, Word a, Word b) noexcept {
  const unsigned sh = b & 31;
  switch (op) {
    case Op::ADD: case Op::ADDI: return a + b;
    case Op::SUB: return a - b;
    case Op::SLT: case Op::SLTI: return static_cast<SWord>(a) < static_cast<SWord>(b) ? 1 : 0;
    case Op::SLTU: case Op::SLTIU: return a < b ? 1 : 0;
    case Op::AND: case Op::ANDI: return a & b;
    case Op::OR: case Op::ORI: return a | b;
    case Op::XOR: case Op::XORI: return a ^ b;
    case Op::SLL: case Op::SLLI: return a << sh;
    case Op::SRL: case Op::SRLI: return a >> sh;
    case Op::SRA: case Op::SRAI: return static_cast<Word>(static_cast<SWord>(a) >> sh);
    default: return 0;
  }
}

bool branch_eval(Op op, Word a, Word b) noexcept {
  switch (op) {
    case Op::BEQ: return a == b;
    case Op::BNE: return a != b;
    case Op::BLT: return static_cast<SWord>(a) < static_cast<SWord>(b);
    case Op::BGE: return static_cast<SWord>(a) >= static_cast<SWord>(b);
    case Op::BLTU: return a < b;
    case Op::BGEU: return a >= b;
    default: return false;
  }
}

std::optional<Word> csr_access(HartState& hart, CsrKind kind, unsigned addr, Word operand) noexcept {
  auto old = hart.csrs.read(addr);
  if (!old) return std::nullopt;
  switch (kind) {
    case CsrKind::RW: hart.csrs.write(addr, operand); break;
    case CsrKind::RS: if (operand) hart.csrs.write(addr, *old | operand); break;
    case CsrKind::RC: if (operand) hart.csrs.write(addr, *old & ~operand); break;
  }
  return old;
}

void enter_trap(HartState& hart, const TrapCause& c, Addr return_pc) noexcept {
  auto& csr = hart.csrs;
  csr.set(Csr::MEPC, return_pc);
  csr.set(Csr::MCAUSE, c.mcause());
  csr.set(Csr::MESTATUS, csr.get(Csr::MSTATUS));
  csr.set(Csr::MSTATUS, csr.get(Csr::MSTATUS) & ~kMstatusMie);
  if (c.carries_address()) csr.set(Csr::MBADADDR, c.tval);
  if (c.is_interrupt) csr.set(Csr::MIRQ, c.tval);
  hart.pc = csr.get(Csr::MTVEC) & ~Word{3};
  hart.status = HartStatus::Running;
}

void mret(HartState& hart) noexcept {
  hart.pc = hart.csrs.get(Csr::MEPC);
  hart.csrs.set(Csr::MSTATUS, hart.csrs.get(Csr::MESTATUS));
}

std::optional<MemoryRequest> memory_request(const DecodedInstruction& d, Word a, Word b) noexcept {
  MemoryRequest r;
  r.addr = a + static_cast<Word>(d.imm);
  switch (d.op) {
    case Op::LW: r.width = Width::Word; break;
    case Op::LH: r.width = Width::Half; r.sign_extend = true; break;
    case Op::LHU: r.width = Width::Half; break;
    case Op::LB: r.width = Width::Byte; r.sign_extend = true; break;
    case Op::LBU: r.width = Width::Byte; break;
    case Op::SW: case Op::SH: case Op::SB:
      r.kind = AccessKind::Write;
      r.width = d.op == Op::SW ? Width::Word : d.op == Op::SH ? Width::Half : Width::Byte;
      r.wdata = b;
      break;
    case Op::AMOSWAP_W:
      r.kind = AccessKind::AmoSwap;
      r.addr = a;
      r.wdata = b;
      break;
    default:
      return std::nullopt;
  }
  return r;
}

namespace {

ExecOutcome trap(TrapCause c) {
  ExecOutcome o;
  o.retired = false;
  o.exception = c;
  return o;
}

ExecOutcome jump(HartState& hart, unsigned rd, Addr pc, Addr target) {
  if (target % 4 != 0) return trap(TrapCause::exception(cause::kInstrMisaligned, target));
  hart.set_reg(rd, pc + 4);
  ExecOutcome o;
  o.branch_target = target;
  return o;
}

}  // namespace

ExecOutcome execute(HartState& hart, const DecodedInstruction& d, Addr pc, Word a, Word b, Memory& mem,
                    const ExecFeatures& features) {
  ExecOutcome out;
  const Word imm = static_cast<Word>(d.imm);
  switch (d.op) {
    case Op::ADDI: case Op::SLTI: case Op::SLTIU: case Op::ANDI: case Op::ORI: case Op::XORI:
    case Op::SLLI: case Op::SRLI: case Op::SRAI:
      hart.set_reg(d.rd, alu_exec(d.op, a, imm));
      return out;
    case Op::ADD: case Op::SLT: case Op::SLTU: case Op::AND: case Op::OR: case Op::XOR:
    case Op::SLL: case Op::SRL: case Op::SRA: case Op::SUB:
      hart.set_reg(d.rd, alu_exec(d.op, a, b));
      return out;
    case Op::LUI:
      hart.set_reg(d.rd, imm);
      return out;
    case Op::AUIPC:
      hart.set_reg(d.rd, pc + imm);
      return out;
    case Op::JAL:
      return jump(hart, d.rd, pc, pc + imm);
    case Op::JALR:
      return jump(hart, d.rd, pc, (a + imm) & ~Word{1});
    case Op::BEQ: case Op::BNE: case Op::BLT: case Op::BLTU: case Op::BGE: case Op::BGEU: {
      if (!branch_eval(d.op, a, b)) return out;
      const Addr target = pc + imm;
      if (target % 4 != 0) return trap(TrapCause::exception(cause::kInstrMisaligned, target));
      out.branch_target = target;
      return out;
    }
    case Op::LW: case Op::LH: case Op::LHU: case Op::LB: case Op::LBU:
    case Op::SW: case Op::SH: case Op::SB: case Op::AMOSWAP_W: {
      if (d.op == Op::AMOSWAP_W && !features.amo_enabled)
        return trap(TrapCause::exception(cause::kIllegalInstr));
      auto req = *memory_request(d, a, b);
      auto r = mem.access(req);
      if (r.fault) return trap(*r.fault);
      if (req.kind != AccessKind::Write) hart.set_reg(d.rd, r.data);
      return out;
    }
    case Op::FENCE: case Op::FENCE_I:
      return out;
    case Op::ECALL:
      return trap(TrapCause::exception(cause::kEcallM));
    case Op::EBREAK:
      if (features.debug_attached) {
        out.debug_break = true;
        return out;
      }
      return trap(TrapCause::exception(cause::kBreakpoint, pc));
    case Op::MRET:
      out.mret = true;
      return out;
    case Op::WFI:
      out.wfi = true;
      return out;
    case Op::CSRRW: case Op::CSRRS: case Op::CSRRC:
    case Op::CSRRWI: case Op::CSRRSI: case Op::CSRRCI: {
      const bool immediate = d.op == Op::CSRRWI || d.op == Op::CSRRSI || d.op == Op::CSRRCI;
      const Word operand = immediate ? imm : a;
      const CsrKind kind = (d.op == Op::CSRRW || d.op == Op::CSRRWI)   ? CsrKind::RW
                           : (d.op == Op::CSRRS || d.op == Op::CSRRSI) ? CsrKind::RS
                                                                       : CsrKind::RC;
      auto old = csr_access(hart, kind, d.csr, operand);
      if (!old) return trap(TrapCause::exception(cause::kIllegalInstr));
      hart.set_reg(d.rd, *old);
      return out;
    }
  }
  return trap(TrapCause::exception(cause::kIllegalInstr));
}

}  // namespace klessydra
