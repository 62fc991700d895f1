// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "klessydra/types.hpp"

namespace klessydra {

/// One tag per supported instruction. The execute stage dispatches on this
/// single discriminant.
enum class Op : std::uint8_t {
  // OP_IMM
  ADDI, SLTI, SLTIU, ANDI, ORI, XORI, SLLI, SRLI, SRAI,
  // OP
  ADD, SLT, SLTU, AND, OR, XOR, SLL, SRL, SRA, SUB,
  LUI, AUIPC, JAL, JALR,
  // BRANCH
  BEQ, BNE, BLT, BLTU, BGE, BGEU,
  // LOAD / STORE
  LW, LH, LHU, LB, LBU,
  SW, SH, SB,
  // MISC_MEM
  FENCE, FENCE_I,
  // SYSTEM
  ECALL, EBREAK, MRET, WFI,
  CSRRW, CSRRS, CSRRC, CSRRWI, CSRRSI, CSRRCI,
  // AMO
  AMOSWAP_W,
};

inline constexpr std::size_t kOpCount = static_cast<std::size_t>(Op::AMOSWAP_W) + 1;

enum class Format : std::uint8_t { R, I, S, SB, U, UJ };

/// A decoded instruction word.
///
/// `imm` is the fully sign-extended immediate of the format. A few ops reuse
/// it for non-immediate fields so that every bit of a legal word is kept:
///  - shifts (SLLI/SRLI/SRAI): the 5-bit shift amount
///  - CSR immediate forms: the zero-extended 5-bit uimm (also in `rs1`)
///  - FENCE: pred in bits 7:4, succ in bits 3:0
///  - AMOSWAP_W: aq in bit 1, rl in bit 0
struct DecodedInstruction {
  Op op = Op::ADDI;
  Format format = Format::I;
  std::uint8_t rd = 0;
  std::uint8_t rs1 = 0;
  std::uint8_t rs2 = 0;
  SWord imm = 0;
  std::uint16_t csr = 0;
  Word raw = 0;

  friend bool operator==(const DecodedInstruction&, const DecodedInstruction&) = default;
};

class EncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Decodes a word. Returns nullopt for anything outside the supported subset
/// (RV32M, other AMOs, compressed forms, reserved encodings).
std::optional<DecodedInstruction> decode(Word word) noexcept;

/// Encodes an instruction from its fields (`raw` is ignored). Throws
/// EncodeError when a field does not fit its encoding.
Word encode(const DecodedInstruction& instr);

/// Builds a DecodedInstruction with the format filled in from the op.
DecodedInstruction make_instr(Op op, unsigned rd = 0, unsigned rs1 = 0, unsigned rs2 = 0,
                              SWord imm = 0, unsigned csr = 0);

std::string disassemble(const DecodedInstruction& instr);

std::string_view mnemonic(Op op) noexcept;
std::optional<Op> op_from_mnemonic(std::string_view name) noexcept;
Format format_of(Op op) noexcept;

/// Name used in disassembly for a CSR address, or empty when unnamed.
std::string_view csr_name(unsigned addr) noexcept;
std::optional<unsigned> csr_from_name(std::string_view name) noexcept;

bool is_branch(Op op) noexcept;
bool is_load(Op op) noexcept;
bool is_store(Op op) noexcept;
bool is_csr(Op op) noexcept;
/// Ops whose result is written to rd (when rd != 0).
bool writes_rd(Op op) noexcept;
bool reads_rs1(Op op) noexcept;
bool reads_rs2(Op op) noexcept;

/// Every op, in declaration order.
const std::array<Op, kOpCount>& all_ops() noexcept;

}  // namespace klessydra
