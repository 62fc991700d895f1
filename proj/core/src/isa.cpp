// SPDX-License-Identifier: Apache-2.0

#include "klessydra/isa.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "klessydra/csr.hpp"

namespace klessydra {

namespace {

enum Opcode : Word {
  kOpLoad = 0x03,
  kOpMiscMem = 0x0F,
  kOpImm = 0x13,
  kOpAuipc = 0x17,
  kOpStore = 0x23,
  kOpAmo = 0x2F,
  kOpReg = 0x33,
  kOpLui = 0x37,
  kOpBranch = 0x63,
  kOpJalr = 0x67,
  kOpJal = 0x6F,
  kOpSystem = 0x73,
};

constexpr Word kWordEcall = 0x0000'0073;
constexpr Word kWordEbreak = 0x0010'0073;
constexpr Word kWordMret = 0x3020'0073;
constexpr Word kWordWfi = 0x1050'0073;
constexpr Word kWordFenceI = 0x0000'100F;

struct OpInfo {
  Op op;
  std::string_view name;
  Format format;
  Word opcode;
  Word funct3;
  Word funct7;
};

// clang-format off
constexpr std::array<OpInfo, kOpCount> kOps{{
  {Op::ADDI,  "addi",  Format::I, kOpImm, 0, 0},
  {Op::SLTI,  "slti",  Format::I, kOpImm, 2, 0},
  {Op::SLTIU, "sltiu", Format::I, kOpImm, 3, 0},
  {Op::ANDI,  "andi",  Format::I, kOpImm, 7, 0},
  {Op::ORI,   "ori",   Format::I, kOpImm, 6, 0},
  {Op::XORI,  "xori",  Format::I, kOpImm, 4, 0},
  {Op::SLLI,  "slli",  Format::I, kOpImm, 1, 0x00},
  {Op::SRLI,  "srli",  Format::I, kOpImm, 5, 0x00},
  {Op::SRAI,  "srai",  Format::I, kOpImm, 5, 0x20},
  {Op::ADD,   "add",   Format::R, kOpReg, 0, 0x00},
  {Op::SLT,   "slt",   Format::R, kOpReg, 2, 0x00},
  {Op::SLTU,  "sltu",  Format::R, kOpReg, 3, 0x00},
  {Op::AND,   "and",   Format::R, kOpReg, 7, 0x00},
  {Op::OR,    "or",    Format::R, kOpReg, 6, 0x00},
  {Op::XOR,   "xor",   Format::R, kOpReg, 4, 0x00},
  {Op::SLL,   "sll",   Format::R, kOpReg, 1, 0x00},
  {Op::SRL,   "srl",   Format::R, kOpReg, 5, 0x00},
  {Op::SRA,   "sra",   Format::R, kOpReg, 5, 0x20},
  {Op::SUB,   "sub",   Format::R, kOpReg, 0, 0x20},
  {Op::LUI,   "lui",   Format::U, kOpLui, 0, 0},
  {Op::AUIPC, "auipc", Format::U, kOpAuipc, 0, 0},
  {Op::JAL,   "jal",   Format::UJ, kOpJal, 0, 0},
  {Op::JALR,  "jalr",  Format::I, kOpJalr, 0, 0},
  {Op::BEQ,   "beq",   Format::SB, kOpBranch, 0, 0},
  {Op::BNE,   "bne",   Format::SB, kOpBranch, 1, 0},
  {Op::BLT,   "blt",   Format::SB, kOpBranch, 4, 0},
  {Op::BLTU,  "bltu",  Format::SB, kOpBranch, 6, 0},
  {Op::BGE,   "bge",   Format::SB, kOpBranch, 5, 0},
  {Op::BGEU,  "bgeu",  Format::SB, kOpBranch, 7, 0},
  {Op::LW,    "lw",    Format::I, kOpLoad, 2, 0},
  {Op::LH,    "lh",    Format::I, kOpLoad, 1, 0},
  {Op::LHU,   "lhu",   Format::I, kOpLoad, 5, 0},
  {Op::LB,    "lb",    Format::I, kOpLoad, 0, 0},
  {Op::LBU,   "lbu",   Format::I, kOpLoad, 4, 0},
  {Op::SW,    "sw",    Format::S, kOpStore, 2, 0},
  {Op::SH,    "sh",    Format::S, kOpStore, 1, 0},
  {Op::SB,    "sb",    Format::S, kOpStore, 0, 0},
  {Op::FENCE, "fence", Format::I, kOpMiscMem, 0, 0},
  {Op::FENCE_I, "fence.i", Format::I, kOpMiscMem, 1, 0},
  {Op::ECALL, "ecall", Format::I, kOpSystem, 0, 0},
  {Op::EBREAK, "ebreak", Format::I, kOpSystem, 0, 0},
  {Op::MRET,  "mret",  Format::I, kOpSystem, 0, 0},
  {Op::WFI,   "wfi",   Format::I, kOpSystem, 0, 0},
  {Op::CSRRW, "csrrw", Format::I, kOpSystem, 1, 0},
  {Op::CSRRS, "csrrs", Format::I, kOpSystem, 2, 0},
  {Op::CSRRC, "csrrc", Format::I, kOpSystem, 3, 0},
  {Op::CSRRWI, "csrrwi", Format::I, kOpSystem, 5, 0},
  {Op::CSRRSI, "csrrsi", Format::I, kOpSystem, 6, 0},
  {Op::CSRRCI, "csrrci", Format::I, kOpSystem, 7, 0},
  {Op::AMOSWAP_W, "amoswap.w", Format::R, kOpAmo, 2, 0x01},
}};
// clang-format on

constexpr const OpInfo& info(Op op) { return kOps[static_cast<std::size_t>(op)]; }

constexpr Word bits(Word v, unsigned hi, unsigned lo) { return (v >> lo) & ((1u << (hi - lo + 1)) - 1); }

constexpr SWord sext(Word v, unsigned width) {
  const Word m = 1u << (width - 1);
  return static_cast<SWord>((v ^ m) - m);
}

constexpr SWord imm_i(Word w) { return sext(bits(w, 31, 20), 12); }
constexpr SWord imm_s(Word w) { return sext((bits(w, 31, 25) << 5) | bits(w, 11, 7), 12); }
constexpr SWord imm_b(Word w) {
  return sext((bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) | (bits(w, 30, 25) << 5) |
                  (bits(w, 11, 8) << 1),
              13);
}
constexpr SWord imm_u(Word w) { return static_cast<SWord>(w & 0xFFFF'F000u); }
constexpr SWord imm_j(Word w) {
  return sext((bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) | (bits(w, 20, 20) << 11) |
                  (bits(w, 30, 21) << 1),
              21);
}

DecodedInstruction base(Op op, Word w) {
  DecodedInstruction d;
  d.op = op;
  d.format = info(op).format;
  d.raw = w;
  return d;
}

DecodedInstruction as_r(Op op, Word w) {
  auto d = base(op, w);
  d.rd = bits(w, 11, 7);
  d.rs1 = bits(w, 19, 15);
  d.rs2 = bits(w, 24, 20);
  return d;
}

DecodedInstruction as_i(Op op, Word w) {
  auto d = base(op, w);
  d.rd = bits(w, 11, 7);
  d.rs1 = bits(w, 19, 15);
  d.imm = imm_i(w);
  return d;
}

std::optional<Op> find(Word opcode, Word funct3, Word funct7) {
  for (const auto& i : kOps)
    if (i.opcode == opcode && i.funct3 == funct3 && i.funct7 == funct7) return i.op;
  return std::nullopt;
}

std::optional<DecodedInstruction> decode_system(Word w) {
  const Word f3 = bits(w, 14, 12);
  if (f3 == 0) {
    switch (w) {
      case kWordEcall: return base(Op::ECALL, w);
      case kWordEbreak: return base(Op::EBREAK, w);
      case kWordMret: return base(Op::MRET, w);
      case kWordWfi: return base(Op::WFI, w);
      default: return std::nullopt;
    }
  }
  if (f3 == 4) return std::nullopt;
  static constexpr Op kCsrOps[8] = {Op::ECALL, Op::CSRRW, Op::CSRRS, Op::CSRRC,
                                    Op::ECALL, Op::CSRRWI, Op::CSRRSI, Op::CSRRCI};
  auto d = base(kCsrOps[f3], w);
  d.rd = bits(w, 11, 7);
  d.rs1 = bits(w, 19, 15);
  d.csr = bits(w, 31, 20);
  if (f3 >= 5) d.imm = d.rs1;
  return d;
}

void check_reg(unsigned r, const char* what) {
  if (r >= kNumRegs) throw EncodeError(fmt::format("{} register index {} out of range", what, r));
}

void check_range(SWord v, SWord lo, SWord hi, std::string_view what) {
  if (v < lo || v > hi) throw EncodeError(fmt::format("{} {} out of range [{}, {}]", what, v, lo, hi));
}

std::string fence_set(unsigned bitsv) {
  if (bitsv == 0) return "0";
  std::string s;
  if (bitsv & 8) s += 'i';
  if (bitsv & 4) s += 'o';
  if (bitsv & 2) s += 'r';
  if (bitsv & 1) s += 'w';
  return s;
}

std::string csr_text(unsigned addr) {
  auto n = csr_name(addr);
  if (!n.empty()) return std::string(n);
  return fmt::format("{:#x}", addr);
}

}  // namespace

std::optional<DecodedInstruction> decode(Word w) noexcept {
  const Word opcode = bits(w, 6, 0);
  const Word f3 = bits(w, 14, 12);
  const Word f7 = bits(w, 31, 25);
  switch (opcode) {
    case kOpReg: {
      auto op = find(kOpReg, f3, f7);
      if (!op) return std::nullopt;
      return as_r(*op, w);
    }
    case kOpImm: {
      std::optional<Op> op;
      if (f3 == 1 || f3 == 5) {
        op = find(kOpImm, f3, f7);
        if (!op) return std::nullopt;
        auto d = as_i(*op, w);
        d.imm = static_cast<SWord>(bits(w, 24, 20));
        return d;
      }
      op = find(kOpImm, f3, 0);
      if (!op) return std::nullopt;
      return as_i(*op, w);
    }
    case kOpLui:
    case kOpAuipc: {
      auto d = base(opcode == kOpLui ? Op::LUI : Op::AUIPC, w);
      d.rd = bits(w, 11, 7);
      d.imm = imm_u(w);
      return d;
    }
    case kOpJal: {
      auto d = base(Op::JAL, w);
      d.rd = bits(w, 11, 7);
      d.imm = imm_j(w);
      return d;
    }
    case kOpJalr:
      if (f3 != 0) return std::nullopt;
      return as_i(Op::JALR, w);
    case kOpBranch: {
      auto op = find(kOpBranch, f3, 0);
      if (!op) return std::nullopt;
      auto d = base(*op, w);
      d.rs1 = bits(w, 19, 15);
      d.rs2 = bits(w, 24, 20);
      d.imm = imm_b(w);
      return d;
    }
    case kOpLoad: {
      auto op = find(kOpLoad, f3, 0);
      if (!op) return std::nullopt;
      return as_i(*op, w);
    }
    case kOpStore: {
      auto op = find(kOpStore, f3, 0);
      if (!op) return std::nullopt;
      auto d = base(*op, w);
      d.rs1 = bits(w, 19, 15);
      d.rs2 = bits(w, 24, 20);
      d.imm = imm_s(w);
      return d;
    }
    case kOpMiscMem:
      if (w == kWordFenceI) return base(Op::FENCE_I, w);
      if (f3 == 0 && bits(w, 11, 7) == 0 && bits(w, 19, 15) == 0 && bits(w, 31, 28) == 0) {
        auto d = base(Op::FENCE, w);
        d.imm = static_cast<SWord>(bits(w, 27, 20));
        return d;
      }
      return std::nullopt;
    case kOpSystem:
      return decode_system(w);
    case kOpAmo: {
      if (f3 != 2 || bits(w, 31, 27) != 0x01) return std::nullopt;
      auto d = base(Op::AMOSWAP_W, w);
      d.rd = bits(w, 11, 7);
      d.rs1 = bits(w, 19, 15);
      d.rs2 = bits(w, 24, 20);
      d.imm = static_cast<SWord>(bits(w, 26, 25));
      return d;
    }
    default:
      return std::nullopt;
  }
}

Word encode(const DecodedInstruction& in) {
  const auto& i = info(in.op);
  check_reg(in.rd, "rd");
  check_reg(in.rs1, "rs1");
  check_reg(in.rs2, "rs2");
  const Word rd = Word{in.rd} << 7;
  const Word rs1 = Word{in.rs1} << 15;
  const Word rs2 = Word{in.rs2} << 20;
  const Word f3 = i.funct3 << 12;
  const Word imm = static_cast<Word>(in.imm);

  switch (in.op) {
    case Op::SLLI:
    case Op::SRLI:
    case Op::SRAI:
      check_range(in.imm, 0, 31, "shift amount");
      return (i.funct7 << 25) | (imm << 20) | rs1 | f3 | rd | i.opcode;
    case Op::ECALL: return kWordEcall;
    case Op::EBREAK: return kWordEbreak;
    case Op::MRET: return kWordMret;
    case Op::WFI: return kWordWfi;
    case Op::FENCE_I: return kWordFenceI;
    case Op::FENCE:
      check_range(in.imm, 0, 0xFF, "fence ordering");
      return (imm << 20) | i.opcode;
    case Op::CSRRW:
    case Op::CSRRS:
    case Op::CSRRC:
    case Op::CSRRWI:
    case Op::CSRRSI:
    case Op::CSRRCI: {
      if (in.csr >= 4096) throw EncodeError(fmt::format("csr address {:#x} out of range", in.csr));
      Word src = rs1;
      if (in.op == Op::CSRRWI || in.op == Op::CSRRSI || in.op == Op::CSRRCI) {
        check_range(in.imm, 0, 31, "csr immediate");
        src = imm << 15;
      }
      return (Word{in.csr} << 20) | src | f3 | rd | i.opcode;
    }
    case Op::AMOSWAP_W:
      check_range(in.imm, 0, 3, "aq/rl bits");
      return (0x01u << 27) | (imm << 25) | rs2 | rs1 | f3 | rd | i.opcode;
    default:
      break;
  }

  switch (i.format) {
    case Format::R:
      return (i.funct7 << 25) | rs2 | rs1 | f3 | rd | i.opcode;
    case Format::I:
      check_range(in.imm, -2048, 2047, "immediate");
      return ((imm & 0xFFF) << 20) | rs1 | f3 | rd | i.opcode;
    case Format::S:
      check_range(in.imm, -2048, 2047, "immediate");
      return (bits(imm, 11, 5) << 25) | rs2 | rs1 | f3 | (bits(imm, 4, 0) << 7) | i.opcode;
    case Format::SB:
      check_range(in.imm, -4096, 4094, "branch offset");
      if (in.imm & 1) throw EncodeError(fmt::format("branch offset {} is not 2-byte aligned", in.imm));
      return (bits(imm, 12, 12) << 31) | (bits(imm, 10, 5) << 25) | rs2 | rs1 | f3 |
             (bits(imm, 4, 1) << 8) | (bits(imm, 11, 11) << 7) | i.opcode;
    case Format::U:
      if (imm & 0xFFF) throw EncodeError(fmt::format("upper immediate {:#x} has low bits set", imm));
      return imm | rd | i.opcode;
    case Format::UJ:
      check_range(in.imm, -(1 << 20), (1 << 20) - 2, "jump offset");
      if (in.imm & 1) throw EncodeError(fmt::format("jump offset {} is not 2-byte aligned", in.imm));
      return (bits(imm, 20, 20) << 31) | (bits(imm, 10, 1) << 21) | (bits(imm, 11, 11) << 20) |
             (bits(imm, 19, 12) << 12) | rd | i.opcode;
  }
  throw EncodeError("unreachable format");
}

DecodedInstruction make_instr(Op op, unsigned rd, unsigned rs1, unsigned rs2, SWord imm,
                              unsigned csr) {
  DecodedInstruction d;
  d.op = op;
  d.format = info(op).format;
  d.imm = imm;
  d.csr = static_cast<std::uint16_t>(csr);
  // Keep only the fields the format carries so make_instr agrees with decode.
  switch (op) {
    case Op::ECALL: case Op::EBREAK: case Op::MRET: case Op::WFI:
    case Op::FENCE_I:
      d.imm = 0;
      d.csr = 0;
      return d;
    case Op::FENCE:
      d.csr = 0;
      return d;
    case Op::CSRRWI: case Op::CSRRSI: case Op::CSRRCI:
      d.rd = static_cast<std::uint8_t>(rd);
      d.rs1 = static_cast<std::uint8_t>(imm);
      return d;
    case Op::CSRRW: case Op::CSRRS: case Op::CSRRC:
      d.rd = static_cast<std::uint8_t>(rd);
      d.rs1 = static_cast<std::uint8_t>(rs1);
      d.imm = 0;
      return d;
    default:
      break;
  }
  d.csr = 0;
  switch (d.format) {
    case Format::R:
      d.rd = static_cast<std::uint8_t>(rd);
      d.rs1 = static_cast<std::uint8_t>(rs1);
      d.rs2 = static_cast<std::uint8_t>(rs2);
      if (op != Op::AMOSWAP_W) d.imm = 0;
      break;
    case Format::I:
      d.rd = static_cast<std::uint8_t>(rd);
      d.rs1 = static_cast<std::uint8_t>(rs1);
      break;
    case Format::S:
    case Format::SB:
      d.rs1 = static_cast<std::uint8_t>(rs1);
      d.rs2 = static_cast<std::uint8_t>(rs2);
      break;
    case Format::U:
    case Format::UJ:
      d.rd = static_cast<std::uint8_t>(rd);
      break;
  }
  return d;
}

std::string disassemble(const DecodedInstruction& d) {
  const auto name = info(d.op).name;
  switch (d.op) {
    case Op::ECALL: case Op::EBREAK: case Op::MRET: case Op::WFI: case Op::FENCE_I:
      return std::string(name);
    case Op::FENCE:
      return fmt::format("fence {}, {}", fence_set((d.imm >> 4) & 0xF), fence_set(d.imm & 0xF));
    case Op::LUI: case Op::AUIPC:
      return fmt::format("{} x{}, {:#x}", name, d.rd, static_cast<Word>(d.imm) >> 12);
    case Op::JAL:
      return fmt::format("jal x{}, {}", d.rd, d.imm);
    case Op::JALR:
      return fmt::format("jalr x{}, {}(x{})", d.rd, d.imm, d.rs1);
    case Op::CSRRW: case Op::CSRRS: case Op::CSRRC:
      return fmt::format("{} x{}, {}, x{}", name, d.rd, csr_text(d.csr), d.rs1);
    case Op::CSRRWI: case Op::CSRRSI: case Op::CSRRCI:
      return fmt::format("{} x{}, {}, {}", name, d.rd, csr_text(d.csr), d.imm);
    case Op::AMOSWAP_W: {
      static constexpr std::string_view kSuffix[4] = {"", ".rl", ".aq", ".aqrl"};
      return fmt::format("amoswap.w{} x{}, x{}, (x{})", kSuffix[d.imm & 3], d.rd, d.rs2, d.rs1);
    }
    default:
      break;
  }
  if (is_load(d.op)) return fmt::format("{} x{}, {}(x{})", name, d.rd, d.imm, d.rs1);
  if (is_store(d.op)) return fmt::format("{} x{}, {}(x{})", name, d.rs2, d.imm, d.rs1);
  if (is_branch(d.op)) return fmt::format("{} x{}, x{}, {}", name, d.rs1, d.rs2, d.imm);
  if (d.format == Format::R) return fmt::format("{} x{}, x{}, x{}", name, d.rd, d.rs1, d.rs2);
  return fmt::format("{} x{}, x{}, {}", name, d.rd, d.rs1, d.imm);
}

std::string_view mnemonic(Op op) noexcept { return info(op).name; }

std::optional<Op> op_from_mnemonic(std::string_view name) noexcept {
  for (const auto& i : kOps)
    if (i.name == name) return i.op;
  return std::nullopt;
}

Format format_of(Op op) noexcept { return info(op).format; }

namespace {
struct CsrNameEntry {
  Csr csr;
  std::string_view name;
};
constexpr CsrNameEntry kCsrNames[] = {
    {Csr::MSTATUS, "mstatus"},   {Csr::MEPC, "mepc"},
    {Csr::MCAUSE, "mcause"},     {Csr::PCER, "pcer"},
    {Csr::MESTATUS, "mestatus"}, {Csr::MHPMCOUNTER, "mhpmcounter"},
    {Csr::MHPMEVENT, "mhpmevent"}, {Csr::MCPUID, "mcpuid"},
    {Csr::MIMPID, "mimpid"},     {Csr::MHARTID, "mhartid"},
    {Csr::MIP, "mip"},           {Csr::MTVEC, "mtvec"},
    {Csr::MIRQ, "mirq"},         {Csr::MBADADDR, "mbadaddr"},
};
}  // namespace

std::string_view csr_name(unsigned addr) noexcept {
  for (const auto& e : kCsrNames)
    if (csr_addr(e.csr) == addr) return e.name;
  return {};
}

std::optional<unsigned> csr_from_name(std::string_view name) noexcept {
  for (const auto& e : kCsrNames)
    if (e.name == name) return csr_addr(e.csr);
  return std::nullopt;
}

bool is_branch(Op op) noexcept { return op >= Op::BEQ && op <= Op::BGEU; }
bool is_load(Op op) noexcept { return op >= Op::LW && op <= Op::LBU; }
bool is_store(Op op) noexcept { return op >= Op::SW && op <= Op::SB; }
bool is_csr(Op op) noexcept { return op >= Op::CSRRW && op <= Op::CSRRCI; }

bool writes_rd(Op op) noexcept {
  if (is_branch(op) || is_store(op)) return false;
  switch (op) {
    case Op::FENCE: case Op::FENCE_I: case Op::ECALL: case Op::EBREAK: case Op::MRET:
    case Op::WFI:
      return false;
    default:
      return true;
  }
}

bool reads_rs1(Op op) noexcept {
  switch (op) {
    case Op::LUI: case Op::AUIPC: case Op::JAL: case Op::FENCE: case Op::FENCE_I:
    case Op::ECALL: case Op::EBREAK: case Op::MRET: case Op::WFI: case Op::CSRRWI:
    case Op::CSRRSI: case Op::CSRRCI:
      return false;
    default:
      return true;
  }
}

bool reads_rs2(Op op) noexcept {
  return format_of(op) == Format::R || is_store(op) || is_branch(op);
}

const std::array<Op, kOpCount>& all_ops() noexcept {
  static const std::array<Op, kOpCount> ops = [] {
    std::array<Op, kOpCount> a{};
    std::transform(kOps.begin(), kOps.end(), a.begin(), [](const OpInfo& i) { return i.op; });
    return a;
  }();
  return ops;
}

}  // namespace klessydra
