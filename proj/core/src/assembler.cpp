// SPDX-License-Identifier: Apache-2.0

#include "klessydra/assembler.hpp"

#include <fmt/format.h>

#include <array>
#include <cctype>
#include <charconv>

#include "klessydra/isa.hpp"

namespace klessydra {

namespace {

constexpr std::array<std::string_view, 32> kAbiNames = {
    "zero", "ra", "sp", "gp", "tp",  "t0",  "t1", "t2", "s0", "s1", "a0",
    "a1",   "a2", "a3", "a4", "a5",  "a6",  "a7", "s2", "s3", "s4", "s5",
    "s6",   "s7", "s8", "s9", "s10", "s11", "t3", "t4", "t5", "t6"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  for (char c : s)
    if (!is_ident_char(c)) return false;
  return true;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  s = trim(s);
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  int radix = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    radix = 16;
    s.remove_prefix(2);
  }
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, radix);
  if (ec != std::errc() || p != s.data() + s.size() || v > 0xFFFF'FFFFull) return std::nullopt;
  auto r = static_cast<std::int64_t>(v);
  return neg ? -r : r;
}

std::vector<std::string_view> split_operands(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

struct Line {
  int number;
  Addr addr;
  std::string_view mnemonic;
  std::string_view operands;
};

class Assembler {
 public:
  Assembler(std::string_view source, Addr base) : source_(source), base_(base) {}

  ProgramImage run() {
    if (base_ % 4 != 0) throw AssemblyError(0, fmt::format("base address {:#x} is not word aligned", base_));
    first_pass();
    ProgramImage image;
    image.base = base_;
    image.symbols = symbols_;
    image.words.assign((end_ - base_) / 4, 0);
    for (const auto& l : lines_) {
      line_ = l.number;
      image.words[(l.addr - base_) / 4] = encode_line(l);
    }
    return image;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw AssemblyError(line_, msg); }

  void first_pass() {
    Addr loc = base_;
    std::size_t pos = 0;
    int number = 0;
    while (pos <= source_.size()) {
      auto nl = source_.find('\n', pos);
      if (nl == std::string_view::npos) nl = source_.size();
      std::string_view text = source_.substr(pos, nl - pos);
      pos = nl + 1;
      line_ = ++number;
      if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
      text = trim(text);
      // Leading labels.
      for (;;) {
        auto colon = text.find(':');
        if (colon == std::string_view::npos) break;
        auto label = trim(text.substr(0, colon));
        if (!is_identifier(label)) break;
        if (symbols_.count(std::string(label))) fail(fmt::format("duplicate label '{}'", label));
        symbols_.emplace(std::string(label), loc);
        text = trim(text.substr(colon + 1));
      }
      if (text.empty()) continue;
      auto sp = text.find_first_of(" \t");
      std::string_view mn = sp == std::string_view::npos ? text : text.substr(0, sp);
      std::string_view ops = sp == std::string_view::npos ? std::string_view{} : trim(text.substr(sp));
      if (mn == ".org") {
        auto v = parse_int(ops);
        if (!v || *v < 0) fail(fmt::format("bad .org address '{}'", ops));
        auto target = static_cast<Addr>(*v);
        if (target % 4 != 0) fail(fmt::format(".org address {:#x} is not word aligned", target));
        if (target < loc) fail(fmt::format(".org {:#x} moves the location counter backwards (at {:#x})", target, loc));
        loc = target;
        continue;
      }
      lines_.push_back(Line{number, loc, mn, ops});
      loc += 4;
    }
    end_ = loc;
  }

  unsigned reg(std::string_view tok) const {
    auto r = parse_register(trim(tok));
    if (!r) fail(fmt::format("unknown register '{}'", trim(tok)));
    return *r;
  }

  std::int64_t value(std::string_view tok) const {
    tok = trim(tok);
    if (auto v = parse_int(tok)) return *v;
    if (is_identifier(tok)) {
      auto it = symbols_.find(std::string(tok));
      if (it == symbols_.end()) fail(fmt::format("undefined label '{}'", tok));
      return it->second;
    }
    fail(fmt::format("bad immediate '{}'", tok));
  }

  std::int64_t immediate(std::string_view tok) const {
    tok = trim(tok);
    auto v = parse_int(tok);
    if (!v) fail(fmt::format("bad immediate '{}'", tok));
    return *v;
  }

  // Branch and jump targets: a label resolves pc-relative, a number is the offset.
  std::int64_t target_offset(std::string_view tok, Addr pc) const {
    tok = trim(tok);
    if (auto v = parse_int(tok)) return *v;
    if (!is_identifier(tok)) fail(fmt::format("bad branch target '{}'", tok));
    auto it = symbols_.find(std::string(tok));
    if (it == symbols_.end()) fail(fmt::format("undefined label '{}'", tok));
    return static_cast<std::int64_t>(it->second) - static_cast<std::int64_t>(pc);
  }

  // "imm(reg)" or "(reg)".
  std::pair<std::int64_t, unsigned> mem_operand(std::string_view tok) const {
    tok = trim(tok);
    auto open = tok.find('(');
    auto close = tok.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
      fail(fmt::format("expected offset(register), got '{}'", tok));
    auto off = trim(tok.substr(0, open));
    std::int64_t imm = off.empty() ? 0 : immediate(off);
    return {imm, reg(tok.substr(open + 1, close - open - 1))};
  }

  unsigned csr(std::string_view tok) const {
    tok = trim(tok);
    if (auto c = csr_from_name(tok)) return *c;
    auto v = parse_int(tok);
    if (!v || *v < 0 || *v > 0xFFF) fail(fmt::format("unknown csr '{}'", tok));
    return static_cast<unsigned>(*v);
  }

  void expect(const std::vector<std::string_view>& ops, std::size_t n, std::string_view mn) const {
    if (ops.size() != n) fail(fmt::format("'{}' expects {} operand(s), got {}", mn, n, ops.size()));
  }

  static SWord clamp32(std::int64_t v) { return static_cast<SWord>(v); }

  SWord checked(std::int64_t v, std::int64_t lo, std::int64_t hi, std::string_view what) const {
    if (v < lo || v > hi) fail(fmt::format("{} {} out of range [{}, {}]", what, v, lo, hi));
    return clamp32(v);
  }

  unsigned fence_bits(std::string_view tok) const {
    tok = trim(tok);
    if (tok == "0") return 0;
    unsigned b = 0;
    for (char c : tok) {
      switch (c) {
        case 'i': b |= 8; break;
        case 'o': b |= 4; break;
        case 'r': b |= 2; break;
        case 'w': b |= 1; break;
        default: fail(fmt::format("bad fence ordering '{}'", tok));
      }
    }
    return b;
  }

  Word emit(const DecodedInstruction& d) const {
    try {
      return encode(d);
    } catch (const EncodeError& e) {
      fail(e.what());
    }
  }

  Word encode_line(const Line& l) const {
    const auto mn = l.mnemonic;
    const auto ops = split_operands(l.operands);
    const Addr pc = l.addr;

    if (mn == ".word") {
      expect(ops, 1, mn);
      auto v = value(ops[0]);
      if (v < -0x8000'0000ll || v > 0xFFFF'FFFFll) fail(fmt::format(".word value {} out of range", v));
      return static_cast<Word>(v);
    }
    if (mn == "nop") {
      expect(ops, 0, mn);
      return emit(make_instr(Op::ADDI));
    }
    if (mn == "mv") {
      expect(ops, 2, mn);
      return emit(make_instr(Op::ADDI, reg(ops[0]), reg(ops[1])));
    }
    if (mn == "li") {
      expect(ops, 2, mn);
      auto imm = immediate(ops[1]);
      if (imm < -2048 || imm > 2047) fail(fmt::format("li immediate {} does not fit in 12 bits (use lui+addi)", imm));
      return emit(make_instr(Op::ADDI, reg(ops[0]), 0, 0, clamp32(imm)));
    }
    if (mn == "j") {
      expect(ops, 1, mn);
      return emit(make_instr(Op::JAL, 0, 0, 0, jump_offset(ops[0], pc)));
    }
    if (mn == "ret") {
      expect(ops, 0, mn);
      return emit(make_instr(Op::JALR, 0, 1, 0, 0));
    }
    if (mn.substr(0, 9) == "amoswap.w") {
      auto suffix = mn.substr(9);
      SWord aqrl = 0;
      if (suffix == ".aq") aqrl = 2;
      else if (suffix == ".rl") aqrl = 1;
      else if (suffix == ".aqrl") aqrl = 3;
      else if (!suffix.empty()) fail(fmt::format("unknown mnemonic '{}'", mn));
      expect(ops, 3, mn);
      auto [off, base] = mem_operand(ops[2]);
      if (off != 0) fail("amoswap.w takes no address offset");
      return emit(make_instr(Op::AMOSWAP_W, reg(ops[0]), base, reg(ops[1]), aqrl));
    }

    auto op = op_from_mnemonic(mn);
    if (!op) fail(fmt::format("unknown mnemonic '{}'", mn));

    switch (*op) {
      case Op::ECALL: case Op::EBREAK: case Op::MRET: case Op::WFI: case Op::FENCE_I:
        expect(ops, 0, mn);
        return emit(make_instr(*op));
      case Op::FENCE:
        if (ops.empty()) return emit(make_instr(Op::FENCE, 0, 0, 0, 0xFF));
        expect(ops, 2, mn);
        return emit(make_instr(Op::FENCE, 0, 0, 0, static_cast<SWord>((fence_bits(ops[0]) << 4) | fence_bits(ops[1]))));
      case Op::LUI: case Op::AUIPC: {
        expect(ops, 2, mn);
        auto v = checked(immediate(ops[1]), -(1 << 19), 0xFFFFF, "upper immediate");
        return emit(make_instr(*op, reg(ops[0]), 0, 0, static_cast<SWord>(static_cast<Word>(v) << 12)));
      }
      case Op::JAL:
        if (ops.size() == 1) return emit(make_instr(Op::JAL, 1, 0, 0, jump_offset(ops[0], pc)));
        expect(ops, 2, mn);
        return emit(make_instr(Op::JAL, reg(ops[0]), 0, 0, jump_offset(ops[1], pc)));
      case Op::JALR: {
        if (ops.size() == 1) return emit(make_instr(Op::JALR, 1, reg(ops[0]), 0, 0));
        if (ops.size() == 2) {
          auto [off, base] = mem_operand(ops[1]);
          return emit(make_instr(Op::JALR, reg(ops[0]), base, 0, checked(off, -2048, 2047, "immediate")));
        }
        expect(ops, 3, mn);
        return emit(make_instr(Op::JALR, reg(ops[0]), reg(ops[1]), 0,
                               checked(immediate(ops[2]), -2048, 2047, "immediate")));
      }
      case Op::CSRRW: case Op::CSRRS: case Op::CSRRC:
        expect(ops, 3, mn);
        return emit(make_instr(*op, reg(ops[0]), reg(ops[2]), 0, 0, csr(ops[1])));
      case Op::CSRRWI: case Op::CSRRSI: case Op::CSRRCI:
        expect(ops, 3, mn);
        return emit(make_instr(*op, reg(ops[0]), 0, 0, checked(immediate(ops[2]), 0, 31, "csr immediate"),
                               csr(ops[1])));
      default:
        break;
    }

    if (is_branch(*op)) {
      expect(ops, 3, mn);
      auto off = target_offset(ops[2], pc);
      if (off < -4096 || off > 4094) fail(fmt::format("branch target out of range (offset {})", off));
      return emit(make_instr(*op, 0, reg(ops[0]), reg(ops[1]), clamp32(off)));
    }
    if (is_load(*op)) {
      expect(ops, 2, mn);
      auto [off, base] = mem_operand(ops[1]);
      return emit(make_instr(*op, reg(ops[0]), base, 0, checked(off, -2048, 2047, "immediate")));
    }
    if (is_store(*op)) {
      expect(ops, 2, mn);
      auto [off, base] = mem_operand(ops[1]);
      return emit(make_instr(*op, 0, base, reg(ops[0]), checked(off, -2048, 2047, "immediate")));
    }
    expect(ops, 3, mn);
    if (format_of(*op) == Format::R)
      return emit(make_instr(*op, reg(ops[0]), reg(ops[1]), reg(ops[2])));
    auto imm = immediate(ops[2]);
    if (*op == Op::SLLI || *op == Op::SRLI || *op == Op::SRAI)
      return emit(make_instr(*op, reg(ops[0]), reg(ops[1]), 0, checked(imm, 0, 31, "shift amount")));
    return emit(make_instr(*op, reg(ops[0]), reg(ops[1]), 0, checked(imm, -2048, 2047, "immediate")));
  }

  SWord jump_offset(std::string_view tok, Addr pc) const {
    auto off = target_offset(tok, pc);
    if (off < -(1 << 20) || off > (1 << 20) - 2) fail(fmt::format("jump target out of range (offset {})", off));
    return clamp32(off);
  }

  std::string_view source_;
  Addr base_;
  Addr end_ = 0;
  mutable int line_ = 0;
  std::vector<Line> lines_;
  std::map<std::string, Addr> symbols_;
};

}  // namespace

AssemblyError::AssemblyError(int line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line), message_(message) {}

std::vector<std::uint8_t> ProgramImage::bytes() const {
  std::vector<std::uint8_t> out;
  out.reserve(words.size() * 4);
  for (Word w : words)
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(w >> (8 * i)));
  return out;
}

ProgramImage assemble(std::string_view source, Addr base) { return Assembler(source, base).run(); }

std::optional<unsigned> parse_register(std::string_view tok) noexcept {
  if (tok.size() >= 2 && tok[0] == 'x') {
    unsigned v = 0;
    auto [p, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), v);
    if (ec == std::errc() && p == tok.data() + tok.size() && v < kNumRegs &&
        !(tok.size() > 2 && tok[1] == '0'))
      return v;
    return std::nullopt;
  }
  if (tok == "fp") return 8u;
  for (unsigned i = 0; i < kAbiNames.size(); ++i)
    if (kAbiNames[i] == tok) return i;
  return std::nullopt;
}

std::string disassemble_image(const ProgramImage& image) {
  std::string out;
  for (Word w : image.words) {
    if (auto d = decode(w))
      out += disassemble(*d);
    else
      out += fmt::format(".word {:#010x}", w);
    out += '\n';
  }
  return out;
}

}  // namespace klessydra
