// SPDX-License-Identifier: Apache-2.0

#include "kernels.hpp"

#include <fmt/format.h>

#include <array>
#include <vector>

#include "klessydra/assembler.hpp"

namespace klessydra::kernels {

std::string straight_line(unsigned n) {
  std::string s;
  s.reserve(n * 20);
  for (unsigned i = 0; i + 1 < n; ++i) s += fmt::format("addi x{}, x{}, {}\n", 10 + i % 8, 10 + i % 8, 1 + i % 7);
  s += "wfi\n";
  return s;
}

std::string loop(unsigned iterations, unsigned body) {
  std::string s = fmt::format("li t0, {}\nloop:\n", iterations);
  for (unsigned i = 0; i < body; ++i) s += fmt::format("addi x{}, x{}, 1\n", 10 + i % 8, 10 + i % 8);
  s += "addi t0, t0, -1\nbne t0, x0, loop\nwfi\n";
  return s;
}

std::string lock(unsigned increments) {
  return fmt::format(R"(lui s0, 0x100
li s1, {}
li t1, 1
acquire:
amoswap.w t0, t1, (s0)
bne t0, x0, acquire
lw t2, 4(s0)
addi t2, t2, 1
sw t2, 4(s0)
amoswap.w x0, x0, (s0)
addi s1, s1, -1
bne s1, x0, acquire
wfi
)",
                     increments);
}

std::string loads(unsigned count) {
  std::string s = "lui s0, 0x100\n";
  for (unsigned i = 0; i < count; ++i) s += fmt::format("lw x{}, {}(s0)\n", 10 + i % 8, 4 * (i % 64));
  s += "lui t1, 0x1a100\nsw x0, 4(t1)\n";
  return s;
}

namespace {

constexpr std::array kRR{"add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and"};
constexpr std::array kRI{"addi", "slti", "sltiu", "xori", "ori", "andi"};
constexpr std::array kShift{"slli", "srli", "srai"};
constexpr std::array kBranch{"beq", "bne", "blt", "bge", "bltu", "bgeu"};
constexpr std::array kLoad{"lw", "lh", "lhu", "lb", "lbu"};
constexpr std::array kStore{"sw", "sh", "sb"};
constexpr std::array kCsrOp{"csrrw", "csrrs", "csrrc"};
constexpr std::array kCsrImm{"csrrwi", "csrrsi", "csrrci"};
constexpr std::array kCsrRw{"mepc", "mcause", "mbadaddr", "mestatus"};
constexpr std::array kCsrRo{"mhartid", "mcpuid", "mimpid", "mirq"};

}  // namespace

std::string random_program(std::mt19937& rng, const RandomOptions& opt) {
  auto pick = [&](auto const& arr) { return arr[std::uniform_int_distribution<std::size_t>(0, arr.size() - 1)(rng)]; };
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  // s0/s1 hold the partition base; everything else is fair game.
  auto dst = [&] {
    int r = uni(1, 29);
    return r >= 8 ? r + 2 : r;
  };
  auto src = [&] { return uni(0, 31); };

  std::string s = R"(csrrs s0, mhartid, x0
slli s0, s0, 8
lui s1, 0x100
add s1, s1, s0
)";
  if (opt.traps) s += "lui x31, 0x2\ncsrrw x0, mtvec, x31\n";

  // Body lines; control transfers keep their offset (in instructions) open
  // until the end so that no target lands on the JALR half of a pair.
  struct Line {
    std::string text;
    int skip = 0;
    bool pair_jalr = false;
    bool pair_auipc = false;
  };
  std::vector<Line> body;
  const int len = uni(1, static_cast<int>(opt.max_len));
  for (int i = 0; i < len; ++i) {
    const int remaining = len - i - 1;
    const int kind = uni(0, 99);
    if (kind < 30) {
      body.push_back({fmt::format("{} x{}, x{}, x{}", pick(kRR), dst(), src(), src())});
    } else if (kind < 45) {
      body.push_back({fmt::format("{} x{}, x{}, {}", pick(kRI), dst(), src(), uni(-2048, 2047))});
    } else if (kind < 50) {
      body.push_back({fmt::format("{} x{}, x{}, {}", pick(kShift), dst(), src(), uni(0, 31))});
    } else if (kind < 54) {
      body.push_back({fmt::format("{} x{}, {:#x}", uni(0, 1) ? "lui" : "auipc", dst(), uni(0, 0xFFFFF))});
    } else if (kind < 64) {
      const char* op = pick(kLoad);
      const int w = op[1] == 'w' ? 4 : op[1] == 'h' ? 2 : 1;
      int off = uni(0, 255 / w) * w;
      if (opt.traps && w > 1 && uni(0, 19) == 0) off += 1;
      body.push_back({fmt::format("{} x{}, {}(s1)", op, dst(), std::min(off, 255))});
    } else if (kind < 72) {
      const char* op = pick(kStore);
      const int w = op[1] == 'w' ? 4 : op[1] == 'h' ? 2 : 1;
      body.push_back({fmt::format("{} x{}, {}(s1)", op, src(), uni(0, 255 / w) * w)});
    } else if (kind < 80) {
      body.push_back({fmt::format("{} x{}, x{}, ", pick(kBranch), src(), src()), uni(1, std::min(remaining + 1, 6))});
    } else if (kind < 83) {
      body.push_back({fmt::format("jal x{}, ", uni(0, 1) ? 0 : dst()), uni(1, std::min(remaining + 1, 6))});
    } else if (kind < 85 && remaining >= 1) {
      // auipc + jalr: the jalr lands 1..5 instructions after itself.
      const int t = dst();
      body.push_back({fmt::format("auipc x{}, 0", t), 0, false, true});
      body.push_back({fmt::format("jalr x{}, x{}, ", uni(0, 1) ? 0 : dst(), t), uni(1, std::min(remaining, 5)), true});
      ++i;
    } else if (kind < 91) {
      const bool ro = uni(0, 3) == 0;
      const char* csr = ro ? pick(kCsrRo) : pick(kCsrRw);
      if (uni(0, 1))
        body.push_back({fmt::format("{} x{}, {}, x{}", pick(kCsrOp), dst(), csr, src())});
      else
        body.push_back({fmt::format("{} x{}, {}, {}", pick(kCsrImm), dst(), csr, uni(0, 31))});
    } else if (kind < 93) {
      body.push_back({"fence iorw, iorw"});
    } else if (kind < 96 && opt.amo) {
      body.push_back({fmt::format("amoswap.w x{}, x{}, (s1)", dst(), src())});
    } else if (opt.traps) {
      switch (uni(0, 2)) {
        case 0: body.push_back({"ecall"}); break;
        case 1: body.push_back({"ebreak"}); break;
        default: body.push_back({".word 0xffffffff"}); break;
      }
    } else {
      body.push_back({"nop"});
    }
  }
  const int n = static_cast<int>(body.size());
  for (int i = 0; i < n; ++i) {
    Line& l = body[static_cast<std::size_t>(i)];
    if (l.skip == 0) {
      s += l.text + "\n";
      continue;
    }
    // Entering a pair at its JALR would jump through a stale register.
    int k = l.skip;
    if (i + k < n && body[static_cast<std::size_t>(i + k)].pair_jalr) ++k;
    if (l.pair_jalr) {
      // "jalr rd, rs, " -> "jalr rd, off(rs)", relative to the AUIPC.
      const auto comma = l.text.rfind(", x");
      const std::string base = l.text.substr(comma + 2, l.text.size() - comma - 4);
      s += fmt::format("{}, {}({})\n", l.text.substr(0, comma), 4 * (k + 1), base);
    } else {
      s += fmt::format("{}{}\n", l.text, 4 * k);
    }
  }
  s += "wfi\n";
  if (opt.traps) {
    s += R"(.org 0x2000
csrrs x31, mepc, x0
addi x31, x31, 4
csrrw x0, mepc, x31
mret
)";
  }
  return s;
}

Memory load(const std::string& source) {
  Memory m;
  m.load(assemble(source));
  return m;
}

Core make_core(const CoreConfig& cfg, const std::string& source) { return Core(cfg, load(source)); }

}  // namespace klessydra::kernels
