// SPDX-License-Identifier: Apache-2.0

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <charconv>
#include <istream>
#include <sstream>

#include "klessydra/isa.hpp"
#include "klessydra/trace.hpp"
#include "ksim/cli.hpp"

namespace klessydra::cli {

namespace {

constexpr std::string_view kAbi[32] = {"zero", "ra", "sp", "gp", "tp", "t0", "t1", "t2", "s0", "s1", "a0",
                                       "a1",   "a2", "a3", "a4", "a5", "a6", "a7", "s2", "s3", "s4", "s5",
                                       "s6",   "s7", "s8", "s9", "s10", "s11", "t3", "t4", "t5", "t6"};

std::optional<std::uint64_t> number(std::string_view s) {
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string disasm(Word raw) {
  const auto d = decode(raw);
  return d ? disassemble(*d) : fmt::format(".word {:#010x}", raw);
}

}  // namespace

DebugSession::DebugSession(Core& core, std::ostream& out, std::uint64_t max_cycles)
    : core_(core), out_(out), max_cycles_(max_cycles) {}

void DebugSession::help() {
  out_ << "commands:\n"
          "  step [n]          execute n instructions (default 1)\n"
          "  continue | resume run until exit, breakpoint or max cycles\n"
          "  halt              stop fetching and drain the pipeline\n"
          "  regs [hart]       registers and pc\n"
          "  csr [hart]        control and status registers\n"
          "  mem <addr> <len>  hex dump\n"
          "  break <addr>      set a breakpoint\n"
          "  del <addr>        delete a breakpoint\n"
          "  trace on|off      per-cycle trace\n"
          "  quit\n";
}

void DebugSession::report_stop(const RunResult& r) {
  switch (r.reason) {
    case StopReason::DebugHalt: {
      fmt::print(out_, "halted at cycle {}\n", core_.cycle());
      break;
    }
    case StopReason::Exit: fmt::print(out_, "exit {} at cycle {}\n", r.exit_code.value_or(0), r.cycles); break;
    case StopReason::Quiescent: fmt::print(out_, "all harts asleep at cycle {}\n", r.cycles); break;
    case StopReason::MaxCycles: fmt::print(out_, "max cycles reached at cycle {}\n", r.cycles); break;
    case StopReason::TrapLoop:
      fmt::print(out_, "trap loop on hart {} at {:#010x}\n", r.loop_hart, r.loop_pc);
      break;
  }
}

void DebugSession::cmd_step(unsigned n) {
  for (unsigned i = 0; i < n; ++i) {
    if (core_.finished()) {
      out_ << "the program has finished\n";
      return;
    }
    if (!core_.halted()) core_.halt();
    if (!core_.halted()) {
      core_.run(max_cycles_);
      if (!core_.halted()) {
        out_ << "the core did not halt\n";
        return;
      }
    }
    const StepResult s = core_.debug_step();
    if (s.retired)
      fmt::print(out_, "h{} {:08x} {}\n", s.harc, s.pc, disasm(s.raw));
    else if (s.trap)
      fmt::print(out_, "h{} {:08x} trap: {}\n", s.harc, s.pc, describe(*s.trap));
    else
      out_ << "no instruction issued\n";
  }
}

void DebugSession::cmd_continue() {
  if (core_.finished()) {
    out_ << "the program has finished\n";
    return;
  }
  if (core_.halted()) core_.resume();
  report_stop(core_.run(max_cycles_));
}

void DebugSession::cmd_regs(unsigned hart) {
  for (unsigned r = 0; r < kNumRegs; ++r) {
    fmt::print(out_, "x{:<2} {:<4} {:08x}{}", r, kAbi[r], core_.read_reg(hart, r), r % 4 == 3 ? "\n" : "   ");
  }
  fmt::print(out_, "pc      {:08x}\n", core_.read_pc(hart));
}

void DebugSession::cmd_csr(unsigned hart) {
  for (unsigned addr = 0; addr < 0x1000; ++addr) {
    if (!CsrFile::implemented(addr)) continue;
    fmt::print(out_, "{:<12} {:#05x} {:08x}\n", csr_name(addr), addr, *core_.read_csr(hart, addr));
  }
}

void DebugSession::cmd_mem(Addr addr, std::size_t len) {
  const auto bytes = core_.read_mem(addr, len);
  for (std::size_t i = 0; i < bytes.size(); i += 16) {
    std::string line = fmt::format("{:08x}:", addr + static_cast<Addr>(i));
    for (std::size_t j = i; j < std::min(bytes.size(), i + 16); ++j) line += fmt::format(" {:02x}", bytes[j]);
    out_ << line << '\n';
  }
}

bool DebugSession::execute(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<std::string> tok;
  for (std::string t; in >> t;) tok.push_back(t);
  if (tok.empty()) return true;
  const std::string& cmd = tok[0];
  const unsigned harts = core_.config().pool_size;
  auto arg = [&](std::size_t i) { return i < tok.size() ? number(tok[i]) : std::nullopt; };
  auto hart_arg = [&]() -> std::optional<unsigned> {
    if (tok.size() < 2) return 0u;
    const auto h = arg(1);
    if (!h || *h >= harts) return std::nullopt;
    return static_cast<unsigned>(*h);
  };

  try {
    if (cmd == "quit" || cmd == "q" || cmd == "exit") return false;
    if (cmd == "help" || cmd == "?") {
      help();
    } else if (cmd == "step" || cmd == "s") {
      const auto n = tok.size() > 1 ? arg(1) : std::optional<std::uint64_t>(1);
      if (!n || tok.size() > 2 || *n == 0) return help(), true;
      cmd_step(static_cast<unsigned>(*n));
    } else if ((cmd == "continue" || cmd == "c" || cmd == "resume") && tok.size() == 1) {
      cmd_continue();
    } else if (cmd == "halt" && tok.size() == 1) {
      if (core_.finished()) {
        out_ << "the program has finished\n";
      } else {
        core_.halt();
        if (!core_.halted()) core_.run(max_cycles_);
        fmt::print(out_, "halted at cycle {}\n", core_.cycle());
      }
    } else if (cmd == "regs" && tok.size() <= 2) {
      const auto h = hart_arg();
      if (!h) return help(), true;
      cmd_regs(*h);
    } else if (cmd == "csr" && tok.size() <= 2) {
      const auto h = hart_arg();
      if (!h) return help(), true;
      cmd_csr(*h);
    } else if (cmd == "mem" && tok.size() == 3) {
      const auto a = arg(1);
      const auto n = arg(2);
      if (!a || !n || *a > 0xFFFF'FFFFull || *n > 1u << 20) return help(), true;
      cmd_mem(static_cast<Addr>(*a), static_cast<std::size_t>(*n));
    } else if ((cmd == "break" || cmd == "b") && tok.size() == 2) {
      const auto a = arg(1);
      if (!a || *a > 0xFFFF'FFFFull) return help(), true;
      core_.add_breakpoint(static_cast<Addr>(*a));
      fmt::print(out_, "breakpoint at {:#010x}\n", *a);
    } else if (cmd == "del" && tok.size() == 2) {
      const auto a = arg(1);
      if (!a || !core_.remove_breakpoint(static_cast<Addr>(*a))) {
        out_ << "no such breakpoint\n";
        return true;
      }
      fmt::print(out_, "deleted {:#010x}\n", *a);
    } else if (cmd == "trace" && tok.size() == 2 && (tok[1] == "on" || tok[1] == "off")) {
      tracing_ = tok[1] == "on";
      if (tracing_)
        core_.set_trace([this](const CycleReport& r) { out_ << format_trace_line(r) << '\n'; });
      else
        core_.set_trace(nullptr);
    } else {
      help();
    }
  } catch (const std::exception& e) {
    fmt::print(out_, "error: {}\n", e.what());
  }
  return true;
}

void DebugSession::repl(std::istream& in, bool prompt) {
  std::string line;
  for (;;) {
    if (prompt) out_ << "(ksim) " << std::flush;
    if (!std::getline(in, line)) break;
    if (!execute(line)) break;
  }
}

}  // namespace klessydra::cli
