// SPDX-License-Identifier: Apache-2.0

#include "klessydra/trace.hpp"

#include <fmt/format.h>

#include <charconv>
#include <sstream>

namespace klessydra {

namespace {

std::string stage_text(const StageView& v) {
  switch (v.kind) {
    case LatchKind::Empty: return "-";
    case LatchKind::Void: return "void";
    case LatchKind::Squashed: return fmt::format("x{}", v.harc);
    case LatchKind::Valid: return fmt::format("h{}@{:08x}", v.harc, v.pc);
  }
  return "?";
}

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
  T value{};
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, base);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(fmt::format("bad {} '{}'", what, s));
  return value;
}

}  // namespace

std::string format_trace_line(const CycleReport& r) {
  std::string line = fmt::format("{:>8} r{:<5} {:<15}", r.cycle, r.round, state_name(r.state));
  for (unsigned s = 0; s < r.depth; ++s) line += fmt::format(" {:<14}", stage_text(r.stages[s]));
  line += fmt::format(" {:<11}", slot_name(r.slot));
  if (r.retired) {
    const auto d = decode(r.retire_raw);
    line += fmt::format(" h{} {:08x} {}", r.retire_harc, r.retire_pc,
                        d ? disassemble(*d) : fmt::format(".word {:#010x}", r.retire_raw));
  }
  if (r.flushed) line += fmt::format(" flush={}", r.flushed);
  if (r.trap) line += fmt::format(" trap=h{}:{}", r.trap_harc, describe(*r.trap));
  if (r.hazard) line += " hazard";
  if (r.woke) line += fmt::format(" wake={:#x}", r.woke);
  if (r.exited) line += " exit";
  return line;
}

IrqEvent parse_irq_spec(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3)
    throw ParseError(fmt::format("interrupt spec '{}' is not <cycle>:<irq>[:<hart>]", text));
  IrqEvent e;
  e.cycle = parse_number<std::uint64_t>(parts[0], "cycle");
  e.irq = parse_number<unsigned>(parts[1], "interrupt number");
  if (parts.size() == 3) e.hart = parse_number<unsigned>(parts[2], "hart");
  return e;
}

std::vector<IrqEvent> parse_irq_schedule(std::string_view text) {
  std::vector<IrqEvent> out;
  std::istringstream in{std::string(text)};
  std::string line;
  unsigned lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < 2 || tok.size() > 3)
      throw ParseError(fmt::format("line {}: expected <cycle> <irq> [<hart>]", lineno));
    try {
      IrqEvent e;
      e.cycle = parse_number<std::uint64_t>(tok[0], "cycle");
      e.irq = parse_number<unsigned>(tok[1], "interrupt number");
      if (tok.size() == 3) e.hart = parse_number<unsigned>(tok[2], "hart");
      out.push_back(e);
    } catch (const ParseError& err) {
      throw ParseError(fmt::format("line {}: {}", lineno, err.what()));
    }
  }
  return out;
}

}  // namespace klessydra
