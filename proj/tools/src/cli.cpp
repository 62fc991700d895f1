// SPDX-License-Identifier: Apache-2.0

#include "ksim/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "klessydra/assembler.hpp"
#include "klessydra/perf.hpp"
#include "klessydra/reference.hpp"

namespace klessydra::cli {

namespace {

std::optional<std::uint64_t> parse_u64(std::string_view s) {
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

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError(fmt::format("cannot open '{}'", path));
  return {std::istreambuf_iterator<char>(f), {}};
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  const std::string s = read_text(path);
  return {s.begin(), s.end()};
}

bool full_compare(const CoreConfig& cfg, StopReason a, StopReason b) {
  return (a == StopReason::Quiescent && b == StopReason::Quiescent) || cfg.booted_harts() == 1;
}

}  // namespace

LoadSpec parse_load_spec(std::string_view text, Addr default_addr) {
  LoadSpec l;
  const auto at = text.rfind('@');
  if (at == std::string_view::npos) {
    l.path = std::string(text);
    l.addr = default_addr;
    return l;
  }
  l.path = std::string(text.substr(0, at));
  const auto addr = parse_u64(text.substr(at + 1));
  if (l.path.empty() || !addr || *addr > 0xFFFF'FFFFull)
    throw UsageError(fmt::format("'{}' is not <file>@<addr>", text));
  l.addr = static_cast<Addr>(*addr);
  return l;
}

CoreConfig build_config(const RunSpec& spec) {
  CoreConfig cfg;
  if (spec.baseline || spec.pool_size) {
    if (!spec.baseline || !spec.pool_size) throw UsageError("--baseline and --pool-size go together");
    cfg = CoreConfig::custom(*spec.baseline, *spec.pool_size);
  } else {
    cfg = CoreConfig::preset(spec.preset);
  }
  cfg.active_harts = spec.threads;
  if (spec.cycle_time_ns) cfg.cycle_time_ns = *spec.cycle_time_ns;
  if (spec.grant_wait) cfg.grant_wait = *spec.grant_wait;
  if (spec.valid_wait) cfg.valid_wait = *spec.valid_wait;
  cfg.validate();
  return cfg;
}

Memory build_memory(const RunSpec& spec) {
  if (spec.binaries.empty() && spec.sources.empty()) throw UsageError("no program image given (--asm or --load)");
  Memory mem;
  for (const auto& s : spec.sources) mem.load(assemble(read_text(s.path), s.addr));
  for (const auto& b : spec.binaries) mem.load_binary(read_bytes(b.path), b.addr);
  return mem;
}

Core build_core(const RunSpec& spec) {
  const CoreConfig cfg = build_config(spec);
  Core core(cfg, build_memory(spec));
  std::vector<IrqEvent> irqs = spec.irqs;
  if (spec.irq_file) {
    const auto more = parse_irq_schedule(read_text(*spec.irq_file));
    irqs.insert(irqs.end(), more.begin(), more.end());
  }
  for (const auto& e : irqs) {
    if (e.hart >= cfg.pool_size)
      throw UsageError(fmt::format("interrupt targets hart {} outside the pool of {}", e.hart, cfg.pool_size));
    core.schedule_interrupt(e.cycle, e.irq, e.hart);
  }
  return core;
}

int exit_status(const RunResult& r) {
  switch (r.reason) {
    case StopReason::Exit: return static_cast<int>(r.exit_code.value_or(0) & 0xFF);
    case StopReason::Quiescent:
    case StopReason::DebugHalt: return 0;
    case StopReason::MaxCycles: return kExitMaxCycles;
    case StopReason::TrapLoop: return kExitTrapLoop;
  }
  return kExitUsage;
}

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  std::optional<Core> core;
  Memory initial;
  try {
    if (spec.oracle && (!spec.irqs.empty() || spec.irq_file))
      throw UsageError("--oracle cannot be combined with an interrupt schedule");
    core.emplace(build_core(spec));
    initial = core->memory();
  } catch (const AssemblyError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }

  std::ofstream trace_file;
  std::ostream* trace = nullptr;
  if (spec.trace_path) {
    if (*spec.trace_path == "-") {
      trace = &out;
    } else {
      trace_file.open(*spec.trace_path);
      if (!trace_file) {
        fmt::print(err, "error: cannot write '{}'\n", *spec.trace_path);
        return kExitUsage;
      }
      trace = &trace_file;
    }
    core->set_trace([trace](const CycleReport& r) { *trace << format_trace_line(r) << '\n'; });
  }

  if (spec.debug) {
    DebugSession session(*core, out, spec.max_cycles);
    core->halt();
    session.repl(std::cin);
    if (!core->finished()) return 0;
  }

  const RunResult r = spec.debug ? core->run(0) : core->run(spec.max_cycles);
  int status = exit_status(r);

  switch (r.reason) {
    case StopReason::MaxCycles: fmt::print(err, "stopped: max cycles ({}) reached\n", spec.max_cycles); break;
    case StopReason::TrapLoop:
      fmt::print(err, "stopped: trap loop on hart {} at pc {:#010x} ({})\n", r.loop_hart, r.loop_pc,
                 r.loop_cause ? describe(*r.loop_cause) : "?");
      break;
    default: break;
  }

  auto doc = stats_document(core->config(), core->counters());
  doc["stop_reason"] = std::string(stop_name(r.reason));
  doc["exit_code"] = r.exit_code ? nlohmann::ordered_json(*r.exit_code) : nlohmann::ordered_json(nullptr);

  if (spec.oracle) {
    const auto ref = run_reference(core->config(), initial, spec.max_cycles);
    std::vector<std::string> diffs;
    if (ref.run.reason != r.reason) {
      diffs.push_back(fmt::format("stop reason {} vs reference {}", stop_name(r.reason), stop_name(ref.run.reason)));
    } else if (full_compare(core->config(), r.reason, ref.run.reason)) {
      diffs = compare_states(core->harts(), core->memory(), ref.harts, ref.memory);
    } else {
      if (r.exit_code != ref.run.exit_code) diffs.push_back("exit codes differ");
      if (core->memory().console().output() != ref.memory.console().output())
        diffs.push_back("console output differs");
    }
    doc["oracle"] = diffs.empty() ? "match" : "mismatch";
    for (const auto& d : diffs) fmt::print(err, "oracle: {}\n", d);
    if (!diffs.empty()) status = kExitOracleMismatch;
  }

  if (spec.stats_path) {
    const std::string text = doc.dump(2) + "\n";
    if (*spec.stats_path == "-") {
      out << text;
    } else {
      std::ofstream f(*spec.stats_path);
      if (!f) {
        fmt::print(err, "error: cannot write '{}'\n", *spec.stats_path);
        return kExitUsage;
      }
      f << text;
    }
  }
  out << core->memory().console().output();
  out.flush();
  return status;
}

int cmd_asm(const std::string& input, Addr base, const std::string& output, bool symbols, std::ostream& out,
            std::ostream& err) {
  try {
    const ProgramImage img = assemble(read_text(input), base);
    const auto bytes = img.bytes();
    std::ofstream f(output, std::ios::binary);
    if (!f) throw UsageError(fmt::format("cannot write '{}'", output));
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (symbols)
      for (const auto& [name, addr] : img.symbols) fmt::print(out, "{:08x} {}\n", addr, name);
    return 0;
  } catch (const std::exception& e) {
    fmt::print(err, "{}: {}\n", input, e.what());
    return kExitUsage;
  }
}

int cmd_debug(const RunSpec& spec, std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    Core core = build_core(spec);
    DebugSession session(core, out, spec.max_cycles);
    core.halt();
    session.repl(in);
    return core.finished() ? exit_status(core.run(0)) : 0;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }
}

}  // namespace klessydra::cli
