// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "klessydra/config.hpp"
#include "klessydra/memory.hpp"
#include "klessydra/pipeline.hpp"
#include "klessydra/trace.hpp"

namespace klessydra::cli {

/// Process exit statuses other than the guest's own exit code.
inline constexpr int kExitUsage = 2;
inline constexpr int kExitMaxCycles = 200;
inline constexpr int kExitTrapLoop = 201;
inline constexpr int kExitOracleMismatch = 202;

struct LoadSpec {
  std::string path;
  Addr addr = 0;
};

struct RunSpec {
  std::string preset = "T023";
  std::optional<unsigned> baseline;
  std::optional<unsigned> pool_size;
  /// Harts running at boot; 0 means the whole pool.
  unsigned threads = 0;
  std::vector<LoadSpec> binaries;
  std::vector<LoadSpec> sources;
  std::vector<IrqEvent> irqs;
  std::optional<std::string> irq_file;
  std::uint64_t max_cycles = 10'000'000;
  std::optional<double> cycle_time_ns;
  std::optional<unsigned> grant_wait;
  std::optional<unsigned> valid_wait;
  std::optional<std::string> trace_path;
  std::optional<std::string> stats_path;
  bool oracle = false;
  bool debug = false;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "<file>@<addr>"; the address defaults to `default_addr` when omitted.
LoadSpec parse_load_spec(std::string_view text, Addr default_addr = 0);

CoreConfig build_config(const RunSpec& spec);
/// Assembles and loads every image. Throws AssemblyError, UsageError or
/// std::out_of_range.
Memory build_memory(const RunSpec& spec);
/// Builds the core, loads images and posts the interrupt schedule.
Core build_core(const RunSpec& spec);

int exit_status(const RunResult& r);

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_asm(const std::string& input, Addr base, const std::string& output, bool symbols, std::ostream& out,
            std::ostream& err);
int cmd_debug(const RunSpec& spec, std::istream& in, std::ostream& out, std::ostream& err);

/// Line-oriented debugger front end over a Core's debug unit.
class DebugSession {
 public:
  DebugSession(Core& core, std::ostream& out, std::uint64_t max_cycles = 10'000'000);

  /// Runs one command. Returns false after `quit`.
  bool execute(std::string_view line);
  /// Reads commands until `quit` or end of input.
  void repl(std::istream& in, bool prompt = true);

  bool tracing() const { return tracing_; }

 private:
  void help();
  void cmd_step(unsigned n);
  void cmd_continue();
  void cmd_regs(unsigned hart);
  void cmd_csr(unsigned hart);
  void cmd_mem(Addr addr, std::size_t len);
  void report_stop(const RunResult& r);

  Core& core_;
  std::ostream& out_;
  std::uint64_t max_cycles_;
  bool tracing_ = false;
};

}  // namespace klessydra::cli
