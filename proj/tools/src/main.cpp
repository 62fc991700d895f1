// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

#include "ksim/cli.hpp"

using namespace klessydra;

namespace {

void add_run_options(CLI::App& app, cli::RunSpec& spec, std::vector<std::string>& loads,
                     std::vector<std::string>& sources, std::vector<std::string>& irqs) {
  app.add_option("--core", spec.preset, "Core preset: S0, T012, T013, T014, T022, T023, T024, T033, T034");
  app.add_option("--baseline", spec.baseline, "Thread pool baseline B (with --pool-size)");
  app.add_option("--pool-size", spec.pool_size, "Thread pool size S (with --baseline)");
  app.add_option("--threads", spec.threads, "Harts running at boot (default: all)");
  app.add_option("--load", loads, "Flat binary <file>@<addr>");
  app.add_option("--asm", sources, "Assembly source <file>[@<addr>]");
  app.add_option("--irq", irqs, "Interrupt <cycle>:<irq>[:<hart>]");
  app.add_option("--irq-file", spec.irq_file, "Interrupt schedule file");
  app.add_option("--max-cycles", spec.max_cycles, "Cycle budget");
  app.add_option("--cycle-time", spec.cycle_time_ns, "Cycle time in ns for MIPS figures");
  app.add_option("--grant-wait", spec.grant_wait, "Data memory grant wait cycles");
  app.add_option("--valid-wait", spec.valid_wait, "Data memory valid wait cycles");
  app.add_option("--trace", spec.trace_path, "Per-cycle trace file ('-' for stdout)");
  app.add_option("--stats", spec.stats_path, "Statistics JSON file ('-' for stdout)");
  app.add_flag("--oracle", spec.oracle, "Cross-check against the reference interpreter");
}

void finish_spec(cli::RunSpec& spec, const std::vector<std::string>& loads, const std::vector<std::string>& sources,
                 const std::vector<std::string>& irqs) {
  for (const auto& l : loads) {
    if (l.find('@') == std::string::npos) throw cli::UsageError(fmt::format("--load '{}' needs @<addr>", l));
    spec.binaries.push_back(cli::parse_load_spec(l));
  }
  for (const auto& s : sources) spec.sources.push_back(cli::parse_load_spec(s));
  for (const auto& i : irqs) spec.irqs.push_back(parse_irq_spec(i));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-accurate simulator of interleaved multithreaded RV32I cores"};
  app.require_subcommand(1);

  cli::RunSpec run_spec;
  std::vector<std::string> run_loads, run_sources, run_irqs;
  auto* run = app.add_subcommand("run", "Run a program");
  add_run_options(*run, run_spec, run_loads, run_sources, run_irqs);
  run->add_flag("--debug", run_spec.debug, "Start in the interactive debugger");

  cli::RunSpec dbg_spec;
  std::vector<std::string> dbg_loads, dbg_sources, dbg_irqs;
  auto* debug = app.add_subcommand("debug", "Interactive debugger");
  add_run_options(*debug, dbg_spec, dbg_loads, dbg_sources, dbg_irqs);

  std::string asm_in, asm_out;
  std::string asm_base = "0";
  bool asm_symbols = false;
  auto* as = app.add_subcommand("asm", "Assemble to a flat little-endian binary");
  as->add_option("input", asm_in, "Assembly source")->required();
  as->add_option("-o,--output", asm_out, "Output binary")->required();
  as->add_option("--base", asm_base, "Load address of the image");
  as->add_flag("--symbols", asm_symbols, "Print the symbol table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitUsage;
  }

  try {
    if (*run) {
      finish_spec(run_spec, run_loads, run_sources, run_irqs);
      return cli::cmd_run(run_spec, std::cout, std::cerr);
    }
    if (*debug) {
      finish_spec(dbg_spec, dbg_loads, dbg_sources, dbg_irqs);
      return cli::cmd_debug(dbg_spec, std::cin, std::cout, std::cerr);
    }
    if (*as) {
      const auto base = cli::parse_load_spec("x@" + asm_base).addr;
      return cli::cmd_asm(asm_in, base, asm_out, asm_symbols, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  }
  return cli::kExitUsage;
}
