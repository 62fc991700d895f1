// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "klessydra/config.hpp"
#include "klessydra/memory.hpp"
#include "klessydra/pipeline.hpp"

namespace klessydra::kernels {

/// `n` instructions per hart: n - 1 independent ADDIs, then WFI.
std::string straight_line(unsigned n);

/// Counted loop: `body` ADDIs, a decrement and a backward BNE per iteration,
/// then WFI. Each hart takes iterations - 1 branches.
std::string loop(unsigned iterations, unsigned body);

/// Spin lock on an AMOSWAP.W word at 0x100000 guarding a counter at 0x100004.
std::string lock(unsigned increments);
inline constexpr Addr kLockAddr = 0x0010'0000;
inline constexpr Addr kCounterAddr = 0x0010'0004;

/// `count` loads from the data segment, then a store to the exit device.
std::string loads(unsigned count);

struct RandomOptions {
  unsigned max_len = 200;
  bool amo = true;
  bool traps = true;
};

/// Race-free random program. Each hart works in its own 256-byte data
/// partition derived from MHARTID; control flow only moves forward; traps
/// go to a handler that skips the faulting instruction. Ends in WFI.
std::string random_program(std::mt19937& rng, const RandomOptions& opt = {});

Memory load(const std::string& source);
Core make_core(const CoreConfig& cfg, const std::string& source);

}  // namespace klessydra::kernels
