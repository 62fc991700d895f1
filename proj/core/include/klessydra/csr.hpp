// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "klessydra/types.hpp"

namespace klessydra {

/// CSR addresses. Standard machine-mode numbers where one exists; the
/// Pulpino-style extensions (PCER, MESTATUS, MIRQ, MCPUID, MIMPID) sit in the
/// custom ranges.
enum class Csr : std::uint16_t {
  MSTATUS = 0x300,
  MHPMEVENT = 0x323,
  MTVEC = 0x305,
  MEPC = 0x341,
  MCAUSE = 0x342,
  MBADADDR = 0x343,
  MIP = 0x344,
  MESTATUS = 0x7C0,
  PCER = 0x7E0,
  MHPMCOUNTER = 0xB03,
  MCPUID = 0xF00,
  MIMPID = 0xF01,
  MHARTID = 0xF14,
  MIRQ = 0xFC0,
};

constexpr unsigned csr_addr(Csr c) { return static_cast<unsigned>(c); }

// MSTATUS carries a single machine interrupt-enable bit.
inline constexpr Word kMstatusMie = 1u << 3;
// MIP machine external interrupt pending.
inline constexpr Word kMipMeip = 1u << 11;

inline constexpr Word kMimpidValue = 0x0000'0001;

}  // namespace klessydra
