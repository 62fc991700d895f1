// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "klessydra/types.hpp"

namespace klessydra {

/// Standard machine-mode cause numbers.
namespace cause {
inline constexpr std::uint32_t kInstrMisaligned = 0;
inline constexpr std::uint32_t kInstrAccessFault = 1;
inline constexpr std::uint32_t kIllegalInstr = 2;
inline constexpr std::uint32_t kBreakpoint = 3;
inline constexpr std::uint32_t kLoadMisaligned = 4;
inline constexpr std::uint32_t kLoadAccessFault = 5;
inline constexpr std::uint32_t kStoreMisaligned = 6;
inline constexpr std::uint32_t kStoreAccessFault = 7;
inline constexpr std::uint32_t kEcallM = 11;
inline constexpr std::uint32_t kMachineExternalIrq = 11;
}  // namespace cause

/// A trap event. `tval` is the faulting address for misaligned/access-fault
/// causes and the external interrupt number for interrupts.
struct TrapCause {
  bool is_interrupt = false;
  std::uint32_t code = 0;
  Word tval = 0;

  static TrapCause exception(std::uint32_t code, Word tval = 0) { return {false, code, tval}; }
  static TrapCause external_irq(unsigned irq) { return {true, cause::kMachineExternalIrq, irq}; }

  /// MCAUSE encoding: interrupt flag in bit 31.
  Word mcause() const { return (is_interrupt ? 0x8000'0000u : 0u) | code; }
  /// Whether tval is an address that belongs in MBADADDR.
  bool carries_address() const;

  friend bool operator==(const TrapCause&, const TrapCause&) = default;
};

std::string describe(const TrapCause& cause);

}  // namespace klessydra
