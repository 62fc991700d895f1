// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "klessydra/types.hpp"

namespace klessydra {

enum class Variant : std::uint8_t { S0, T0 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr unsigned kMaxBaseline = 7;
inline constexpr unsigned kMaxPoolSize = 16;

/// Core parameters. `baseline` is the minimum number of active harts for
/// stall-free operation and fixes the pipeline depth at baseline + 1;
/// `pool_size` is the number of hardware threads.
struct CoreConfig {
  Variant variant = Variant::T0;
  unsigned baseline = 2;
  unsigned pool_size = 3;
  /// Harts [active_harts, pool_size) boot parked in WFI. 0 means all.
  unsigned active_harts = 0;
  unsigned grant_wait = 0;
  unsigned valid_wait = 0;
  unsigned csr_extra_wait = 1;
  /// Extra cycles per instruction fetch beyond the single-cycle access.
  unsigned fetch_wait = 0;
  Addr boot_pc = 0;
  /// Report-only multiplier for MIPS figures.
  double cycle_time_ns = 0.0;
  /// Test knob: disabling void-slot padding exposes data hazards.
  bool pad_void_slots = true;

  unsigned depth() const { return baseline + 1; }
  unsigned booted_harts() const { return active_harts == 0 ? pool_size : active_harts; }
  bool amo_enabled() const { return variant != Variant::S0; }
  std::string name() const;
  /// MCPUID: bit 16 set for S0, baseline in bits 15:8, pool size in 7:0.
  Word mcpuid() const;

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;

  /// S0, T012, T013, T014, T022, T023, T024, T033, T034.
  static CoreConfig preset(std::string_view name);
  static CoreConfig custom(unsigned baseline, unsigned pool_size);
  static std::span<const std::string_view> preset_names();
};

}  // namespace klessydra
