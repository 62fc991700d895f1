// SPDX-License-Identifier: Apache-2.0

#include "klessydra/config.hpp"

#include <fmt/format.h>

#include <array>

namespace klessydra {

namespace {

struct Preset {
  std::string_view name;
  Variant variant;
  unsigned baseline;
  unsigned pool_size;
  double cycle_time_ns;
};

// Cycle times of the FPGA implementations.
constexpr std::array<Preset, 9> kPresets{{
    {"S0", Variant::S0, 1, 1, 12.0},
    {"T012", Variant::T0, 1, 2, 12.7},
    {"T013", Variant::T0, 1, 3, 13.9},
    {"T014", Variant::T0, 1, 4, 15.9},
    {"T022", Variant::T0, 2, 2, 8.9},
    {"T023", Variant::T0, 2, 3, 9.7},
    {"T024", Variant::T0, 2, 4, 9.4},
    {"T033", Variant::T0, 3, 3, 7.3},
    {"T034", Variant::T0, 3, 4, 7.4},
}};

constexpr std::array<std::string_view, 9> kPresetNames = [] {
  std::array<std::string_view, 9> a{};
  for (std::size_t i = 0; i < kPresets.size(); ++i) a[i] = kPresets[i].name;
  return a;
}();

}  // namespace

std::string CoreConfig::name() const {
  if (variant == Variant::S0) return "S0";
  if (baseline < 10 && pool_size < 10) return fmt::format("T0{}{}", baseline, pool_size);
  return fmt::format("T0-{}-{}", baseline, pool_size);
}

Word CoreConfig::mcpuid() const {
  return (variant == Variant::S0 ? 1u << 16 : 0u) | (baseline << 8) | pool_size;
}

void CoreConfig::validate() const {
  if (baseline < 1 || baseline > kMaxBaseline)
    throw ConfigError(fmt::format("thread pool baseline {} outside [1, {}]", baseline, kMaxBaseline));
  if (pool_size < baseline || pool_size > kMaxPoolSize)
    throw ConfigError(fmt::format("thread pool size {} outside [{}, {}]", pool_size, baseline, kMaxPoolSize));
  if (active_harts > pool_size)
    throw ConfigError(fmt::format("{} active harts exceed the pool size {}", active_harts, pool_size));
  if (variant == Variant::S0 && (baseline != 1 || pool_size != 1))
    throw ConfigError("S0 is a single-thread core (baseline 1, pool size 1)");
  if (boot_pc % 4 != 0) throw ConfigError(fmt::format("boot pc {:#x} is not word aligned", boot_pc));
  if (cycle_time_ns < 0.0) throw ConfigError("negative cycle time");
}

CoreConfig CoreConfig::preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (p.name != name) continue;
    CoreConfig c;
    c.variant = p.variant;
    c.baseline = p.baseline;
    c.pool_size = p.pool_size;
    c.cycle_time_ns = p.cycle_time_ns;
    return c;
  }
  throw ConfigError(fmt::format("unknown core preset '{}'", name));
}

CoreConfig CoreConfig::custom(unsigned baseline, unsigned pool_size) {
  CoreConfig c;
  c.baseline = baseline;
  c.pool_size = pool_size;
  c.validate();
  return c;
}

std::span<const std::string_view> CoreConfig::preset_names() { return kPresetNames; }

}  // namespace klessydra
