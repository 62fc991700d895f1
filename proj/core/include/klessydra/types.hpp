// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace klessydra {

using Word = std::uint32_t;
using SWord = std::int32_t;
using Addr = std::uint32_t;

inline constexpr unsigned kNumRegs = 32;

}  // namespace klessydra
