// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "klessydra/pipeline.hpp"

namespace klessydra {

/// One text line per cycle: index, round, FSM state, fetch, stage
/// occupancy, last-stage outcome and events.
std::string format_trace_line(const CycleReport& r);

struct IrqEvent {
  std::uint64_t cycle = 0;
  unsigned irq = 0;
  unsigned hart = 0;

  friend bool operator==(const IrqEvent&, const IrqEvent&) = default;
};

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "<cycle>:<irq>[:<hart>]"
IrqEvent parse_irq_spec(std::string_view text);
/// One "<cycle> <irq> [<hart>]" triple per line; '#' starts a comment.
std::vector<IrqEvent> parse_irq_schedule(std::string_view text);

}  // namespace klessydra
