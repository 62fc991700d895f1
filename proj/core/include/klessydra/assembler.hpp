// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "klessydra/types.hpp"

namespace klessydra {

/// A flat, word-aligned memory image produced by the assembler.
struct ProgramImage {
  Addr base = 0;
  std::vector<Word> words;
  std::map<std::string, Addr> symbols;

  Addr end() const { return base + static_cast<Addr>(words.size() * 4); }
  std::vector<std::uint8_t> bytes() const;
};

class AssemblyError : public std::runtime_error {
 public:
  AssemblyError(int line, const std::string& message);
  int line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string message_;
};

/// Two-pass assembler. Source syntax: one instruction or `label:` per line,
/// `#` comments, `.org <addr>` and `.word <value|label>` directives, and the
/// pseudo-instructions nop, mv, li (12-bit), j and ret.
ProgramImage assemble(std::string_view source, Addr base = 0);

/// Accepts x0..x31 and the standard ABI names.
std::optional<unsigned> parse_register(std::string_view token) noexcept;

/// Disassembles every word of an image, one line per word. Words that do not
/// decode are emitted as `.word` directives, so the listing re-assembles to
/// the same image.
std::string disassemble_image(const ProgramImage& image);

}  // namespace klessydra
