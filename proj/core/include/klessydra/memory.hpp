// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "klessydra/trap.hpp"
#include "klessydra/types.hpp"

namespace klessydra {

struct ProgramImage;

enum class Width : std::uint8_t { Byte = 1, Half = 2, Word = 4 };
enum class AccessKind : std::uint8_t { Read, Write, AmoSwap };
enum class RequestPhase : std::uint8_t { Issued, Granted, Valid };

/// One data-port transaction. The phase only moves forward.
struct MemoryRequest {
  Addr addr = 0;
  Width width = Width::Word;
  bool sign_extend = false;
  AccessKind kind = AccessKind::Read;
  Word wdata = 0;
  RequestPhase phase = RequestPhase::Issued;

  void advance();
};

struct AccessResult {
  Word data = 0;
  std::optional<TrapCause> fault;
  /// Handshake cycles beyond the zero-wait case (grant_wait + valid_wait).
  unsigned latency = 0;

  bool ok() const { return !fault; }
};

class MmioDevice {
 public:
  virtual ~MmioDevice() = default;
  virtual Word read(Addr offset, Width width) = 0;
  virtual void write(Addr offset, Width width, Word value) = 0;
  virtual std::unique_ptr<MmioDevice> clone() const = 0;
};

/// Byte sink: each store appends its low byte to the captured output.
class ConsoleDevice final : public MmioDevice {
 public:
  Word read(Addr, Width) override { return 0; }
  void write(Addr offset, Width width, Word value) override;
  std::unique_ptr<MmioDevice> clone() const override;

  const std::string& output() const { return output_; }
  void set_echo(std::ostream* echo) { echo_ = echo; }

 private:
  std::string output_;
  std::ostream* echo_ = nullptr;
};

/// Any store ends the simulation with the stored value as exit code.
class ExitDevice final : public MmioDevice {
 public:
  Word read(Addr, Width) override { return 0; }
  void write(Addr, Width, Word value) override { code_ = value; }
  std::unique_ptr<MmioDevice> clone() const override { return std::make_unique<ExitDevice>(*this); }

  std::optional<Word> code() const { return code_; }
  void clear() { code_.reset(); }

 private:
  std::optional<Word> code_;
};

struct Segment {
  Addr base = 0;
  Addr size = 0;

  bool contains(Addr a, Addr len = 1) const {
    return a >= base && len <= size && a - base <= size - len;
  }
};

inline constexpr Addr kConsoleAddr = 0x1A10'0000;
inline constexpr Addr kExitAddr = 0x1A10'0004;

struct MemoryMap {
  Segment instr{0x0000'0000, 64 * 1024};
  Segment data{0x0010'0000, 64 * 1024};
};

struct MemoryTiming {
  unsigned grant_wait = 0;
  unsigned valid_wait = 0;
};

/// Little-endian memory with an instruction and a data segment sharing one
/// address space, plus registered MMIO ranges. Copying a Memory deep-copies
/// contents and devices.
class Memory {
 public:
  explicit Memory(MemoryMap map = {}, MemoryTiming timing = {});
  Memory(const Memory& other);
  Memory& operator=(const Memory& other);
  Memory(Memory&&) noexcept = default;
  Memory& operator=(Memory&&) noexcept = default;

  /// Routes [base, base+size) to the device. Throws std::invalid_argument on
  /// overlap with RAM or another device.
  void register_mmio(Addr base, Addr size, std::unique_ptr<MmioDevice> device);

  AccessResult access(const MemoryRequest& req);
  AccessResult read(Addr addr, Width width, bool sign_extend);
  AccessResult write(Addr addr, Width width, Word value);
  /// Returns the old word and stores the new one in one step.
  AccessResult amoswap(Addr addr, Word value);
  AccessResult fetch(Addr addr) const;

  /// Checks alignment and mapping without touching contents.
  std::optional<TrapCause> check(Addr addr, Width width, AccessKind kind) const;
  /// Extra handshake cycles an access at `addr` would cost.
  unsigned latency(Addr addr) const;

  void load(const ProgramImage& image);
  void load_binary(std::span<const std::uint8_t> bytes, Addr addr);

  /// Debug access to RAM bytes; no device side effects.
  std::optional<std::uint8_t> peek(Addr addr) const;
  bool poke(Addr addr, std::uint8_t value);

  const MemoryMap& map() const { return map_; }
  const MemoryTiming& timing() const { return timing_; }
  void set_timing(MemoryTiming t) { timing_ = t; }

  std::span<const std::uint8_t> data_bytes() const { return data_; }
  std::span<const std::uint8_t> instr_bytes() const { return instr_; }

  ConsoleDevice& console() { return *console_; }
  const ConsoleDevice& console() const { return *console_; }
  std::optional<Word> exit_code() const { return exit_->code(); }
  void clear_exit() { exit_->clear(); }

 private:
  struct MmioRange {
    Addr base;
    Addr size;
    std::unique_ptr<MmioDevice> device;
  };

  std::uint8_t* ram(Addr addr, Addr len);
  const std::uint8_t* ram(Addr addr, Addr len) const;
  MmioRange* mmio(Addr addr, Addr len);
  void bind_builtin();

  MemoryMap map_;
  MemoryTiming timing_;
  std::vector<std::uint8_t> instr_;
  std::vector<std::uint8_t> data_;
  std::vector<MmioRange> mmio_;
  ConsoleDevice* console_ = nullptr;
  ExitDevice* exit_ = nullptr;
};

}  // namespace klessydra
