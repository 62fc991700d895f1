// SPDX-License-Identifier: Apache-2.0

#include "klessydra/memory.hpp"

#include <fmt/format.h>

#include <ostream>
#include <stdexcept>

#include "klessydra/assembler.hpp"

namespace klessydra {

namespace {

bool overlaps(Addr a, Addr alen, Addr b, Addr blen) {
  const std::uint64_t a0 = a, a1 = std::uint64_t{a} + alen;
  const std::uint64_t b0 = b, b1 = std::uint64_t{b} + blen;
  return a0 < b1 && b0 < a1;
}

}  // namespace

void MemoryRequest::advance() {
  switch (phase) {
    case RequestPhase::Issued: phase = RequestPhase::Granted; break;
    case RequestPhase::Granted: phase = RequestPhase::Valid; break;
    case RequestPhase::Valid: throw std::logic_error("memory request already valid");
  }
}

void ConsoleDevice::write(Addr, Width, Word value) {
  const char c = static_cast<char>(value & 0xFF);
  output_.push_back(c);
  if (echo_) echo_->put(c).flush();
}

std::unique_ptr<MmioDevice> ConsoleDevice::clone() const {
  auto c = std::make_unique<ConsoleDevice>();
  c->output_ = output_;
  return c;
}

Memory::Memory(MemoryMap map, MemoryTiming timing) : map_(map), timing_(timing) {
  for (const Segment* s : {&map_.instr, &map_.data})
    if (s->base % 4 != 0 || s->size % 4 != 0)
      throw std::invalid_argument(fmt::format("segment at {:#x} is not word aligned", s->base));
  if (overlaps(map_.instr.base, map_.instr.size, map_.data.base, map_.data.size))
    throw std::invalid_argument("instruction and data segments overlap");
  instr_.assign(map_.instr.size, 0);
  data_.assign(map_.data.size, 0);
  bind_builtin();
}

void Memory::bind_builtin() {
  auto console = std::make_unique<ConsoleDevice>();
  auto exit = std::make_unique<ExitDevice>();
  console_ = console.get();
  exit_ = exit.get();
  register_mmio(kConsoleAddr, 4, std::move(console));
  register_mmio(kExitAddr, 4, std::move(exit));
}

Memory::Memory(const Memory& other)
    : map_(other.map_), timing_(other.timing_), instr_(other.instr_), data_(other.data_) {
  for (const auto& r : other.mmio_) mmio_.push_back(MmioRange{r.base, r.size, r.device->clone()});
  // Built-in devices are always the first two ranges.
  console_ = static_cast<ConsoleDevice*>(mmio_[0].device.get());
  exit_ = static_cast<ExitDevice*>(mmio_[1].device.get());
}

Memory& Memory::operator=(const Memory& other) {
  if (this != &other) {
    Memory copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Memory::register_mmio(Addr base, Addr size, std::unique_ptr<MmioDevice> device) {
  if (size == 0 || !device) throw std::invalid_argument("empty mmio registration");
  if (overlaps(base, size, map_.instr.base, map_.instr.size) ||
      overlaps(base, size, map_.data.base, map_.data.size))
    throw std::invalid_argument(fmt::format("mmio range {:#x}+{:#x} overlaps RAM", base, size));
  for (const auto& r : mmio_)
    if (overlaps(base, size, r.base, r.size))
      throw std::invalid_argument(fmt::format("mmio range {:#x}+{:#x} overlaps device at {:#x}", base, size, r.base));
  mmio_.push_back(MmioRange{base, size, std::move(device)});
}

std::uint8_t* Memory::ram(Addr addr, Addr len) {
  if (map_.instr.contains(addr, len)) return instr_.data() + (addr - map_.instr.base);
  if (map_.data.contains(addr, len)) return data_.data() + (addr - map_.data.base);
  return nullptr;
}

const std::uint8_t* Memory::ram(Addr addr, Addr len) const {
  return const_cast<Memory*>(this)->ram(addr, len);
}

Memory::MmioRange* Memory::mmio(Addr addr, Addr len) {
  for (auto& r : mmio_)
    if (Segment{r.base, r.size}.contains(addr, len)) return &r;
  return nullptr;
}

std::optional<TrapCause> Memory::check(Addr addr, Width width, AccessKind kind) const {
  const Addr len = static_cast<Addr>(width);
  const bool load = kind == AccessKind::Read;
  if (addr % len != 0)
    return TrapCause::exception(load ? cause::kLoadMisaligned : cause::kStoreMisaligned, addr);
  if (ram(addr, len)) return std::nullopt;
  if (kind != AccessKind::AmoSwap && const_cast<Memory*>(this)->mmio(addr, len)) return std::nullopt;
  return TrapCause::exception(load ? cause::kLoadAccessFault : cause::kStoreAccessFault, addr);
}

unsigned Memory::latency(Addr addr) const {
  return ram(addr, 1) ? timing_.grant_wait + timing_.valid_wait : 0;
}

AccessResult Memory::access(const MemoryRequest& req) {
  switch (req.kind) {
    case AccessKind::Read: return read(req.addr, req.width, req.sign_extend);
    case AccessKind::Write: return write(req.addr, req.width, req.wdata);
    case AccessKind::AmoSwap: return amoswap(req.addr, req.wdata);
  }
  return {};
}

AccessResult Memory::read(Addr addr, Width width, bool sign_extend) {
  AccessResult r;
  if ((r.fault = check(addr, width, AccessKind::Read))) return r;
  const Addr len = static_cast<Addr>(width);
  if (const auto* p = ram(addr, len)) {
    Word v = 0;
    for (Addr i = 0; i < len; ++i) v |= Word{p[i]} << (8 * i);
    r.data = v;
    r.latency = latency(addr);
  } else {
    auto* dev = mmio(addr, len);
    r.data = dev->device->read(addr - dev->base, width);
  }
  if (len < 4) {
    const unsigned shift = 32 - 8 * len;
    r.data &= (1u << (8 * len)) - 1;
    if (sign_extend) r.data = static_cast<Word>(static_cast<SWord>(r.data << shift) >> shift);
  }
  return r;
}

AccessResult Memory::write(Addr addr, Width width, Word value) {
  AccessResult r;
  if ((r.fault = check(addr, width, AccessKind::Write))) return r;
  const Addr len = static_cast<Addr>(width);
  if (auto* p = ram(addr, len)) {
    for (Addr i = 0; i < len; ++i) p[i] = static_cast<std::uint8_t>(value >> (8 * i));
    r.latency = latency(addr);
  } else {
    auto* dev = mmio(addr, len);
    dev->device->write(addr - dev->base, width, value);
  }
  return r;
}

AccessResult Memory::amoswap(Addr addr, Word value) {
  AccessResult r;
  if ((r.fault = check(addr, Width::Word, AccessKind::AmoSwap))) return r;
  auto* p = ram(addr, 4);
  for (Addr i = 0; i < 4; ++i) {
    r.data |= Word{p[i]} << (8 * i);
    p[i] = static_cast<std::uint8_t>(value >> (8 * i));
  }
  r.latency = latency(addr);
  return r;
}

AccessResult Memory::fetch(Addr addr) const {
  AccessResult r;
  const auto* p = addr % 4 == 0 ? ram(addr, 4) : nullptr;
  if (!p) {
    r.fault = TrapCause::exception(addr % 4 ? cause::kInstrMisaligned : cause::kInstrAccessFault, addr);
    return r;
  }
  r.data = Word{p[0]} | Word{p[1]} << 8 | Word{p[2]} << 16 | Word{p[3]} << 24;
  return r;
}

void Memory::load(const ProgramImage& image) { load_binary(image.bytes(), image.base); }

void Memory::load_binary(std::span<const std::uint8_t> bytes, Addr addr) {
  if (bytes.empty()) return;
  auto* p = ram(addr, static_cast<Addr>(bytes.size()));
  if (!p || bytes.size() > 0xFFFF'FFFFull)
    throw std::out_of_range(fmt::format("image of {} bytes at {:#x} does not fit in one RAM segment",
                                        bytes.size(), addr));
  std::copy(bytes.begin(), bytes.end(), p);
}

std::optional<std::uint8_t> Memory::peek(Addr addr) const {
  if (const auto* p = ram(addr, 1)) return *p;
  return std::nullopt;
}

bool Memory::poke(Addr addr, std::uint8_t value) {
  if (auto* p = ram(addr, 1)) {
    *p = value;
    return true;
  }
  return false;
}

}  // namespace klessydra
