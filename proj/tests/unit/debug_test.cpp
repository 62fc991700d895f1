// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "klessydra/reference.hpp"
#include "support/kernels.hpp"

using namespace klessydra;

TEST(Debug, HaltThenStepRetiresExactlyOneEach) {
  auto core = kernels::make_core(CoreConfig::preset("T023"), kernels::loop(50, 4));
  core.run(40);
  core.halt();
  EXPECT_TRUE(core.halt_pending() || core.halted());
  core.run(100);
  ASSERT_TRUE(core.halted());
  EXPECT_EQ(core.state(), FsmIeState::Debug);
  const auto before = core.counters().total_retired();
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(core.debug_step().retired);
  EXPECT_EQ(core.counters().total_retired(), before + 3);
}

TEST(Debug, StepsVisitHartsInScheduleOrder) {
  auto core = kernels::make_core(CoreConfig::preset("T023"), kernels::straight_line(50));
  core.halt();
  ASSERT_TRUE(core.halted());
  std::vector<unsigned> order;
  for (int i = 0; i < 6; ++i) order.push_back(core.debug_step().harc);
  EXPECT_EQ(order, (std::vector<unsigned>{0, 1, 2, 0, 1, 2}));
}

TEST(Debug, HaltedSteppingMatchesUninterruptedRun) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto src = kernels::random_program(rng);
    const auto cfg = CoreConfig::preset(trial % 2 ? "T034" : "T022");
    auto plain = kernels::make_core(cfg, src);
    plain.run(100000);
    auto dbg = kernels::make_core(cfg, src);
    dbg.run(25);
    if (dbg.finished()) continue;
    dbg.halt();
    dbg.run(1000);
    for (int i = 0; i < 10 && !dbg.finished(); ++i) dbg.debug_step();
    if (dbg.halted()) dbg.resume();
    dbg.run(100000);
    EXPECT_EQ(compare_states(plain.harts(), plain.memory(), dbg.harts(), dbg.memory()),
              std::vector<std::string>{});
  }
}

TEST(Debug, EbreakWithDebuggerAttachedHalts) {
  auto core = kernels::make_core(CoreConfig::preset("S0"), "li a0, 1\nebreak\nli a0, 2\nwfi\n");
  core.set_debug_attached(true);
  const auto r = core.run(100);
  EXPECT_EQ(r.reason, StopReason::DebugHalt);
  EXPECT_EQ(core.read_reg(0, 10), 1u);
  core.resume();
  core.run(100);
  EXPECT_EQ(core.hart(0).reg(10), 2u);
  EXPECT_EQ(core.hart(0).csrs.get(Csr::MCAUSE), 0u);
}

TEST(Debug, RegisterWritesWhileHaltedAreObserved) {
  auto core = kernels::make_core(CoreConfig::preset("T022"), R"(csrrs t0, mhartid, x0
slli t0, t0, 2
lui s0, 0x100
add s0, s0, t0
nop
nop
nop
nop
sw t0, 0(s0)
sw t5, 0(s0)
wfi
)");
  core.halt();
  core.write_reg(1, 30, 0xCAFE);
  core.resume();
  core.run(1000);
  EXPECT_EQ(core.memory().read(0x100004, Width::Word, false).data, 0xCAFEu);
  EXPECT_EQ(core.memory().read(0x100000, Width::Word, false).data, 0u);
}

TEST(Debug, InspectionRequiresHalt) {
  auto core = kernels::make_core(CoreConfig::preset("T022"), "loop: j loop\n");
  core.run(10);
  EXPECT_THROW(core.read_reg(0, 1), DebugError);
  EXPECT_THROW(core.read_mem(0x100000, 4), DebugError);
  EXPECT_THROW(core.write_csr(0, 0x341, 1), DebugError);
  EXPECT_THROW(core.debug_step(), DebugError);
  EXPECT_THROW(core.resume(), DebugError);
  core.halt();
  core.run(100);
  EXPECT_NO_THROW(core.read_reg(0, 1));
  core.write_mem(0x100000, std::vector<std::uint8_t>{1, 2});
  EXPECT_EQ(core.read_mem(0x100000, 2), (std::vector<std::uint8_t>{1, 2}));
  EXPECT_THROW(core.read_mem(0x80000000, 1), std::out_of_range);
  EXPECT_TRUE(core.write_csr(0, 0x341, 0x40));
  EXPECT_EQ(core.read_csr(0, 0x341), 0x40u);
}

TEST(Debug, BreakpointHaltsBeforeTheInstruction) {
  auto cfg = CoreConfig::preset("T023");
  cfg.active_harts = 1;
  auto core = kernels::make_core(cfg, "li a0, 1\nli a0, 2\nli a0, 3\nli a0, 4\nwfi\n");
  core.add_breakpoint(0x8);
  auto r = core.run(1000);
  ASSERT_EQ(r.reason, StopReason::DebugHalt);
  EXPECT_EQ(core.read_reg(0, 10), 2u);
  EXPECT_EQ(core.read_pc(0), 0x8u);
  core.resume();
  r = core.run(1000);
  EXPECT_EQ(r.reason, StopReason::Quiescent);
  EXPECT_EQ(core.hart(0).reg(10), 4u);
  EXPECT_TRUE(core.remove_breakpoint(0x8));
  EXPECT_FALSE(core.remove_breakpoint(0x8));
}
