// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "support/kernels.hpp"

using namespace klessydra;

namespace {

// Enables interrupts, sleeps, and on return stores a marker.
constexpr const char* kSleeper = R"(li t0, 0x200
csrrw x0, mtvec, t0
csrrsi x0, mstatus, 8
wfi
li a1, 1
sleep: wfi
j sleep
.org 0x200
csrrs a0, mstatus, x0
csrrs a2, mestatus, x0
csrrs a3, mepc, x0
csrrs a4, mcause, x0
csrrs a5, mirq, x0
mret
)";

}  // namespace

TEST(Interrupt, WakesSleepingHartAtTrapVector) {
  for (const char* p : {"S0", "T012", "T023", "T034"}) {
    auto cfg = CoreConfig::preset(p);
    cfg.active_harts = 1;
    auto core = kernels::make_core(cfg, kSleeper);
    // A core with every hart asleep stops, so the interrupt is scheduled.
    core.schedule_interrupt(100, 6, 0);
    core.run(99);
    ASSERT_EQ(core.hart(0).status, HartStatus::WfiSleeping) << p;
    ASSERT_FALSE(core.finished());
    std::optional<std::uint64_t> posted_round, vec_round;
    core.set_trace([&](const CycleReport& r) {
      if (r.woke & 1u) posted_round = r.round;
      if (r.fetched && r.fetch_pc == 0x200 && !vec_round) vec_round = r.round;
    });
    core.run(500);
    ASSERT_TRUE(posted_round) << p;
    ASSERT_TRUE(vec_round) << p;
    EXPECT_LE(*vec_round, *posted_round + 1) << p;
    const auto& h = core.hart(0);
    EXPECT_EQ(h.reg(10), 0u) << p;             // MIE cleared in the handler
    EXPECT_EQ(h.reg(12), kMstatusMie) << p;    // saved status
    EXPECT_EQ(h.reg(13), 0x10u) << p;          // instruction after the WFI
    EXPECT_EQ(h.reg(14), 0x8000000Bu) << p;
    EXPECT_EQ(h.reg(15), 6u) << p;
    EXPECT_EQ(h.reg(11), 1u) << p;             // resumed at MEPC
    EXPECT_TRUE(h.csrs.interrupts_enabled()) << p;
    EXPECT_FALSE(h.csrs.get(Csr::MIP) & kMipMeip);
    EXPECT_EQ(core.stop_reason(), StopReason::Quiescent);
    EXPECT_EQ(core.counters().interrupts_taken, 1u);
  }
}

TEST(Interrupt, StaysPendingWhileDisabled) {
  const char* src = R"(li t0, 0x200
csrrw x0, mtvec, t0
li a0, 0
addi a0, a0, 1
addi a0, a0, 1
addi a0, a0, 1
csrrsi x0, mstatus, 8
loop: j loop
.org 0x200
csrrs a1, mepc, x0
done: wfi
j done
)";
  auto core = kernels::make_core(CoreConfig::preset("S0"), src);
  core.schedule_interrupt(0, 3, 0);
  core.run(1000);
  EXPECT_EQ(core.hart(0).reg(10), 3u);
  // Taken at the first boundary with MIE set, after the csrrsi.
  EXPECT_EQ(core.hart(0).reg(11), 0x1Cu);
  EXPECT_FALSE(core.pending_irq(0));
}

TEST(Interrupt, WakeWithInterruptsDisabledResumesAfterWfi) {
  auto core = kernels::make_core(CoreConfig::preset("T012"), "wfi\nli a0, 5\nloop: j loop\n");
  core.schedule_interrupt(50, 2, 1);
  core.run(100);
  EXPECT_EQ(core.hart(1).reg(10), 5u);
  EXPECT_EQ(core.hart(0).status, HartStatus::WfiSleeping);
  EXPECT_EQ(core.pending_irq(1), 2u);
  EXPECT_EQ(core.hart(1).csrs.get(Csr::MCAUSE), 0u);
}

TEST(Interrupt, WfiWithPendingInterruptDoesNotSleep) {
  auto core = kernels::make_core(CoreConfig::preset("S0"), "wfi\nli a0, 5\nhalt: j halt\n");
  core.post_interrupt(1, 0);
  core.run(50);
  EXPECT_EQ(core.hart(0).reg(10), 5u);
}

TEST(Interrupt, DistinctHartsTrapIndependently) {
  auto cfg = CoreConfig::preset("T034");
  auto core = kernels::make_core(cfg, kSleeper);
  core.schedule_interrupt(300, 7, 1);
  core.schedule_interrupt(300, 9, 3);
  core.run(800);
  EXPECT_EQ(core.hart(1).reg(15), 7u);
  EXPECT_EQ(core.hart(3).reg(15), 9u);
  EXPECT_EQ(core.hart(0).reg(15), 0u);
  EXPECT_EQ(core.hart(1).reg(11), 1u);
  EXPECT_EQ(core.hart(3).reg(11), 1u);
  EXPECT_EQ(core.hart(0).reg(11), 0u);
}

TEST(Interrupt, WinsOverTakenBranchAndSavesItsTarget) {
  const char* src = R"(li t0, 0x200
csrrw x0, mtvec, t0
csrrsi x0, mstatus, 8
j target
nop
nop
target: j target
.org 0x200
csrrs a0, mepc, x0
stop: wfi
j stop
)";
  auto core = kernels::make_core(CoreConfig::preset("S0"), src);
  // Posted once MIE is set, so the pending interrupt meets the jump.
  bool posted = false;
  core.set_trace([&](const CycleReport& r) {
    if (!posted && r.retired && r.retire_pc == 0x08) {
      core.post_interrupt(1, 0);
      posted = true;
    }
  });
  core.run(1000);
  EXPECT_EQ(core.hart(0).reg(10), 0x18u);
}

TEST(Interrupt, ScheduleTargetsOutsidePoolRejected) {
  Core core(CoreConfig::preset("T022"));
  EXPECT_THROW(core.schedule_interrupt(1, 1, 2), std::out_of_range);
  EXPECT_THROW(core.post_interrupt(1, 5), std::out_of_range);
}

TEST(Trap, MisalignedLoadRecordsAddress) {
  const char* src = R"(li t0, 0x200
csrrw x0, mtvec, t0
lui a0, 0x100
lw t1, 2(a0)
stop: wfi
j stop
.org 0x200
csrrs a1, mbadaddr, x0
csrrs a2, mcause, x0
csrrs a3, mepc, x0
addi a4, a3, 4
csrrw x0, mepc, a4
mret
)";
  auto core = kernels::make_core(CoreConfig::preset("T023"), src);
  core.run(1000);
  for (unsigned h = 0; h < 3; ++h) {
    EXPECT_EQ(core.hart(h).reg(11), 0x100002u);
    EXPECT_EQ(core.hart(h).reg(12), 4u);
    EXPECT_EQ(core.hart(h).reg(13), 0x0Cu);
    EXPECT_EQ(core.hart(h).reg(6), 0u);
  }
  EXPECT_EQ(core.counters().trap_slots, 3u);
}
