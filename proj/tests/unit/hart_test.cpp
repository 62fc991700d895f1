// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdint>
#include <random>

#include "klessydra/hart.hpp"

using namespace klessydra;

namespace {

// 64-bit model of each ALU op, independent of alu_exec.
Word alu_model(Op op, Word a, Word b) {
  const std::int64_t sa = static_cast<std::int32_t>(a);
  const std::int64_t sb = static_cast<std::int32_t>(b);
  const std::uint64_t ua = a, ub = b;
  const unsigned sh = b % 32;
  switch (op) {
    case Op::ADD: return static_cast<Word>((ua + ub) % (1ull << 32));
    case Op::SUB: return static_cast<Word>((ua + (1ull << 32) - ub) % (1ull << 32));
    case Op::SLT: return sa < sb;
    case Op::SLTU: return ua < ub;
    case Op::AND: return static_cast<Word>(ua & ub);
    case Op::OR: return static_cast<Word>(ua | ub);
    case Op::XOR: return static_cast<Word>(ua ^ ub);
    case Op::SLL: return static_cast<Word>((ua << sh) % (1ull << 32));
    case Op::SRL: return static_cast<Word>(ua >> sh);
    case Op::SRA: {
      std::int64_t v = sa;
      for (unsigned i = 0; i < sh; ++i) v = v < 0 ? (v - 1) / 2 : v / 2;
      return static_cast<Word>(v);
    }
    default: return 0;
  }
}

Word sext12(int v) { return static_cast<Word>(static_cast<SWord>(v)); }

struct Fixture : ::testing::Test {
  Memory mem;
  HartState hart{0, 0};
  ExecFeatures features;

  ExecOutcome run(const DecodedInstruction& d, Addr pc = 0x40) {
    return execute(hart, d, pc, hart.reg(d.rs1), hart.reg(d.rs2), mem, features);
  }
};

}  // namespace

TEST(Alu, MatchesWideModelOnRandomPairs) {
  std::mt19937 rng(1234);
  const Op ops[] = {Op::ADD, Op::SUB, Op::SLT, Op::SLTU, Op::AND, Op::OR, Op::XOR, Op::SLL, Op::SRL, Op::SRA};
  for (int i = 0; i < 100000; ++i) {
    Word a = rng(), b = rng();
    if (i % 7 == 0) b = rng() % 64;
    if (i % 11 == 0) a = 0x80000000u;
    for (Op op : ops) ASSERT_EQ(alu_exec(op, a, b), alu_model(op, a, b)) << mnemonic(op) << " " << a << " " << b;
  }
}

TEST(Alu, ImmediateFormsShareSemantics) {
  EXPECT_EQ(alu_exec(Op::ADDI, 5, sext12(-7)), static_cast<Word>(-2));
  EXPECT_EQ(alu_exec(Op::SLTIU, 5, sext12(-1)), 1u);  // unsigned compare against 0xffffffff
  EXPECT_EQ(alu_exec(Op::SRAI, 0x80000000u, 31), 0xFFFFFFFFu);
}

TEST(Branch, Conditions) {
  EXPECT_TRUE(branch_eval(Op::BLT, static_cast<Word>(-1), 0));
  EXPECT_FALSE(branch_eval(Op::BLTU, static_cast<Word>(-1), 0));
  EXPECT_TRUE(branch_eval(Op::BGE, 3, 3));
  EXPECT_TRUE(branch_eval(Op::BGEU, static_cast<Word>(-1), 0));
  EXPECT_TRUE(branch_eval(Op::BNE, 1, 2));
}

TEST_F(Fixture, X0StaysZero) {
  std::mt19937 rng(3);
  for (int i = 0; i < 1000; ++i) {
    hart.set_reg(1, rng());
    run(make_instr(Op::ADDI, 0, 1, 0, 17));
    run(make_instr(Op::LUI, 0, 0, 0, 0x12345000));
    run(make_instr(Op::JAL, 0, 0, 0, 8));
    run(make_instr(Op::CSRRS, 0, 0, 0, 0, csr_addr(Csr::MHARTID)));
    ASSERT_EQ(hart.reg(0), 0u);
  }
}

TEST_F(Fixture, JalLinksAndJalrClearsBitZero) {
  auto o = run(make_instr(Op::JAL, 1, 0, 0, -8), 0x100);
  EXPECT_EQ(o.branch_target, 0xF8u);
  EXPECT_EQ(hart.reg(1), 0x104u);
  hart.set_reg(5, 0x201);
  o = run(make_instr(Op::JALR, 1, 5, 0, 3), 0x100);
  EXPECT_EQ(o.branch_target, 0x204u);
}

TEST_F(Fixture, MisalignedJumpTargetTraps) {
  hart.set_reg(5, 0x202);
  const auto o = run(make_instr(Op::JALR, 1, 5, 0, 0), 0x100);
  ASSERT_TRUE(o.exception);
  EXPECT_EQ(o.exception->code, cause::kInstrMisaligned);
  EXPECT_EQ(o.exception->tval, 0x202u);
  EXPECT_EQ(hart.reg(1), 0u);  // no link on a faulting jump
  EXPECT_FALSE(o.retired);
}

TEST_F(Fixture, LoadsSignAndZeroExtend) {
  mem.write(0x100000, Width::Word, 0x8081F0FFu);
  hart.set_reg(10, 0x100000);
  run(make_instr(Op::LB, 1, 10, 0, 0));
  run(make_instr(Op::LBU, 2, 10, 0, 0));
  run(make_instr(Op::LH, 3, 10, 0, 2));
  run(make_instr(Op::LHU, 4, 10, 0, 2));
  run(make_instr(Op::LW, 5, 10, 0, 0));
  EXPECT_EQ(hart.reg(1), 0xFFFFFFFFu);
  EXPECT_EQ(hart.reg(2), 0xFFu);
  EXPECT_EQ(hart.reg(3), 0xFFFF8081u);
  EXPECT_EQ(hart.reg(4), 0x8081u);
  EXPECT_EQ(hart.reg(5), 0x8081F0FFu);
}

TEST_F(Fixture, MisalignedLoadFaultsBeforeTouchingRegisters) {
  hart.set_reg(10, 0x100000);
  hart.set_reg(5, 77);
  const auto o = run(make_instr(Op::LW, 5, 10, 0, 2));
  ASSERT_TRUE(o.exception);
  EXPECT_EQ(o.exception->code, cause::kLoadMisaligned);
  EXPECT_EQ(o.exception->tval, 0x100002u);
  EXPECT_EQ(hart.reg(5), 77u);
}

TEST_F(Fixture, AmoSwapIsIllegalWhenDisabled) {
  features.amo_enabled = false;
  hart.set_reg(3, 0x100000);
  const auto o = run(make_instr(Op::AMOSWAP_W, 1, 3, 2));
  ASSERT_TRUE(o.exception);
  EXPECT_EQ(o.exception->code, cause::kIllegalInstr);
}

TEST_F(Fixture, AmoSwapExchanges) {
  mem.write(0x100010, Width::Word, 5);
  hart.set_reg(3, 0x100010);
  hart.set_reg(2, 9);
  run(make_instr(Op::AMOSWAP_W, 1, 3, 2));
  EXPECT_EQ(hart.reg(1), 5u);
  EXPECT_EQ(mem.read(0x100010, Width::Word, false).data, 9u);
}

TEST(Csr, ReadOnlyAndMaskedRows) {
  CsrFile c(3, 0x0203);
  EXPECT_EQ(*c.read(0xF14), 3u);
  EXPECT_TRUE(c.write(0xF14, 9));
  EXPECT_EQ(*c.read(0xF14), 3u);
  EXPECT_EQ(*c.read(0xF00), 0x0203u);
  EXPECT_EQ(*c.read(0xF01), kMimpidValue);
  c.write(0x300, 0xFFFFFFFF);
  EXPECT_EQ(*c.read(0x300), kMstatusMie);
  EXPECT_FALSE(c.read(0x301));
  EXPECT_FALSE(c.write(0xC00, 1));
}

TEST_F(Fixture, CsrInstructions) {
  hart.set_reg(6, 0x1234);
  run(make_instr(Op::CSRRW, 5, 6, 0, 0, csr_addr(Csr::MEPC)));
  EXPECT_EQ(hart.csrs.get(Csr::MEPC), 0x1234u);
  run(make_instr(Op::CSRRSI, 7, 3, 0, 3, csr_addr(Csr::MEPC)));
  EXPECT_EQ(hart.reg(7), 0x1234u);
  EXPECT_EQ(hart.csrs.get(Csr::MEPC), 0x1237u);
  run(make_instr(Op::CSRRCI, 0, 1, 0, 1, csr_addr(Csr::MEPC)));
  EXPECT_EQ(hart.csrs.get(Csr::MEPC), 0x1236u);
  const auto o = run(make_instr(Op::CSRRS, 1, 0, 0, 0, 0xC00));
  ASSERT_TRUE(o.exception);
  EXPECT_EQ(o.exception->code, cause::kIllegalInstr);
}

TEST_F(Fixture, TrapEntryAndMret) {
  hart.csrs.set(Csr::MTVEC, 0x203);
  hart.csrs.set(Csr::MSTATUS, kMstatusMie);
  enter_trap(hart, TrapCause::exception(cause::kLoadMisaligned, 0x100002), 0x40);
  EXPECT_EQ(hart.pc, 0x200u);
  EXPECT_EQ(hart.csrs.get(Csr::MEPC), 0x40u);
  EXPECT_EQ(hart.csrs.get(Csr::MCAUSE), 4u);
  EXPECT_EQ(hart.csrs.get(Csr::MBADADDR), 0x100002u);
  EXPECT_EQ(hart.csrs.get(Csr::MESTATUS), kMstatusMie);
  EXPECT_FALSE(hart.csrs.interrupts_enabled());
  mret(hart);
  EXPECT_EQ(hart.pc, 0x40u);
  EXPECT_TRUE(hart.csrs.interrupts_enabled());

  enter_trap(hart, TrapCause::external_irq(6), 0x80);
  EXPECT_EQ(hart.csrs.get(Csr::MCAUSE), 0x8000000Bu);
  EXPECT_EQ(hart.csrs.get(Csr::MIRQ), 6u);
  EXPECT_EQ(hart.csrs.get(Csr::MBADADDR), 0x100002u);
}

TEST_F(Fixture, SystemInstructions) {
  EXPECT_EQ(run(make_instr(Op::ECALL)).exception->code, cause::kEcallM);
  EXPECT_EQ(run(make_instr(Op::EBREAK)).exception->code, cause::kBreakpoint);
  features.debug_attached = true;
  EXPECT_TRUE(run(make_instr(Op::EBREAK)).debug_break);
  EXPECT_TRUE(run(make_instr(Op::WFI)).wfi);
  EXPECT_TRUE(run(make_instr(Op::MRET)).mret);
  EXPECT_TRUE(run(make_instr(Op::FENCE_I)).retired);
}
