// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <string>

#include "klessydra/assembler.hpp"
#include "klessydra/isa.hpp"

using namespace klessydra;

namespace {

struct Golden {
  const char* text;
  Word word;
};

constexpr Golden kGolden[] = {
#include "golden/encodings.inc"
};

struct AbiName {
  const char* name;
  unsigned reg;
};

constexpr AbiName kAbi[] = {
#include "golden/abi_registers.inc"
};

}  // namespace

TEST(IsaGolden, AssemblerMatchesReferenceEncodings) {
  for (const auto& g : kGolden) {
    const auto img = assemble(g.text);
    ASSERT_EQ(img.words.size(), 1u) << g.text;
    EXPECT_EQ(img.words[0], g.word) << g.text;
  }
}

TEST(IsaGolden, DisassemblyReproducesSourceText) {
  for (const auto& g : kGolden) {
    const auto d = decode(g.word);
    ASSERT_TRUE(d) << g.text;
    EXPECT_EQ(disassemble(*d), g.text);
  }
}

TEST(IsaGolden, EncodeOfDecodeIsIdentity) {
  for (const auto& g : kGolden) {
    const auto d = decode(g.word);
    ASSERT_TRUE(d) << g.text;
    EXPECT_EQ(encode(*d), g.word) << g.text;
    EXPECT_EQ(d->raw, g.word);
  }
}

TEST(IsaGolden, AbiRegisterNames) {
  for (const auto& a : kAbi) EXPECT_EQ(parse_register(a.name), a.reg) << a.name;
  for (unsigned r = 0; r < 32; ++r) EXPECT_EQ(parse_register("x" + std::to_string(r)), r);
  EXPECT_FALSE(parse_register("x32"));
  EXPECT_FALSE(parse_register("x01"));
  EXPECT_FALSE(parse_register("t7"));
}

TEST(IsaGolden, CoversEveryOp) {
  std::array<bool, kOpCount> seen{};
  for (const auto& g : kGolden) seen[static_cast<std::size_t>(decode(g.word)->op)] = true;
  for (Op op : all_ops()) EXPECT_TRUE(seen[static_cast<std::size_t>(op)]) << mnemonic(op);
}

TEST(IsaDecode, RejectsOutsideTheSubset) {
  EXPECT_FALSE(decode(0x00000000));  // all-zero is reserved
  EXPECT_FALSE(decode(0xFFFFFFFF));
  EXPECT_FALSE(decode(0x02208033));  // mul x0, x1, x2
  EXPECT_FALSE(decode(0x0020A02F));  // amoadd.w
  EXPECT_FALSE(decode(0x00000001));  // compressed
  EXPECT_FALSE(decode(0x00100073 | (1u << 7)));  // ebreak with rd != 0
  EXPECT_FALSE(decode(0x4000D013 | (1u << 25)));  // srai with shamt[5] set
}

TEST(IsaProperty, DecodeEncodeRoundTripOnRandomWords) {
  std::mt19937 rng(7);
  unsigned decoded = 0;
  for (int i = 0; i < 200000; ++i) {
    const Word w = rng();
    const auto d = decode(w);
    if (!d) continue;
    ++decoded;
    EXPECT_EQ(encode(*d), w) << std::hex << w;
  }
  EXPECT_GT(decoded, 1000u);
}

TEST(IsaProperty, FieldRoundTripThroughEncoding) {
  std::mt19937 rng(11);
  auto u = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int i = 0; i < 50000; ++i) {
    const Op op = all_ops()[u(0, kOpCount - 1)];
    SWord imm = 0;
    unsigned csr = 0;
    switch (format_of(op)) {
      case Format::I: imm = u(-2048, 2047); break;
      case Format::S: imm = u(-2048, 2047); break;
      case Format::SB: imm = u(-2048, 2047) * 2; break;
      case Format::UJ: imm = u(-(1 << 19), (1 << 19) - 1) * 2; break;
      case Format::U: imm = static_cast<SWord>(static_cast<Word>(u(0, 0xFFFFF)) << 12); break;
      case Format::R: break;
    }
    if (op == Op::SLLI || op == Op::SRLI || op == Op::SRAI) imm = u(0, 31);
    if (is_csr(op)) {
      csr = static_cast<unsigned>(u(0, 0xFFF));
      imm = 0;
    }
    if (op == Op::FENCE) imm = u(0, 255);
    if (op == Op::AMOSWAP_W) imm = u(0, 3);
    const auto in = make_instr(op, u(0, 31), u(0, 31), u(0, 31), imm, csr);
    const auto out = decode(encode(in));
    ASSERT_TRUE(out) << mnemonic(op);
    auto expect = in;
    expect.raw = out->raw;
    EXPECT_EQ(*out, expect) << disassemble(in);
  }
}

TEST(IsaEncode, RejectsFieldsThatDoNotFit) {
  EXPECT_THROW(encode(make_instr(Op::ADDI, 1, 1, 0, 2048)), EncodeError);
  EXPECT_THROW(encode(make_instr(Op::BEQ, 0, 1, 2, 3)), EncodeError);
  EXPECT_THROW(encode(make_instr(Op::BEQ, 0, 1, 2, 4096)), EncodeError);
  EXPECT_THROW(encode(make_instr(Op::JAL, 1, 0, 0, 1 << 20)), EncodeError);
  EXPECT_THROW(encode(make_instr(Op::SLLI, 1, 1, 0, 32)), EncodeError);
}

TEST(IsaTables, Classification) {
  EXPECT_TRUE(is_branch(Op::BGEU));
  EXPECT_TRUE(is_load(Op::LBU));
  EXPECT_TRUE(is_store(Op::SH));
  EXPECT_TRUE(is_csr(Op::CSRRCI));
  EXPECT_FALSE(writes_rd(Op::SW));
  EXPECT_TRUE(writes_rd(Op::AMOSWAP_W));
  EXPECT_FALSE(reads_rs1(Op::CSRRWI));
  EXPECT_TRUE(reads_rs2(Op::AMOSWAP_W));
  EXPECT_EQ(format_of(Op::JALR), Format::I);
  EXPECT_EQ(format_of(Op::JAL), Format::UJ);
  EXPECT_EQ(format_of(Op::BEQ), Format::SB);
  for (Op op : all_ops()) EXPECT_EQ(op_from_mnemonic(mnemonic(op)), op);
}

TEST(IsaTables, CsrNames) {
  EXPECT_EQ(csr_name(0x300), "mstatus");
  EXPECT_EQ(csr_from_name("mhartid"), 0xF14u);
  EXPECT_EQ(csr_from_name("pcer"), 0x7E0u);
  EXPECT_EQ(csr_from_name("mirq"), 0xFC0u);
  EXPECT_FALSE(csr_from_name("bogus"));
}
