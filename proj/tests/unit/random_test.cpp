#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "mlmc/random.hpp"

using mlmc::RandomStream;

TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(mlmc::philox4x32({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(mlmc::philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(mlmc::philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, SplitIsDeterministic) {
  const RandomStream root(42);
  auto a = root.split(7), b = root.split(7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
  // splitting does not advance the parent
  auto c = root.split(7);
  EXPECT_EQ(c(), RandomStream(42).split(7)());
}

TEST(RandomStream, PathsAreDistinct) {
  const RandomStream root(1);
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(root.split(a).split(b).path_hash());
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_NE(root.split(1).split(2).path_hash(), root.split(2).split(1).path_hash());
  EXPECT_NE(RandomStream(1).split(3)(), RandomStream(2).split(3)());
}

TEST(RandomStream, SiblingStreamsLookIndependent) {
  // 10x10 contingency table of paired uniforms, 81 degrees of freedom;
  // the 1% critical value is about 113.5.
  const RandomStream root(2024);
  auto a = root.split(11), b = root.split(12);
  constexpr int kBins = 10, kDraws = 10000;
  std::array<std::array<int, kBins>, kBins> table{};
  std::array<int, kBins> ra{}, rb{};
  for (int i = 0; i < kDraws; ++i) {
    const int x = static_cast<int>(a.uniform() * kBins), y = static_cast<int>(b.uniform() * kBins);
    ++table[x][y];
    ++ra[x];
    ++rb[y];
  }
  double chi2 = 0.0;
  for (int x = 0; x < kBins; ++x)
    for (int y = 0; y < kBins; ++y) {
      const double e = static_cast<double>(ra[x]) * rb[y] / kDraws;
      chi2 += (table[x][y] - e) * (table[x][y] - e) / e;
    }
  EXPECT_LT(chi2, 113.5);
}

TEST(RandomStream, UniformAndNormalMoments) {
  RandomStream s(5);
  double su = 0, sn = 0, sn2 = 0;
  constexpr int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 3 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sn / n, 0.0, 3 / std::sqrt(n));
  EXPECT_NEAR(sn2 / n, 1.0, 3 * std::sqrt(2.0 / n));
}

TEST(RandomStream, UniformIntRange) {
  RandomStream s(9);
  std::array<int, 5> hits{};
  for (int i = 0; i < 5000; ++i) {
    const auto v = s.uniform_int(-2, 2);
    ASSERT_GE(v, -2);
    ASSERT_LE(v, 2);
    ++hits[static_cast<std::size_t>(v + 2)];
  }
  for (int h : hits) EXPECT_GT(h, 800);
  EXPECT_EQ(s.uniform_int(3, 3), 3);
  EXPECT_THROW(s.uniform_int(1, 0), std::invalid_argument);
}
