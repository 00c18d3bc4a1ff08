#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "qpm/prng.hpp"

namespace {

using qpm::Prng;

// Frozen vectors from an independent PCG-XSH-RR 64/32 implementation.
void expect_stream(std::uint64_t seed, std::uint64_t stream,
                   const std::vector<std::uint32_t>& want) {
  Prng rng(seed, stream);
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(rng.next_u32(), want[i]) << "seed=" << seed << " stream=" << stream
                                       << " index=" << i;
  }
}

TEST(Prng, FrozenU32Streams) {
  expect_stream(0, 0,
                {3837872008u, 932996374u, 1548399547u, 1612522464u, 473443212u,
                 3522865942u, 1734871597u, 2449558126u});
  expect_stream(1, 0,
                {3795398737u, 17903413u, 3545275701u, 194195274u, 2326030198u,
                 2354257974u, 2697798104u, 3102124240u});
  expect_stream(0, 1,
                {257813417u, 407017181u, 896943092u, 4175973425u, 2864827017u,
                 1163259907u, 618144122u, 1041812380u});
  expect_stream(123456789, 987654321,
                {1890204489u, 803489227u, 3320481718u, 115184899u, 4096048793u,
                 1999336987u, 3660929680u, 3094009531u});
}

// First outputs of the reference generator demo (seed 42, stream 54).
TEST(Prng, CanonicalReferenceSequence) {
  expect_stream(42, 54,
                {0xa15c02b7u, 0x7b47f409u, 0xba1d3330u, 0x83d2f293u,
                 0xbfa4784bu, 0xcbed606eu});
}

TEST(Prng, FrozenUniformDoubles) {
  Prng rng(7, 3);
  const double want[] = {0.8573479139575966, 0.38537079760477,
                         0.4161276619443537, 0.7193648341494252};
  for (double w : want) EXPECT_DOUBLE_EQ(rng.uniform(), w);
}

TEST(Prng, FrozenNormalDoubles) {
  Prng rng(7, 3);
  const double want[] = {-1.4833790503217918, -0.1984497275511826,
                         1.3833820644005304, 1.6612403249819088};
  for (double w : want) EXPECT_DOUBLE_EQ(rng.normal(), w);
}

TEST(Prng, UniformRangeHalfOpen) {
  Prng rng(11, 1);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Prng, UniformIntervalScaling) {
  Prng a(5, 2);
  Prng b(5, 2);
  for (int i = 0; i < 100; ++i) {
    double u = a.uniform();
    EXPECT_DOUBLE_EQ(b.uniform(-2.0, 3.0), -2.0 + u * 5.0);
  }
}

TEST(Prng, NormalAffineTransform) {
  Prng a(9, 4);
  Prng b(9, 4);
  for (int i = 0; i < 100; ++i) {
    double z = a.normal();
    EXPECT_DOUBLE_EQ(b.normal(1.5, 0.25), 1.5 + 0.25 * z);
  }
}

TEST(Prng, NextBelowBounds) {
  Prng rng(3, 8);
  for (int i = 0; i < 20000; ++i) {
    EXPECT_LT(rng.next_below(7), 7u);
  }
  // bound 1 always yields 0
  for (int i = 0; i < 16; ++i) EXPECT_EQ(rng.next_below(1), 0u);
}

TEST(Prng, NextBelowCoversAllResidues) {
  Prng rng(13, 5);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) counts[rng.next_below(5)]++;
  for (int c : counts) EXPECT_GT(c, 800);  // roughly uniform
}

TEST(Prng, IndependentStreamsDiffer) {
  Prng a(99, 1);
  Prng b(99, 2);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u32() == b.next_u32()) ++same;
  }
  EXPECT_LT(same, 4);
}

TEST(Prng, ShuffleIsPermutation) {
  Prng rng(21, qpm::kStreamShuffle);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Prng, ShuffleDeterministic) {
  std::vector<int> a(20), b(20);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  Prng r1(4, 4);
  Prng r2(4, 4);
  r1.shuffle(a);
  r2.shuffle(b);
  EXPECT_EQ(a, b);
}

TEST(Prng, ShuffleEmptyAndSingle) {
  Prng rng(1, 1);
  std::vector<int> empty;
  rng.shuffle(empty);
  EXPECT_TRUE(empty.empty());
  std::vector<int> one{42};
  rng.shuffle(one);
  EXPECT_EQ(one[0], 42);
}

TEST(Prng, StreamConstantsDistinct) {
  EXPECT_NE(qpm::kStreamData, qpm::kStreamModel);
  EXPECT_NE(qpm::kStreamModel, qpm::kStreamShuffle);
  EXPECT_NE(qpm::kStreamData, qpm::kStreamShuffle);
}

TEST(Prng, UniformMeanNearHalf) {
  Prng rng(17, 6);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.uniform();
  EXPECT_NEAR(sum / n, 0.5, 0.01);
}

TEST(Prng, NormalMomentsSane) {
  Prng rng(23, 9);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.03);
}

}  // namespace
