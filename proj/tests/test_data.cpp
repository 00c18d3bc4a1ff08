#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qpm/data.hpp"
#include "qpm/prng.hpp"

namespace {

using qpm::Prng;

constexpr double kPi = std::numbers::pi;

TEST(Data, MoonsNoiselessAnchors) {
  Prng rng(0, qpm::kStreamData);
  auto ds = qpm::make_moons<double>(8, 0.0, rng);
  ASSERT_EQ(ds.size(), 8u);
  EXPECT_EQ(ds.family, "moons");
  EXPECT_EQ(ds.d, 2);
  // First outer point: t = 0 -> (1, 0), label 0.
  EXPECT_DOUBLE_EQ(ds.features[0][0], 1.0);
  EXPECT_DOUBLE_EQ(ds.features[0][1], 0.0);
  EXPECT_EQ(ds.labels[0], 0);
  // Last outer point: t = pi -> (-1, 0).
  EXPECT_NEAR(ds.features[3][0], -1.0, 1e-15);
  EXPECT_NEAR(ds.features[3][1], 0.0, 1e-15);
  // First inner point: t = 0 -> (1 - 1, 0.5 - 0) = (0, 0.5), label 1.
  EXPECT_DOUBLE_EQ(ds.features[4][0], 0.0);
  EXPECT_DOUBLE_EQ(ds.features[4][1], 0.5);
  EXPECT_EQ(ds.labels[4], 1);
  // Last inner point: t = pi -> (2, 0.5).
  EXPECT_NEAR(ds.features[7][0], 2.0, 1e-15);
  EXPECT_NEAR(ds.features[7][1], 0.5, 1e-15);
}

TEST(Data, MoonsMidpointAnchor) {
  Prng rng(0, qpm::kStreamData);
  auto ds = qpm::make_moons<double>(10, 0.0, rng);
  // Outer index 2 of 5: t = pi * 2 / 4 = pi/2 -> (0, 1).
  EXPECT_NEAR(ds.features[2][0], std::cos(kPi / 2), 1e-15);
  EXPECT_DOUBLE_EQ(ds.features[2][1], 1.0);
}

TEST(Data, MoonsValidation) {
  Prng rng(0, qpm::kStreamData);
  EXPECT_THROW(qpm::make_moons<double>(7, 0.1, rng), std::invalid_argument);
  EXPECT_THROW(qpm::make_moons<double>(0, 0.1, rng), std::invalid_argument);
  EXPECT_THROW(qpm::make_moons<double>(8, -0.1, rng), std::invalid_argument);
}

TEST(Data, MoonsNoiseConsumesRngEvenAtZero) {
  // noise = 0 adds exactly zero but still draws, keeping stream alignment
  // independent of the noise value.
  Prng a(3, qpm::kStreamData), b(3, qpm::kStreamData);
  auto quiet = qpm::make_moons<double>(6, 0.0, a);
  auto loud = qpm::make_moons<double>(6, 0.0, b);
  EXPECT_DOUBLE_EQ(a.uniform(), b.uniform());  // same stream position
  for (std::size_t i = 0; i < quiet.size(); ++i) {
    EXPECT_EQ(quiet.features[i], loud.features[i]);
  }
}

TEST(Data, CirclesNoiselessAnchors) {
  Prng rng(0, qpm::kStreamData);
  auto ds = qpm::make_circles<double>(16, 0.0, 0.5, rng);
  ASSERT_EQ(ds.size(), 16u);
  EXPECT_EQ(ds.family, "circles");
  EXPECT_DOUBLE_EQ(ds.factor, 0.5);
  // Outer ring: all unit norm, label 0.
  for (int i = 0; i < 8; ++i) {
    const double r = std::hypot(ds.features[i][0], ds.features[i][1]);
    EXPECT_NEAR(r, 1.0, 1e-15) << "outer " << i;
    EXPECT_EQ(ds.labels[i], 0);
  }
  // Inner ring: radius = factor, label 1.
  for (int i = 8; i < 16; ++i) {
    const double r = std::hypot(ds.features[i][0], ds.features[i][1]);
    EXPECT_NEAR(r, 0.5, 1e-15) << "inner " << i;
    EXPECT_EQ(ds.labels[i], 1);
  }
  // Angles are 2pi*i/8, exclusive of 2pi: first inner point (factor, 0),
  // index 4 of the inner ring is angle pi -> (-0.5, 0).
  EXPECT_DOUBLE_EQ(ds.features[8][0], 0.5);
  EXPECT_DOUBLE_EQ(ds.features[8][1], 0.0);
  EXPECT_NEAR(ds.features[12][0], -0.5, 1e-15);
  EXPECT_NEAR(ds.features[12][1], 0.0, 1e-15);
}

TEST(Data, CirclesValidation) {
  Prng rng(0, qpm::kStreamData);
  EXPECT_THROW(qpm::make_circles<double>(9, 0.1, 0.5, rng),
               std::invalid_argument);
  EXPECT_THROW(qpm::make_circles<double>(8, -0.1, 0.5, rng),
               std::invalid_argument);
  EXPECT_THROW(qpm::make_circles<double>(8, 0.1, 0.0, rng),
               std::invalid_argument);
  EXPECT_THROW(qpm::make_circles<double>(8, 0.1, 1.0, rng),
               std::invalid_argument);
  EXPECT_THROW(qpm::make_circles<double>(8, 0.1, 1.5, rng),
               std::invalid_argument);
}

TEST(Data, BlobsShapeAndBalance) {
  Prng rng(5, qpm::kStreamData);
  auto ds = qpm::make_blob_classification<double>(40, 6, 1.0, rng);
  ASSERT_EQ(ds.size(), 40u);
  EXPECT_EQ(ds.family, "blobs");
  EXPECT_EQ(ds.d, 6);
  int ones = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(ds.features[i].size(), 6u);
    ones += ds.labels[i];
    if (i < 20) {
      EXPECT_EQ(ds.labels[i], 0);
    } else {
      EXPECT_EQ(ds.labels[i], 1);
    }
  }
  EXPECT_EQ(ones, 20);
}

TEST(Data, BlobsIdentityMixingClassMeans) {
  // With the identity mixing hook the class means approach the +-class_sep
  // corner centroids.
  Prng rng(8, qpm::kStreamData);
  const int n = 4000;
  const int d = 3;
  const double sep = 2.0;
  auto ds = qpm::make_blob_classification<double>(n, d, sep, rng, true);
  std::vector<double> mean0(d, 0.0), mean1(d, 0.0);
  for (int i = 0; i < n / 2; ++i) {
    for (int j = 0; j < d; ++j) {
      mean0[j] += ds.features[i][j];
      mean1[j] += ds.features[n / 2 + i][j];
    }
  }
  for (int j = 0; j < d; ++j) {
    mean0[j] /= n / 2;
    mean1[j] /= n / 2;
    EXPECT_NEAR(std::abs(mean0[j]), sep, 0.15) << "class 0 coord " << j;
    EXPECT_NEAR(std::abs(mean1[j]), sep, 0.15) << "class 1 coord " << j;
  }
  // Centroids must differ in at least one coordinate sign.
  bool differs = false;
  for (int j = 0; j < d; ++j) {
    if ((mean0[j] > 0) != (mean1[j] > 0)) differs = true;
  }
  EXPECT_TRUE(differs);
}

TEST(Data, BlobsDeterministicAcrossCalls) {
  Prng a(11, qpm::kStreamData), b(11, qpm::kStreamData);
  auto d1 = qpm::make_blob_classification<double>(20, 4, 1.0, a);
  auto d2 = qpm::make_blob_classification<double>(20, 4, 1.0, b);
  for (std::size_t i = 0; i < d1.size(); ++i) {
    EXPECT_EQ(d1.features[i], d2.features[i]);
  }
}

TEST(Data, BlobsZeroSeparationAllowed) {
  Prng rng(2, qpm::kStreamData);
  auto ds = qpm::make_blob_classification<double>(8, 2, 0.0, rng);
  EXPECT_EQ(ds.size(), 8u);  // must not spin redrawing identical centroids
}

TEST(Data, BlobsValidation) {
  Prng rng(0, qpm::kStreamData);
  EXPECT_THROW(qpm::make_blob_classification<double>(9, 4, 1.0, rng),
               std::invalid_argument);
  EXPECT_THROW(qpm::make_blob_classification<double>(8, 1, 1.0, rng),
               std::invalid_argument);
}

TEST(Data, NoiseScalesEmpirically) {
  // Sample std of (feature - clean) should track the requested noise level.
  const int n = 10000;
  for (double noise : {0.1, 0.3}) {
    Prng clean_rng(31, qpm::kStreamData);
    Prng noisy_rng(31, qpm::kStreamData);
    auto clean = qpm::make_moons<double>(n, 0.0, clean_rng);
    auto noisy = qpm::make_moons<double>(n, noise, noisy_rng);
    double sq = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double delta = noisy.features[i][j] - clean.features[i][j];
        sq += delta * delta;
        ++count;
      }
    }
    const double sd = std::sqrt(sq / count);
    EXPECT_NEAR(sd, noise, 0.05 * noise) << "noise " << noise;
  }
}

TEST(Data, SplitSizesAndMetadata) {
  Prng gen(1, qpm::kStreamData);
  auto ds = qpm::make_circles<double>(30, 0.05, 0.4, gen);
  ds.seed = 17;
  Prng split_rng(1, qpm::kStreamData);
  auto split = qpm::split_and_standardize(ds, 20, 10, split_rng);
  EXPECT_EQ(split.train.size(), 20u);
  EXPECT_EQ(split.test.size(), 10u);
  EXPECT_EQ(split.train.family, "circles");
  EXPECT_EQ(split.test.family, "circles");
  EXPECT_DOUBLE_EQ(split.train.factor, 0.4);
  EXPECT_EQ(split.train.seed, 17u);
}

TEST(Data, SplitIsShuffledPermutationOfInput) {
  Prng gen(9, qpm::kStreamData);
  auto ds = qpm::make_moons<double>(40, 0.1, gen);
  Prng split_rng(9, qpm::kStreamShuffle);
  auto split = qpm::split_and_standardize(ds, 30, 10, split_rng);

  // Replay the permutation: the split must place ds.features[order[i]] at
  // position i (after standardization, so compare via labels which are
  // untouched, plus un-scaled feature recovery).
  Prng replay(9, qpm::kStreamShuffle);
  std::vector<std::size_t> order(40);
  for (std::size_t i = 0; i < 40; ++i) order[i] = i;
  replay.shuffle(order);
  for (int i = 0; i < 30; ++i) {
    EXPECT_EQ(split.train.labels[i], ds.labels[order[i]]) << i;
  }
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(split.test.labels[i], ds.labels[order[30 + i]]) << i;
  }
  // Inverse transform recovers the original rows.
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double recovered = split.train.features[i][j] *
                                   split.scaler.std_dev[j] +
                               split.scaler.mean[j];
      EXPECT_NEAR(recovered, ds.features[order[i]][j], 1e-12);
    }
  }
}

TEST(Data, StandardizationStatsFitOnTrainOnly) {
  Prng gen(13, qpm::kStreamData);
  auto ds = qpm::make_moons<double>(60, 0.2, gen);
  Prng split_rng(13, qpm::kStreamShuffle);
  auto split = qpm::split_and_standardize(ds, 40, 20, split_rng);

  // Train features have zero mean and unit population std per coordinate.
  for (int j = 0; j < 2; ++j) {
    double mean = 0.0;
    for (const auto& row : split.train.features) mean += row[j];
    mean /= 40;
    EXPECT_NEAR(mean, 0.0, 1e-12);
    double var = 0.0;
    for (const auto& row : split.train.features) {
      var += (row[j] - mean) * (row[j] - mean);
    }
    EXPECT_NEAR(std::sqrt(var / 40), 1.0, 1e-12);
  }
  // Test features are generally not exactly standardized by train stats.
  double test_mean = 0.0;
  for (const auto& row : split.test.features) test_mean += row[0];
  test_mean /= 20;
  EXPECT_GT(std::abs(test_mean), 1e-8);
}

TEST(Data, StandardDeviationFloorForConstantFeature) {
  qpm::Dataset<double> ds;
  ds.family = "moons";
  ds.d = 2;
  for (int i = 0; i < 10; ++i) {
    ds.features.push_back({4.2, static_cast<double>(i)});
    ds.labels.push_back(i % 2);
  }
  Prng rng(0, qpm::kStreamShuffle);
  auto split = qpm::split_and_standardize(ds, 8, 2, rng);
  EXPECT_DOUBLE_EQ(split.scaler.std_dev[0], 1e-8);  // floored
  for (const auto& row : split.train.features) {
    EXPECT_DOUBLE_EQ(row[0], 0.0);  // (4.2 - 4.2) / 1e-8
  }
}

TEST(Data, SplitValidation) {
  Prng gen(1, qpm::kStreamData);
  auto ds = qpm::make_moons<double>(10, 0.0, gen);
  Prng rng(1, qpm::kStreamShuffle);
  EXPECT_THROW(qpm::split_and_standardize(ds, 11, 0, rng),
               std::invalid_argument);
  EXPECT_THROW(qpm::split_and_standardize(ds, 8, 3, rng),
               std::invalid_argument);
  EXPECT_THROW(qpm::split_and_standardize(ds, 0, 5, rng),
               std::invalid_argument);
}

TEST(Data, CsvDump) {
  qpm::Dataset<double> ds;
  ds.d = 2;
  ds.features = {{1.5, -0.25}, {0.1, 2.0}};
  ds.labels = {0, 1};
  std::ostringstream os;
  qpm::dump_dataset_csv(ds, os);
  EXPECT_EQ(os.str(),
            "x0,x1,label\n"
            "1.5,-0.25,0\n"
            "0.10000000000000001,2,1\n");
}

}  // namespace
