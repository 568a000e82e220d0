/*
Copyright 2026 The preverb Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/


#include "preverb/preverb_metric.h"

#include <random>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"

namespace preverb {
namespace {

std::vector<PathSample> Samples(const std::vector<double>& mu) {
  std::vector<PathSample> out;
  for (size_t i = 0; i < mu.size(); ++i) {
    out.push_back({i, {static_cast<double>(i), 0, 0}, mu[i], MuSource::kErTrace});
  }
  return out;
}

std::vector<std::pair<size_t, size_t>> Ranges(const ClusterMap& map) {
  std::vector<std::pair<size_t, size_t>> out;
  for (const Cluster& c : map.clusters) out.push_back({c.begin, c.end});
  return out;
}

TEST(ConstantsTest, SelfConsistent) {
  const PReverbConstants c;
  EXPECT_NEAR(c.FittedJndEr(), 8.0 / 3.89 - 2.0, 1e-15);
  EXPECT_GE(c.FittedJndEr(), 0.055);
  EXPECT_LE(c.FittedJndEr(), 0.065);
  EXPECT_TRUE(c.SelfConsistent());
  PReverbConstants off = c;
  off.jnd_er_abs = 0.07;
  EXPECT_FALSE(off.SelfConsistent());
}

TEST(DetectionProbabilityTest, Examples) {
  const DetectionProbability at_jnd = DetectionProbabilityEr(2.06);
  EXPECT_NEAR(at_jnd.p, 0.5134, 1e-9);
  EXPECT_GE(at_jnd.p, 0.50);
  EXPECT_LE(at_jnd.p, 0.52);
  EXPECT_FALSE(at_jnd.extrapolated);
  EXPECT_NEAR(DetectionProbabilityEr(2.0).p, 0.28, 1e-12);
  EXPECT_FALSE(DetectionProbabilityEr(2.0).extrapolated);
  const DetectionProbability low = DetectionProbabilityEr(1.9);
  EXPECT_EQ(low.p, 0.0);
  EXPECT_TRUE(low.extrapolated);
  EXPECT_EQ(DetectionProbabilityEr(5.0).p, 1.0);
  EXPECT_TRUE(DetectionProbabilityEr(2.18).extrapolated);
}

TEST(DetectionProbabilityTest, AffineOnFittedDomain) {
  const double lo = DetectionProbabilityEr(2.0).p;
  const double hi = DetectionProbabilityEr(2.17).p;
  EXPECT_NEAR(DetectionProbabilityEr(2.085).p, 0.5 * (lo + hi), 1e-12);
}

TEST(JndLrTest, ReferenceRoomIsExact) {
  EXPECT_EQ(JndLr(2.0), 0.02);
  EXPECT_EQ(JndLr(2.0) / 2.0, 0.01);
  EXPECT_EQ(JndLr(4.0), 0.04);
  EXPECT_EQ(JndLr(2.0, {}, JndMode::kAbsolute), 0.02);
  EXPECT_EQ(JndLr(4.0, {}, JndMode::kAbsolute), 0.02);
  EXPECT_THROW(JndLr(0.0), InputError);
  EXPECT_THROW(JndLr(-1.0), InputError);
}

TEST(JndLrTest, OnePercentEverywhere) {
  for (double mu = 0.5; mu < 20.0; mu += 0.37) EXPECT_NEAR(JndLr(mu) / mu, 0.01, 1e-11);
}

TEST(JndModeTest, Parse) {
  EXPECT_EQ(ParseJndMode("relative"), JndMode::kRelative);
  EXPECT_EQ(ParseJndMode("absolute"), JndMode::kAbsolute);
  EXPECT_STREQ(ToString(JndMode::kAbsolute), "absolute");
  EXPECT_THROW(ParseJndMode("percent"), InputError);
}

TEST(ClusterPathTest, HandTrace) {
  const ClusterMap map = ClusterPath(Samples({2.00, 2.01, 2.02, 2.10}));
  EXPECT_EQ(Ranges(map), (std::vector<std::pair<size_t, size_t>>{{0, 3}, {3, 4}}));
  EXPECT_EQ(map.clusters[0].mu_ref, 2.00);
  EXPECT_NEAR(map.clusters[0].mu_mean, 2.01, 1e-12);
  EXPECT_NEAR(map.clusters[0].jnd_rel, 0.01, 1e-12);
  EXPECT_EQ(map.clusters[1].mu_ref, 2.10);
  EXPECT_EQ(map.ClusterOf(2), 0u);
  EXPECT_EQ(map.ClusterOf(3), 1u);
  EXPECT_THROW(map.ClusterOf(4), InputError);
}

TEST(ClusterPathTest, ConstantSequenceIsOneCluster) {
  for (size_t n : {1u, 2u, 100u}) {
    const ClusterMap map = ClusterPath(Samples(std::vector<double>(n, 3.7)));
    ASSERT_EQ(map.clusters.size(), 1u);
    EXPECT_EQ(map.NumSamples(), n);
  }
}

TEST(ClusterPathTest, Errors) {
  EXPECT_THROW(ClusterPath(Samples({})), InputError);
  EXPECT_THROW(ClusterPath(Samples({2.0, 0.0})), InputError);
}

TEST(ClusterPathTest, AbsoluteMode) {
  // 1% of 4 m would admit 4.03; the absolute 0.02 m does not.
  ClusterOptions opts;
  opts.mode = JndMode::kAbsolute;
  EXPECT_EQ(ClusterPath(Samples({4.0, 4.03}), {}, opts).clusters.size(), 2u);
  EXPECT_EQ(ClusterPath(Samples({4.0, 4.03})).clusters.size(), 1u);
}

TEST(ClusterPathTest, RunningMeanReference) {
  // 2.025 is 0.025 from the first member but 0.0108 from the mean 2.01425.
  const std::vector<double> mu{2.0, 2.019, 2.019, 2.019, 2.025};
  EXPECT_EQ(ClusterPath(Samples(mu)).clusters.size(), 2u);
  ClusterOptions opts;
  opts.running_mean_reference = true;
  const ClusterMap map = ClusterPath(Samples(mu), {}, opts);
  EXPECT_EQ(map.clusters.size(), 1u);
  EXPECT_EQ(map.clusters[0].mu_ref, 2.0);
}

TEST(ClusterPathTest, PartitionAndThresholdProperties) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> step(-0.03, 0.03);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> mu{2.0 + trial * 0.01};
    for (int i = 1; i < 80; ++i) mu.push_back(mu.back() * (1.0 + step(rng) * (i % 9 ? 0.2 : 1)));
    const ClusterMap map = ClusterPath(Samples(mu));
    size_t expected = 0;
    for (const Cluster& c : map.clusters) {
      ASSERT_EQ(c.begin, expected);
      ASSERT_GT(c.end, c.begin);
      expected = c.end;
      EXPECT_EQ(c.mu_ref, mu[c.begin]);
      for (size_t i = c.begin; i < c.end; ++i) {
        EXPECT_LE(std::abs(mu[i] - c.mu_ref) / c.mu_ref, 0.01 + 1e-12);
      }
    }
    EXPECT_EQ(expected, mu.size());
    const ClusterMap again = ClusterPath(Samples(mu));
    EXPECT_EQ(Ranges(map), Ranges(again));
  }
}

// On monotone sequences the greedy pass is optimal, so a tighter JND can
// only add clusters.
TEST(ClusterPathTest, TighterJndNeverMergesOnMonotonePaths) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> step(0.0, 0.008);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> mu{2.0};
    for (int i = 1; i < 60; ++i) mu.push_back(mu.back() * (1.0 + step(rng)));
    if (trial % 2) std::reverse(mu.begin(), mu.end());
    size_t previous = 0;
    for (double c = 0.0; c <= 0.029; c += 0.001) {
      PReverbConstants k;
      k.offset_c = c;
      const size_t n = ClusterPath(Samples(mu), k).clusters.size();
      EXPECT_GE(n, previous) << "trial " << trial << " offset " << c;
      previous = n;
    }
  }
}

// Without monotonicity the property does not hold for a greedy pass.
TEST(ClusterPathTest, TighterJndCanMergeOnGeneralPaths) {
  const std::vector<double> mu{1.08466, 1.09044, 1.05373, 1.03309, 1.07198};
  // Relative JND is jnd_er_abs / mu_ref - offset_c = 0.03 - offset_c.
  PReverbConstants loose;
  loose.offset_c = -0.0035;  // 3.35%
  PReverbConstants tight;
  tight.offset_c = 0.0037;  // 2.63%
  EXPECT_GT(tight.offset_c, loose.offset_c);
  EXPECT_EQ(ClusterPath(Samples(mu), loose).clusters.size(), 3u);
  EXPECT_EQ(ClusterPath(Samples(mu), tight).clusters.size(), 2u);
}

TEST(ClusterCsvTest, Format) {
  const auto samples = Samples({2.0, 2.5});
  const std::string csv = ClusterCsv(samples, ClusterPath(samples));
  std::istringstream in(csv);
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  EXPECT_EQ(header, "sample_index,x,y,z,mu,cluster_id");
  EXPECT_EQ(row0.substr(0, 2), "0,");
  EXPECT_EQ(row1.back(), '1');
}

}  // namespace
}  // namespace preverb
