// Copyright 2026 The vqaprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vqaprobe/core/random.h"

#include <cmath>
#include <set>

#include "gtest/gtest.h"
#include "vqaprobe/core/text.h"

namespace vqaprobe {
namespace {

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.Normal(0, 1), b.Normal(0, 1));
    EXPECT_EQ(a.Poisson(12.5), b.Poisson(12.5));
    EXPECT_EQ(a.Index(17), b.Index(17));
  }
}

TEST(RngTest, SampleWithoutReplacementIsDistinct) {
  Rng rng(1);
  auto picks = rng.SampleWithoutReplacement(50, 20);
  EXPECT_EQ(picks.size(), 20u);
  EXPECT_EQ(std::set<size_t>(picks.begin(), picks.end()).size(), 20u);
  EXPECT_EQ(rng.SampleWithoutReplacement(3, 10).size(), 3u);
}

TEST(RngTest, UniformMomentsMatch) {
  Rng rng(5);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(DeriveSeedTest, DistinctCoordinatesGiveDistinctSeeds) {
  std::set<uint64_t> seeds;
  for (const char* id : {"s1", "s2", "s10"}) {
    for (const char* stream : {"rob_image", "uncertainty"}) {
      for (uint64_t t = 0; t < 10; ++t) {
        seeds.insert(DeriveSeed(7, id, stream, t));
      }
    }
  }
  EXPECT_EQ(seeds.size(), 60u);
  EXPECT_EQ(DeriveSeed(7, "s1", "x", 3), DeriveSeed(7, "s1", "x", 3));
  EXPECT_NE(DeriveSeed(7, "s1", "x", 3), DeriveSeed(8, "s1", "x", 3));
  // Field boundaries matter: ("ab","c") and ("a","bc") must not collide.
  EXPECT_NE(DeriveSeed(0, "ab", "c", 0), DeriveSeed(0, "a", "bc", 0));
}

TEST(TextTest, NormalizeAnswer) {
  EXPECT_EQ(NormalizeAnswer(" Red "), "red");
  EXPECT_EQ(NormalizeAnswer("Fire \t  Hydrant\n"), "fire hydrant");
  EXPECT_EQ(NormalizeAnswer("   "), "");
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Hex64(255), "00000000000000ff");
}

}  // namespace
}  // namespace vqaprobe
