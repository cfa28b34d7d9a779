// Copyright 2026 The revlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "revlab/digest.hpp"
#include "revlab/rng.hpp"
#include "revlab/text.hpp"

namespace revlab {
namespace {

TEST(StableHash, MatchesPublishedFnv1aVectors) {
  EXPECT_EQ(stable_hash(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(stable_hash("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(stable_hash("foobar"), 0x85944171f73967e8ULL);
}

TEST(Mix64, FirstSplitMixOutputFromZero) {
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
}

TEST(DeriveSeed, KeysGiveDistinctStreams) {
  std::set<std::uint64_t> seen;
  for (const char* key : {"init", "shuffle:1", "shuffle:2", "u1", "u2", "sample"}) {
    EXPECT_TRUE(seen.insert(derive_seed(42, key)).second) << key;
  }
  EXPECT_NE(derive_seed(1, "init"), derive_seed(2, "init"));
  EXPECT_EQ(derive_seed(7, "x"), derive_seed(7, "x"));
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformBelowStaysInRangeAndCoversIt) {
  Rng r(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto x = r.uniform_below(7);
    ASSERT_LT(x, 7u);
    ++hits[x];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, Uniform01InUnitInterval) {
  Rng r(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMomentsAreStandard) {
  Rng r(11);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.01);
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Sha256, DoubleSpanHashesRawBytes) {
  const std::vector<double> v{1.0, -2.5};
  std::string bytes(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  EXPECT_EQ(sha256_hex(std::span<const double>(v)), sha256_hex(bytes));
}

TEST(Text, NormalizedTokensLowercaseAndStripEdges) {
  const auto t = text::normalized_tokens("  Great stay!  \"Lovely\" room... -- ok ");
  EXPECT_EQ(t, (std::vector<std::string>{"great", "stay", "lovely", "room", "ok"}));
}

TEST(Text, InnerPunctuationIsKept) {
  EXPECT_EQ(text::normalized_tokens("don't check-in"),
            (std::vector<std::string>{"don't", "check-in"}));
}

TEST(Text, Utf8LengthCountsCodePoints) {
  EXPECT_EQ(text::utf8_length("caf\xc3\xa9"), 4u);
  EXPECT_EQ(text::utf8_length(""), 0u);
}

TEST(Text, AsciiLowerLeavesMultibyteAlone) {
  EXPECT_EQ(text::ascii_lower("\xc3\x89T\xc3\x89"), "\xc3\x89t\xc3\x89");
}

}  // namespace
}  // namespace revlab
