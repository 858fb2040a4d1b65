//
// Copyright 2026 The Civility Authors
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
//

#include "civility/balance.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "civility/errors.h"
#include "civility/rng.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace civility {
namespace {

using ::civility::testing::CheckSmoteGeometry;

std::vector<Label> Labels(std::size_t ones, std::size_t zeros) {
  std::vector<Label> y(ones, 1);
  y.insert(y.end(), zeros, 0);
  return y;
}

std::size_t Count(const std::vector<Label>& y, Label c) {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), c));
}

SparseMatrix Points(const std::vector<std::pair<double, double>>& xy) {
  SparseMatrix m;
  m.cols = 2;
  for (auto [x, y] : xy) m.rows.push_back(SparseVector::FromDense(std::vector<double>{x, y}));
  return m;
}

// Random 2-D clusters: `minority` points around (1, 1), `majority` around (4, 4).
std::pair<SparseMatrix, std::vector<Label>> Clusters(std::size_t majority, std::size_t minority,
                                                     uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<double, double>> xy;
  std::vector<Label> y;
  for (std::size_t i = 0; i < majority; ++i) {
    xy.emplace_back(4 + rng.Uniform() * 2, 4 + rng.Uniform() * 2);
    y.push_back(1);
  }
  for (std::size_t i = 0; i < minority; ++i) {
    xy.emplace_back(rng.Uniform() * 3, rng.Uniform() * 3);
    y.push_back(0);
  }
  return {Points(xy), y};
}

TEST(RandomOversampleTest, Counts) {
  std::vector<Label> y = Labels(10, 3);
  std::vector<std::size_t> rows = RandomOversample(y, 1);
  std::vector<Label> out;
  for (std::size_t i : rows) out.push_back(y[i]);
  EXPECT_EQ(Count(out, 1), 10u);
  EXPECT_EQ(Count(out, 0), 10u);
  // Originals first, then duplicates of minority rows.
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(rows[i], i);
  for (std::size_t i = y.size(); i < rows.size(); ++i) EXPECT_EQ(y[rows[i]], 0);
  std::vector<Label> balanced = Labels(4, 4);
  EXPECT_EQ(RandomOversample(balanced, 1).size(), 8u);
}

TEST(RandomOversampleTest, DuplicatesAreUniform) {
  const std::size_t minority = 5, draws = 10000;
  std::vector<Label> y = Labels(minority, minority + draws);
  std::vector<std::size_t> rows = RandomOversample(y, 77);
  std::map<std::size_t, double> freq;
  for (std::size_t i = y.size(); i < rows.size(); ++i) freq[rows[i]] += 1;
  ASSERT_EQ(freq.size(), minority);
  const double p = 1.0 / minority;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (auto [row, count] : freq) EXPECT_LE(std::abs(count - draws * p), 3 * sigma) << row;
}

TEST(RandomUndersampleTest, CountsAndSubset) {
  std::vector<Label> y = Labels(3, 10);
  std::vector<std::size_t> rows = RandomUndersample(y, 5);
  std::vector<Label> out;
  for (std::size_t i : rows) out.push_back(y[i]);
  EXPECT_EQ(Count(out, 1), 3u);
  EXPECT_EQ(Count(out, 0), 3u);
  std::vector<std::size_t> sorted = rows;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
  for (std::size_t i : rows) EXPECT_LT(i, y.size());
  std::vector<Label> balanced = Labels(4, 4);
  std::vector<std::size_t> same = RandomUndersample(balanced, 1);
  EXPECT_EQ(same, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST(SmoteTest, TwoPointsOnTheDiagonal) {
  SparseMatrix x = Points({{0, 0}, {2, 2}, {9, 9}, {9, 8}, {8, 9}, {8, 8}, {7, 9}});
  std::vector<Label> y = {0, 0, 1, 1, 1, 1, 1};
  SmoteResult r = Smote(x, y, 1, 3);
  EXPECT_EQ(r.k_used, 1);
  EXPECT_EQ(Count(r.labels, 0), 5u);
  EXPECT_EQ(Count(r.labels, 1), 5u);
  for (std::size_t i = r.kept.size(); i < r.features.size(); ++i) {
    double a = r.features.rows[i].At(0), b = r.features.rows[i].At(1);
    EXPECT_NEAR(a, b, 1e-12);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 2.0);
  }
}

TEST(SmoteTest, LambdaZeroReproducesBase) {
  SparseVector a = SparseVector::FromDense(std::vector<double>{1, 2});
  SparseVector b = SparseVector::FromDense(std::vector<double>{3, 0});
  EXPECT_EQ(Interpolate(a, b, 0.0), a);
  EXPECT_EQ(Interpolate(a, b, 1.0), b);
}

TEST(SmoteTest, BalancesCounts) {
  auto [x, y] = Clusters(100, 20, 1);
  SmoteResult r = Smote(x, y, 5, 2);
  EXPECT_EQ(Count(r.labels, 1), 100u);
  EXPECT_EQ(Count(r.labels, 0), 100u);
  EXPECT_EQ(r.synthetic.size(), 80u);
}

TEST(SmoteTest, SyntheticPointsAreNeighborCombinations) {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    std::size_t minority = 2 + seed % 15;
    auto [x, y] = Clusters(40, minority, seed);
    for (int k : {1, 3, 5}) {
      SmoteResult r = Smote(x, y, k, seed * 31 + k);
      EXPECT_EQ(r.k_used, std::min<int>(k, static_cast<int>(minority) - 1));
      EXPECT_EQ(CheckSmoteGeometry(x, y, r, r.k_used, 1e-9), "") << "seed " << seed << " k " << k;
      // The recorded origin agrees with the geometry.
      for (std::size_t s = 0; s < r.synthetic.size(); ++s) {
        const auto& o = r.synthetic[s];
        EXPECT_EQ(Interpolate(x.rows[o.base], x.rows[o.neighbor], o.lambda),
                  r.features.rows[r.kept.size() + s]);
        EXPECT_GE(o.lambda, 0.0);
        EXPECT_LE(o.lambda, 1.0);
      }
    }
  }
}

TEST(SmoteTest, GeometryCheckRejectsOffSegmentPoints) {
  auto [x, y] = Clusters(10, 4, 3);
  SmoteResult r = Smote(x, y, 1, 4);
  ASSERT_GT(r.synthetic.size(), 0u);
  r.features.rows.back() = SparseVector::FromDense(std::vector<double>{100, -100});
  EXPECT_NE(CheckSmoteGeometry(x, y, r, 1, 1e-9), "");
}

TEST(SmoteTest, SingleMinorityFallsBackToOversampling) {
  SparseMatrix x = Points({{0, 0}, {5, 5}, {6, 6}, {7, 7}});
  std::vector<Label> y = {0, 1, 1, 1};
  SmoteResult r = Smote(x, y, 5, 1);
  EXPECT_TRUE(r.fell_back_to_oversampling);
  EXPECT_EQ(Count(r.labels, 0), 3u);
  for (std::size_t i = r.kept.size(); i < r.features.size(); ++i) {
    EXPECT_EQ(r.features.rows[i], x.rows[0]);
  }
}

TEST(SmoteTest, MidpointVariant) {
  auto [x, y] = Clusters(100, 20, 9);
  SmoteResult r = Smote(x, y, 5, 2, SmoteVariant::kMidpointUndersample);
  EXPECT_EQ(Count(r.labels, 1), 60u);
  EXPECT_EQ(Count(r.labels, 0), 60u);
  EXPECT_EQ(CheckSmoteGeometry(x, y, r, r.k_used, 1e-9), "");
}

TEST(SmoteTest, RejectsBadInput) {
  auto [x, y] = Clusters(5, 3, 1);
  EXPECT_THROW(Smote(x, y, 0, 1), ContractError);
  std::vector<Label> shorter(y.begin(), y.end() - 1);
  EXPECT_THROW(Smote(x, shorter, 1, 1), ContractError);
}

TEST(NearestNeighborsTest, BruteForceOrder) {
  SparseMatrix x = Points({{0, 0}, {1, 0}, {0, 2}, {3, 3}, {1, 0}});
  std::vector<std::size_t> all = {0, 1, 2, 3, 4};
  // Rows 1 and 4 tie; the lower index comes first.
  EXPECT_EQ(NearestNeighbors(x, 0, all, 3), (std::vector<std::size_t>{1, 4, 2}));
  EXPECT_EQ(NearestNeighbors(x, 0, all, 10).size(), 4u);
}

TEST(ApplyBalanceTest, EveryStrategyEqualizesClasses) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    auto [x, y] = Clusters(30 + seed, 5 + seed, seed);
    for (BalanceKind kind : {BalanceKind::kRandomOver, BalanceKind::kRandomUnder, BalanceKind::kSmote}) {
      BalanceStrategy s{kind, 5, SmoteVariant::kOversampleOnly, seed};
      BalancedSet b = ApplyBalance(x, y, s);
      EXPECT_EQ(Count(b.labels, 0), Count(b.labels, 1)) << ToString(kind);
      EXPECT_EQ(b.labels.size(), b.features.size());
      EXPECT_EQ(b.origin.size(), b.features.size());
      for (std::size_t i = 0; i < b.origin.size(); ++i) EXPECT_EQ(y[b.origin[i]], b.labels[i]);
    }
    BalancedSet none = ApplyBalance(x, y, BalanceStrategy{});
    EXPECT_EQ(none.labels, y);
  }
}

TEST(ApplyBalanceTest, SameSeedSameOutput) {
  auto [x, y] = Clusters(30, 6, 2);
  BalanceStrategy s{BalanceKind::kSmote, 3, SmoteVariant::kOversampleOnly, 11};
  BalancedSet a = ApplyBalance(x, y, s);
  BalancedSet b = ApplyBalance(x, y, s);
  EXPECT_EQ(a.features.rows, b.features.rows);
}

TEST(BalanceNamesTest, RoundTrip) {
  for (BalanceKind k : {BalanceKind::kNone, BalanceKind::kRandomOver, BalanceKind::kRandomUnder,
                        BalanceKind::kSmote}) {
    EXPECT_EQ(ParseBalanceKind(ToString(k)), k);
  }
  EXPECT_THROW(ParseBalanceKind("adasyn"), Error);
  EXPECT_EQ(ParseSmoteVariant(ToString(SmoteVariant::kMidpointUndersample)),
            SmoteVariant::kMidpointUndersample);
}

}  // namespace
}  // namespace civility
