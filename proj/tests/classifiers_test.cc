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

#include "civility/classifiers.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "civility/errors.h"
#include "civility/features.h"
#include "civility/preprocess.h"
#include "civility/rng.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace civility {
namespace {

using json = nlohmann::json;

SparseMatrix Dense(const std::vector<std::vector<double>>& rows) {
  SparseMatrix m;
  m.cols = rows.empty() ? 0 : rows[0].size();
  for (const auto& r : rows) m.rows.push_back(SparseVector::FromDense(r));
  return m;
}

double Accuracy(const std::vector<Label>& a, const std::vector<Label>& b) {
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

// TF-IDF rows for the desk corpus' messages.
struct DeskMatrix {
  SparseMatrix x;
  std::vector<Label> y;
};

const DeskMatrix& Desk() {
  static const DeskMatrix* desk = [] {
    auto data = testing::DeskDataset(Task::kCt1);
    std::vector<std::vector<std::string>> docs;
    for (const DataPoint& p : data) docs.push_back(NormalizeForClassical(p.text));
    VocabularyModel v = VocabularyModel::Fit(docs, NgramMode::kUniBi);
    auto* d = new DeskMatrix;
    d->x.cols = v.size();
    for (std::size_t i = 0; i < data.size(); ++i) {
      d->x.rows.push_back(v.Transform(docs[i]));
      d->y.push_back(data[i].label);
    }
    return d;
  }();
  return *desk;
}

// Linearly separable 2-D toy set: label 1 iff x + y > 1.
std::pair<SparseMatrix, std::vector<Label>> Separable(uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<Label> y;
  while (rows.size() < 60) {
    double a = rng.Uniform() * 2, b = rng.Uniform() * 2;
    if (std::abs(a + b - 1) < 0.2) continue;  // keep a margin
    rows.push_back({a, b});
    y.push_back(a + b > 1 ? 1 : 0);
  }
  return {Dense(rows), y};
}

TEST(KnnTest, NearestNeighborExample) {
  SparseMatrix x = Dense({{0, 0}, {1, 1}});
  TrainedModel m = Train({ClassifierKind::kKnn, {{"k", 1}, {"weights", "uniform"}}, 0}, x,
                         std::vector<Label>{1, 0});
  EXPECT_EQ(m.Predict(Dense({{0.1, 0.1}})), (std::vector<Label>{1}));
  EXPECT_EQ(m.Predict(x), (std::vector<Label>{1, 0}));
}

TEST(KnnTest, OneNearestNeighborReproducesTrainingLabels) {
  auto [x, y] = Separable(3);
  for (const char* weights : {"uniform", "distance"}) {
    TrainedModel m = Train({ClassifierKind::kKnn, {{"k", 1}, {"weights", weights}}, 0}, x, y);
    EXPECT_EQ(m.Predict(x), y);
  }
}

TEST(KnnTest, TieGoesToNearestNeighbor) {
  // k = 2 with one neighbor of each class: the closer one decides.
  SparseMatrix x = Dense({{0, 0}, {3, 0}});
  TrainedModel m = Train({ClassifierKind::kKnn, {{"k", 2}, {"weights", "uniform"}}, 0}, x,
                         std::vector<Label>{0, 1});
  EXPECT_EQ(m.Predict(Dense({{1, 0}, {2, 0}})), (std::vector<Label>{0, 1}));
}

TEST(NaiveBayesTest, HandComputedPosterior) {
  // Columns: bad, good. "good good" -> civil (1), "bad" -> uncivil (0).
  SparseMatrix x = Dense({{0, 2}, {1, 0}});
  TrainedModel m = Train({ClassifierKind::kMultinomialNb, {{"alpha", 1.0}}, 0}, x,
                         std::vector<Label>{1, 0});
  // P(civil) P(good | civil) = 1/2 * 3/4; P(uncivil) P(good | uncivil) = 1/2 * 1/3.
  SparseMatrix query = Dense({{0, 1}});
  EXPECT_EQ(m.Predict(query), (std::vector<Label>{1}));
  EXPECT_NEAR(m.Scores(query)[0], std::log((0.5 * 0.75) / (0.5 / 3.0)), 1e-12);
  EXPECT_EQ(m.Predict(Dense({{1, 0}})), (std::vector<Label>{0}));
}

TEST(NaiveBayesTest, RejectsNegativeFeatures) {
  SparseMatrix x = Dense({{-1, 2}, {1, 0}});
  EXPECT_THROW(Train({ClassifierKind::kMultinomialNb, {{"alpha", 1.0}}, 0}, x,
                     std::vector<Label>{1, 0}),
               ContractError);
}

TEST(LogisticRegressionTest, SeparableToySetIsFitPerfectly) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    auto [x, y] = Separable(seed);
    TrainedModel m =
        Train({ClassifierKind::kLogisticRegression, {{"C", 10.0}, {"penalty", "l2"}}, 0}, x, y);
    EXPECT_EQ(Accuracy(m.Predict(x), y), 1.0) << seed;
  }
}

TEST(SvmTest, SeparableToySet) {
  auto [x, y] = Separable(7);
  for (const char* kernel : {"linear", "rbf"}) {
    TrainedModel m = Train({ClassifierKind::kSvm, {{"C", 10.0}, {"kernel", kernel}}, 0}, x, y);
    EXPECT_GE(Accuracy(m.Predict(x), y), 0.95) << kernel;
  }
}

TEST(RandomForestTest, PredictionIsMajorityOfTreeVotes) {
  auto [x, y] = Separable(11);
  TrainedModel m = Train(
      {ClassifierKind::kRandomForest, {{"n_estimators", 3}, {"max_depth", 3}}, 5}, x, y);
  const auto& forest = dynamic_cast<const RandomForestModel&>(m.impl());
  ASSERT_EQ(forest.tree_count(), 3u);
  Rng rng(2);
  SparseMatrix queries;
  queries.cols = 2;
  for (int i = 0; i < 300; ++i) {
    queries.rows.push_back(
        SparseVector::FromDense(std::vector<double>{rng.Uniform() * 2, rng.Uniform() * 2}));
  }
  std::vector<Label> predicted = m.Predict(queries);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    std::vector<Label> votes = forest.TreeVotes(queries.rows[i]);
    ASSERT_EQ(votes.size(), 3u);
    int ones = static_cast<int>(std::count(votes.begin(), votes.end(), 1));
    EXPECT_EQ(predicted[i], ones >= 2 ? 1 : 0);
  }
}

TEST(CartTest, DepthLimitedTreeStillSplits) {
  auto [x, y] = Separable(13);
  TrainedModel m =
      Train({ClassifierKind::kCart, {{"max_depth", nullptr}, {"min_samples_split", 2}}, 0}, x, y);
  EXPECT_EQ(Accuracy(m.Predict(x), y), 1.0);
}

json DeskParams(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kCart:
      return {{"max_depth", nullptr}, {"min_samples_split", 2}};
    case ClassifierKind::kKnn:
      return {{"k", 3}, {"weights", "distance"}};
    case ClassifierKind::kLogisticRegression:
      return {{"C", 10.0}, {"penalty", "l2"}};
    case ClassifierKind::kMultinomialNb:
      return {{"alpha", 0.1}};
    case ClassifierKind::kRandomForest:
      return {{"n_estimators", 100}, {"max_depth", nullptr}};
    case ClassifierKind::kSvm:
      return {{"C", 10.0}, {"kernel", "linear"}};
  }
  return {};
}

TEST(ClassifiersTest, EveryKindFitsTheDeskCorpus) {
  const DeskMatrix& d = Desk();
  for (ClassifierKind kind : AllClassifierKinds()) {
    TrainedModel m = Train({kind, DeskParams(kind), 1}, d.x, d.y);
    EXPECT_GE(Accuracy(m.Predict(d.x), d.y), 0.95) << ToString(kind);
  }
  TrainedModel rbf = Train({ClassifierKind::kSvm, {{"C", 10.0}, {"kernel", "rbf"}}, 1}, d.x, d.y);
  EXPECT_GE(Accuracy(rbf.Predict(d.x), d.y), 0.95);
}

TEST(ClassifiersTest, DeterministicAndSerializable) {
  const DeskMatrix& d = Desk();
  for (ClassifierKind kind : AllClassifierKinds()) {
    ClassifierSpec spec{kind, DefaultGrid(kind).front(), 9};
    TrainedModel a = Train(spec, d.x, d.y);
    TrainedModel b = Train(spec, d.x, d.y);
    EXPECT_EQ(a.Predict(d.x), b.Predict(d.x)) << ToString(kind);
    TrainedModel back = TrainedModel::FromJson(a.ToJson());
    EXPECT_EQ(back.Predict(d.x), a.Predict(d.x)) << ToString(kind);
    EXPECT_EQ(back.Scores(d.x), a.Scores(d.x)) << ToString(kind);
    EXPECT_EQ(back.kind(), kind);
  }
}

TEST(ClassifiersTest, TrainPreconditions) {
  SparseMatrix x = Dense({{0, 1}, {1, 0}, {1, 1}});
  ClassifierSpec spec{ClassifierKind::kLogisticRegression, {{"C", 1.0}}, 0};
  EXPECT_THROW(Train(spec, x, std::vector<Label>{1, 1, 1}), ContractError);
  EXPECT_THROW(Train(spec, x, std::vector<Label>{1, 0}), ContractError);
  EXPECT_THROW(Train(spec, Dense({{0, 1}}), std::vector<Label>{1}), ContractError);
  SparseMatrix bad = Dense({{0, 1}, {1, 0}});
  bad.rows[0].values[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Train(spec, bad, std::vector<Label>{1, 0}), ContractError);
  SparseMatrix inf = Dense({{0, 1}, {1, 0}});
  inf.rows[1].values[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Train(spec, inf, std::vector<Label>{1, 0}), ContractError);
  EXPECT_THROW(Train(spec, x, std::vector<Label>{1, 0, 2}), ContractError);
}

TEST(ClassifiersTest, PredictChecksDimension) {
  SparseMatrix x = Dense({{0, 1}, {1, 0}});
  TrainedModel m = Train({ClassifierKind::kMultinomialNb, {{"alpha", 1.0}}, 0}, x,
                         std::vector<Label>{1, 0});
  SparseMatrix wide = Dense({{0, 1, 0}});
  EXPECT_THROW(m.Predict(wide), ContractError);
  SparseMatrix empty;
  empty.cols = 2;
  EXPECT_TRUE(m.Predict(empty).empty());
}

TEST(GridTest, DocumentedDefaults) {
  EXPECT_EQ(DefaultGrid(ClassifierKind::kCart).size(), 8u);
  EXPECT_EQ(DefaultGrid(ClassifierKind::kKnn).size(), 8u);
  EXPECT_EQ(DefaultGrid(ClassifierKind::kLogisticRegression).size(), 4u);
  EXPECT_EQ(DefaultGrid(ClassifierKind::kMultinomialNb).size(), 3u);
  EXPECT_EQ(DefaultGrid(ClassifierKind::kRandomForest).size(), 6u);
  EXPECT_EQ(DefaultGrid(ClassifierKind::kSvm).size(), 6u);
  for (ClassifierKind kind : AllClassifierKinds()) {
    auto grid = DefaultGrid(kind);
    EXPECT_GE(grid.size(), 2u);
    for (const HyperParams& h : grid) {
      EXPECT_NO_THROW((ClassifierSpec{kind, h, 0}.Validate()));
      EXPECT_EQ(json::parse(h.dump()), h);
    }
    EXPECT_EQ(ParseClassifierKind(ToString(kind)), kind);
  }
  EXPECT_THROW((ClassifierSpec{ClassifierKind::kKnn, {{"depth", 3}}, 0}.Validate()), ContractError);
  EXPECT_THROW(ParseClassifierKind("xgboost"), Error);
}

}  // namespace
}  // namespace civility
