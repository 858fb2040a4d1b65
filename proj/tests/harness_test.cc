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

#include <algorithm>
#include <map>
#include <set>

#include "civility/errors.h"
#include "civility/harness.h"
#include "civility/rng.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace civility {
namespace {

std::vector<Label> RandomLabels(std::size_t n, double rate, uint64_t seed) {
  Rng rng(seed);
  std::vector<Label> y(n);
  for (auto& v : y) v = rng.Bernoulli(rate) ? 1 : 0;
  return y;
}

std::vector<Label> LabelsOf(const std::vector<DataPoint>& data) {
  std::vector<Label> y;
  for (const DataPoint& p : data) y.push_back(p.label);
  return y;
}

TEST(StratifiedFoldsTest, PartitionsWithBalancedClasses) {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed + 1000);
    std::size_t n = 10 + rng.Below(400);
    int k = 2 + static_cast<int>(rng.Below(9));
    auto y = RandomLabels(n, 0.05 + 0.9 * rng.Uniform(), seed);
    std::size_t ones = std::count(y.begin(), y.end(), 1);
    if (ones < static_cast<std::size_t>(k) || n - ones < static_cast<std::size_t>(k)) {
      EXPECT_THROW(StratifiedFolds(y, k, seed), StratificationError);
      continue;
    }
    auto folds = StratifiedFolds(y, k, seed);
    ASSERT_EQ(folds.size(), static_cast<std::size_t>(k));
    EXPECT_EQ(testing::CheckStratifiedPartition(folds, y), "") << "seed " << seed;
    std::size_t lo = n, hi = 0;
    for (const auto& f : folds) {
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
    }
    EXPECT_LE(hi - lo, 1u);
    EXPECT_EQ(folds, StratifiedFolds(y, k, seed));
  }
}

TEST(StratifiedFoldsTest, TooFewMembersOfAClass) {
  std::vector<Label> y = {1, 1, 1, 1, 1, 0, 0};
  EXPECT_THROW(StratifiedFolds(y, 3, 0), StratificationError);
  EXPECT_NO_THROW(StratifiedFolds(y, 2, 0));
  EXPECT_THROW(StratifiedFolds(y, 1, 0), ContractError);
}

TEST(BuildDatasetTest, ExampleCorpus) {
  auto corpus =
      LoadCorpus(std::string(CIVILITY_DATA_DIR) + "/example_corpus.jsonl", Platform::kCodeReview);
  RoleResolver roles = RoleResolver::FromRecords(corpus);
  auto ct1 = BuildDataset(corpus, Task::kCt1, roles);
  ASSERT_EQ(ct1.size(), 3u);
  EXPECT_EQ(ct1[0].id, "code_review:t1:t1-0");
  EXPECT_EQ(LabelsOf(ct1), (std::vector<Label>{1, 0, 0}));
  EXPECT_TRUE(ct1[0].previous.empty());
  EXPECT_EQ(ct1[2].previous, ct1[1].text);
  EXPECT_EQ(ct1[1].conversational.size(), ConversationalFeatureNames(Task::kCt1).size());

  auto ct2 = BuildDataset(corpus, Task::kCt2, roles);
  ASSERT_EQ(ct2.size(), 3u);
  EXPECT_EQ(ct2[0].id, "code_review:t1:t1-1#0");
  EXPECT_EQ(ct2[0].text, "This is a lazy hack.");
  EXPECT_EQ(LabelsOf(ct2), (std::vector<Label>{0, 1, 1}));
  EXPECT_EQ(ct2[0].tbdfs, (std::vector<std::string>{"mocking"}));
  EXPECT_EQ(ct2[2].previous, ct1[1].text);
  EXPECT_EQ(ct2[0].conversational.size(), ConversationalFeatureNames(Task::kCt2).size());

  EXPECT_EQ(WithContext(ct1[0]), ct1[0].text);
  EXPECT_EQ(WithContext(ct2[2]), ct1[1].text + "\n" + ct2[2].text);
  EXPECT_EQ(LabelName(Task::kCt2, 0), "uncivil");
  EXPECT_EQ(ParseLabelName(Task::kCt1, "tone_bearing"), 0);
  EXPECT_THROW(ParseLabelName(Task::kCt1, "civil"), ContractError);
}

SearchSpace SmallSpace(ClassifierKind kind) {
  SearchSpace s;
  auto grid = DefaultGrid(kind);
  s.hyperparams = {grid.front(), grid.back()};
  EdaConfig a, b;
  a.n_aug = 1;
  b.n_aug = 2;
  b.alpha = 0.2;
  s.eda = {a, b};
  return s;
}

ExperimentOptions SmallOptions(uint64_t seed) {
  ExperimentOptions o;
  o.outer_folds = 5;
  o.inner_folds = 3;
  o.seed = seed;
  return o;
}

TEST(NestedCvTest, NoLeakageAndInnerFoldsPartitionOuterTraining) {
  auto data = testing::SyntheticRecords(150, 0.35, 21);
  Resources resources;
  resources.lexicon = SynonymLexicon::LoadFile(std::string(CIVILITY_DATA_DIR) + "/lexicon.json");
  for (BalanceKind balance : {BalanceKind::kRandomOver, BalanceKind::kSmote}) {
    testing::LeakageAudit audit(data);
    ExperimentOptions o = SmallOptions(4);
    o.observer = audit.Observer();
    SearchSpace space = SmallSpace(ClassifierKind::kLogisticRegression);
    ConditionResult r = NestedCv(data, ClassifierKind::kLogisticRegression, balance, space,
                                 resources, o);
    EXPECT_TRUE(audit.violations().empty()) << audit.violations().front();
    // Hyperparameter points share the features of an (EDA, n-gram) pair, so
    // each inner fold reports one fit per pair, plus one refit per outer fold.
    EXPECT_EQ(audit.fits(), 5u * (3u * space.eda.size() * space.ngram.size() + 1u));
    EXPECT_GT(audit.sentinel_hits(), 0u);
    ASSERT_EQ(r.folds.size(), 5u);
    EXPECT_EQ(r.grid_size, space.size());
    EXPECT_EQ(r.id, ConditionId("lr", balance));

    std::set<std::string> tested;
    for (const FoldOutcome& f : r.folds) {
      std::set<std::string> outer_test;
      for (std::size_t i : f.test_indices) outer_test.insert(data[i].id);
      EXPECT_EQ(audit.eval_sets().at({f.fold, -1}), outer_test);
      tested.insert(outer_test.begin(), outer_test.end());
      // The inner evaluation sets partition the outer training part.
      std::set<std::string> inner_union;
      std::size_t inner_total = 0;
      for (int j = 0; j < 3; ++j) {
        const auto& s = audit.eval_sets().at({f.fold, j});
        inner_total += s.size();
        inner_union.insert(s.begin(), s.end());
      }
      EXPECT_EQ(inner_total, inner_union.size());
      EXPECT_EQ(inner_union.size() + outer_test.size(), data.size());
      for (const std::string& id : inner_union) EXPECT_FALSE(outer_test.count(id));
    }
    EXPECT_EQ(tested.size(), data.size());
  }
}

TEST(NestedCvTest, DeterministicForASeed) {
  auto data = testing::SyntheticRecords(90, 0.4, 8);
  Resources resources;
  SearchSpace space = SmallSpace(ClassifierKind::kMultinomialNb);
  auto a = NestedCv(data, ClassifierKind::kMultinomialNb, BalanceKind::kRandomUnder, space,
                    resources, SmallOptions(11));
  auto b = NestedCv(data, ClassifierKind::kMultinomialNb, BalanceKind::kRandomUnder, space,
                    resources, SmallOptions(11));
  EXPECT_EQ(a.ToJson(), b.ToJson());
  EXPECT_EQ(ConditionResult::FromJson(a.ToJson()).ToJson(), a.ToJson());
}

TEST(NestedCvTest, OuterFoldsSharedAcrossConditions) {
  auto data = testing::SyntheticRecords(90, 0.4, 8);
  Resources resources;
  auto a = NestedCv(data, ClassifierKind::kMultinomialNb, BalanceKind::kNone,
                    SmallSpace(ClassifierKind::kMultinomialNb), resources, SmallOptions(2));
  auto b = NestedCv(data, ClassifierKind::kKnn, BalanceKind::kSmote,
                    SmallSpace(ClassifierKind::kKnn), resources, SmallOptions(2));
  for (std::size_t i = 0; i < a.folds.size(); ++i) {
    EXPECT_EQ(a.folds[i].test_indices, b.folds[i].test_indices);
  }
}

TEST(NestedCvTest, LearnsThePlantedSignal) {
  auto data = testing::SyntheticRecords(150, 0.4, 31);
  Resources resources;
  auto r = NestedCv(data, ClassifierKind::kMultinomialNb, BalanceKind::kRandomOver,
                    SmallSpace(ClassifierKind::kMultinomialNb), resources, SmallOptions(5));
  EXPECT_GT(r.mean.macro_f1, 0.9);
}

TEST(FixedCvTest, UsesTheGivenSetting) {
  auto data = testing::SyntheticRecords(100, 0.4, 12);
  Resources resources;
  PipelineSetting setting;
  setting.hyperparams = {{"alpha", 0.5}};
  setting.eda.n_aug = 1;
  setting.ngram = NgramMode::kUni;
  testing::LeakageAudit audit(data);
  ExperimentOptions o = SmallOptions(3);
  o.observer = audit.Observer();
  auto r = FixedCv(data, "nb", BalanceKind::kRandomOver, setting, resources, o, nullptr);
  EXPECT_EQ(audit.fits(), 5u);
  EXPECT_TRUE(audit.violations().empty());
  for (const FoldOutcome& f : r.folds) EXPECT_EQ(f.setting.Key(), setting.Key());
  EXPECT_EQ(PipelineSetting::FromJson(setting.ToJson()).Key(), setting.Key());
  EXPECT_THROW(FixedCv(data, "bert", BalanceKind::kNone, setting, resources, o, nullptr),
               ContractError);
}

TEST(BestConditionTest, HighestMeanWithOptionalPreference) {
  std::vector<ConditionResult> rs(3);
  rs[0].arm = "nb";
  rs[0].mean.nmcc = 0.7;
  rs[1].arm = "lr";
  rs[1].mean.nmcc = 0.9;
  rs[2].arm = "bert";
  rs[2].mean.nmcc = 0.8;
  EXPECT_EQ(&BestCondition(rs), &rs[1]);
  EXPECT_EQ(&BestCondition(rs, std::string_view("bert")), &rs[2]);
  EXPECT_EQ(&BestCondition(rs, std::string_view("svm")), &rs[1]);
  rs[0].mean.nmcc = 0.9;
  EXPECT_EQ(&BestCondition(rs), &rs[0]);
  EXPECT_THROW(BestCondition({}), ContractError);
}

}  // namespace
}  // namespace civility
