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


// Experiment orchestration: data points for both tasks, stratified folds,
// nested cross-validation with a joint search over model hyperparameters,
// EDA settings and n-gram modes, and the four experiment protocols.

#ifndef CIVILITY_HARNESS_H_
#define CIVILITY_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "civility/augment.h"
#include "civility/backend_client.h"
#include "civility/balance.h"
#include "civility/classifiers.h"
#include "civility/corpus.h"
#include "civility/features.h"
#include "civility/metrics.h"
#include "civility/preprocess.h"
#include "json.hpp"

namespace civility {

// A message (CT1) or a labeled sentence of a tone-bearing message (CT2).
struct DataPoint {
  std::string id;  // "<platform>:<thread>:<message>[#<sentence>]", unique
  std::string thread_id;
  Platform platform = Platform::kCodeReview;
  std::string text;      // cleaned, never stemmed
  std::string previous;  // cleaned text of the preceding message; empty for the first
  std::vector<double> conversational;  // unscaled, ConversationalFeatureNames order
  Label label = 0;
  std::vector<std::string> tbdfs;
};

// "non_tone_bearing" / "tone_bearing" for CT1, "civil" / "uncivil" for CT2.
std::string LabelName(Task task, Label label);
// Throws ContractError for names outside the task's label set.
Label ParseLabelName(Task task, std::string_view name);

std::vector<DataPoint> BuildDataset(const std::vector<Thread>& corpus, Task task,
                                    const RoleResolver& roles);

// Separator between the previous message and the current text.
inline constexpr std::string_view kContextSeparator = "\n";
std::string WithContext(const DataPoint& point);

// Per class: shuffle, then deal round-robin, continuing across classes so
// fold sizes differ by at most one. Throws StratificationError when a class
// has fewer members than `k` (some fold would miss it).
std::vector<std::vector<std::size_t>> StratifiedFolds(std::span<const Label> labels, int k,
                                                      uint64_t seed);

struct Resources {
  SynonymLexicon lexicon;
  StopwordSet stopwords = DefaultStopwords();
};

struct PipelineSetting {
  HyperParams hyperparams = HyperParams::object();
  EdaConfig eda;
  NgramMode ngram = NgramMode::kUniBi;

  // Canonical form; equal keys mean equal settings.
  std::string Key() const;
  nlohmann::json ToJson() const;
  static PipelineSetting FromJson(const nlohmann::json& j);
};

struct SearchSpace {
  std::vector<HyperParams> hyperparams;
  std::vector<EdaConfig> eda = DefaultEdaGrid();
  std::vector<NgramMode> ngram = {NgramMode::kUni, NgramMode::kUniBi};

  std::size_t size() const { return hyperparams.size() * eda.size() * ngram.size(); }
};

// What one fit saw, reported to an observer for auditing. The pointers are
// valid only during the callback.
struct FitTrace {
  int outer_fold = 0;
  int inner_fold = -1;  // -1 for the refit on the whole outer training part
  const std::vector<std::string>* fit_ids = nullptr;
  const std::vector<std::string>* eval_ids = nullptr;
  const VocabularyModel* vocabulary = nullptr;  // null for the backend arm
  const SparseMatrix* eval_features = nullptr;  // null for the backend arm
};
// May be invoked concurrently from worker threads.
using FitObserver = std::function<void(const FitTrace&)>;

struct ExperimentOptions {
  Task task = Task::kCt1;
  int outer_folds = 5;
  int inner_folds = 5;
  uint64_t seed = 0;
  bool use_context = false;  // RQ2 input: previous message + separator + text
  int threads = 1;
  int k_neighbors = 5;
  SmoteVariant smote_variant = SmoteVariant::kOversampleOnly;
  EdaComposition eda_composition = EdaComposition::kPerOperation;
  int backend_trials = 50;
  FitObserver observer;
};

// The transformer arm's name in condition ids.
inline constexpr std::string_view kBackendArm = "bert";

struct FoldOutcome {
  int fold = 0;
  PipelineSetting setting;
  double inner_nmcc = 0.0;  // mean inner-validation nMCC of the chosen setting
  EvalReport report;
  std::vector<std::size_t> test_indices;
  std::vector<Label> predictions;
};

struct ConditionResult {
  std::string id;     // "<arm>+<balance>"
  std::string arm;    // classifier name or kBackendArm
  BalanceKind balance = BalanceKind::kNone;
  std::size_t grid_size = 0;
  std::vector<FoldOutcome> folds;
  EvalReport mean;  // unweighted mean over outer folds

  nlohmann::json ToJson() const;
  static ConditionResult FromJson(const nlohmann::json& j);
};

std::string ConditionId(std::string_view arm, BalanceKind balance);

// A trained classical pipeline: vocabulary and scaler fitted on the training
// records (plus their augmentations), then the classifier.
class FittedPipeline {
 public:
  static FittedPipeline Fit(std::span<const DataPoint> data, std::span<const std::size_t> train,
                            ClassifierKind kind, BalanceKind balance,
                            const PipelineSetting& setting, const Resources& resources,
                            const ExperimentOptions& options, uint64_t seed);

  std::vector<Label> Predict(std::span<const DataPoint> data,
                             std::span<const std::size_t> rows) const;

  const VocabularyModel& vocabulary() const { return vocabulary_; }
  const TrainedModel& model() const { return model_; }
  const std::vector<std::string>& fit_ids() const { return fit_ids_; }

 private:
  FittedPipeline(VocabularyModel vocabulary, ConversationalScaler scaler, TrainedModel model,
                 std::vector<std::string> fit_ids, bool use_context, StopwordSet stopwords);

  VocabularyModel vocabulary_;
  ConversationalScaler scaler_;
  TrainedModel model_;
  std::vector<std::string> fit_ids_;
  bool use_context_;
  StopwordSet stopwords_;
};

// Nested cross-validation of one classical condition. The outer folds depend
// only on the seed and labels, so every condition sees the same partition.
ConditionResult NestedCv(std::span<const DataPoint> data, ClassifierKind kind,
                         BalanceKind balance, const SearchSpace& space,
                         const Resources& resources, const ExperimentOptions& options);

// The transformer arm: per outer fold the EDA setting is picked on a
// stratified validation slice, then the backend is retrained on the whole
// training part (it runs its own hyperparameter search internally).
ConditionResult BackendCv(std::span<const DataPoint> data, BalanceKind balance,
                          const std::vector<EdaConfig>& eda_grid, const Resources& resources,
                          const ExperimentOptions& options, BackendClient& backend);

// Outer cross-validation with a fixed setting (no inner search).
ConditionResult FixedCv(std::span<const DataPoint> data, std::string_view arm,
                        BalanceKind balance, const PipelineSetting& setting,
                        const Resources& resources, const ExperimentOptions& options,
                        BackendClient* backend);

// ---------------------------------------------------------------------------
// Setting selection across folds.

struct FoldChoice {
  std::string key;
  double nmcc = 0.0;
};

// Index of the fold whose setting is picked: the most frequent setting; on a
// frequency tie, the setting of the single fold with the highest nMCC among
// the tied settings.
std::size_t SelectMostFrequent(std::span<const FoldChoice> folds);
PipelineSetting MostFrequentSetting(const ConditionResult& result);

// Highest mean nMCC (first on ties). With prefer_arm set, only that arm's
// conditions compete when any exist.
const ConditionResult& BestCondition(const std::vector<ConditionResult>& results,
                                     std::optional<std::string_view> prefer_arm = {});

// ---------------------------------------------------------------------------
// Protocols.

struct ConditionSpec {
  std::string arm;
  BalanceKind balance = BalanceKind::kNone;
};

// Classical arms x `classical_balances`, then the backend arm x {none,
// random_over, random_under} when a backend is present.
std::vector<ConditionSpec> Rq1Conditions(const std::vector<ClassifierKind>& classifiers,
                                         const std::vector<BalanceKind>& classical_balances,
                                         bool with_backend);

struct DeltaRow {
  std::string metric;
  double rq1 = 0.0;
  double rq2 = 0.0;
  double delta = 0.0;
};

struct Rq2Report {
  std::string condition_id;
  PipelineSetting setting;
  std::string separator{kContextSeparator};
  EvalReport rq1;
  EvalReport rq2;
  std::vector<DeltaRow> rows;

  nlohmann::json ToJson() const;
};

// One row per MetricTable entry, delta = rq2 - rq1.
Rq2Report DeltaReport(std::string condition_id, PipelineSetting setting, const EvalReport& rq1,
                      const EvalReport& rq2);

struct Rq3Result {
  std::string arm;
  BalanceKind balance = BalanceKind::kNone;
  Platform train_platform = Platform::kCodeReview;
  Platform test_platform = Platform::kIssues;
  PipelineSetting setting;
  EvalReport report;

  nlohmann::json ToJson() const;
};

// Trains each arm's best RQ1 condition (setting by SelectMostFrequent) on
// the whole training platform and tests it on the other platform.
std::vector<Rq3Result> RunRq3Direction(std::span<const DataPoint> train,
                                       const std::vector<ConditionResult>& train_rq1,
                                       std::span<const DataPoint> test,
                                       const Resources& resources,
                                       const ExperimentOptions& options,
                                       BackendClient* backend);

struct Rq4Row {
  std::string tbdf;
  std::string classifier;
  std::size_t misclassified = 0;
  std::size_t total = 0;
  double percent = 0.0;
};

struct Rq4Report {
  std::vector<Rq4Row> rows;
  std::vector<std::string> notes;

  nlohmann::json ToJson() const;
  void WriteCsv(std::ostream& out) const;
};

// For each classifier and TBDF: 100 * misclassified / total over the test
// points carrying the TBDF, from outer-fold predictions. TBDFs of `names`
// absent from every test fold are omitted with a note.
Rq4Report ComputeRq4(
    std::span<const DataPoint> data,
    const std::vector<std::pair<std::string, std::vector<FoldOutcome>>>& per_classifier,
    const std::vector<std::string>& names);

// ComputeRq4 over each arm's best RQ1 condition.
Rq4Report RunRq4(std::span<const DataPoint> data, const std::vector<ConditionResult>& rq1,
                 const std::vector<std::string>& names);

// ---------------------------------------------------------------------------
// Run configuration.

struct DatasetSpec {
  std::string path;
  Platform platform = Platform::kCodeReview;
  std::string maintainers;  // optional maintainers file
};

struct RunConfig {
  Task task = Task::kCt1;
  std::vector<DatasetSpec> datasets;
  std::string tbdf_mapping;  // empty: bundled default
  CleanConfig clean;
  std::string lexicon;    // empty: bundled lexicon
  std::string stopwords;  // empty: bundled list
  std::vector<ClassifierKind> classifiers = AllClassifierKinds();
  std::vector<BalanceKind> balances = {BalanceKind::kRandomOver, BalanceKind::kRandomUnder,
                                       BalanceKind::kSmote};
  std::map<std::string, std::vector<HyperParams>> grids;  // overrides DefaultGrid
  std::vector<EdaConfig> eda_grid = DefaultEdaGrid();
  EdaComposition eda_composition = EdaComposition::kPerOperation;
  std::vector<NgramMode> ngram_modes = {NgramMode::kUni, NgramMode::kUniBi};
  int outer_folds = 5;
  int inner_folds = 5;
  uint64_t seed = 42;
  int k_neighbors = 5;
  SmoteVariant smote_variant = SmoteVariant::kOversampleOnly;
  int threads = 0;  // 0: hardware concurrency
  std::string backend_command;
  int backend_trials = 50;
  int backend_timeout_seconds = 6 * 3600;
  std::string output_dir = "out";

  // Throws ContractError on invalid values.
  void Validate() const;
  static RunConfig FromJson(const nlohmann::json& j);
  static RunConfig Load(const std::string& path);
  nlohmann::json ToJson() const;

  SearchSpace SpaceFor(ClassifierKind kind) const;
  ExperimentOptions Options() const;
};

Resources LoadResources(const RunConfig& config);
LoadOptions CorpusOptions(const RunConfig& config);
std::vector<Thread> LoadDatasetCorpus(const RunConfig& config, const DatasetSpec& dataset);
std::vector<DataPoint> LoadDataset(const RunConfig& config, const DatasetSpec& dataset);

// Runs every RQ1 condition on one dataset.
std::vector<ConditionResult> RunRq1(std::span<const DataPoint> data, const RunConfig& config,
                                    const Resources& resources, BackendClient* backend);

// Reruns the best RQ1 condition (the backend's when present) with context.
Rq2Report RunRq2(std::span<const DataPoint> data, const std::vector<ConditionResult>& rq1,
                 const RunConfig& config, const Resources& resources, BackendClient* backend);

// CSV: one row per condition x fold x class plus mean rows.
void WriteConditionCsv(std::ostream& out, const std::vector<ConditionResult>& results,
                       Task task);
nlohmann::json ConditionsToJson(const std::vector<ConditionResult>& results);
std::vector<ConditionResult> ConditionsFromJson(const nlohmann::json& j);

}  // namespace civility

#endif  // CIVILITY_HARNESS_H_
