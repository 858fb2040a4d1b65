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


#include "civility/harness.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "civility/errors.h"
#include "civility/rng.h"

namespace civility {
namespace {

using nlohmann::json;
using Tokens = std::vector<std::string>;

// Runs fn(0..n-1) on up to `threads` workers; rethrows the first failure.
template <typename F>
void ParallelFor(std::size_t n, int threads, F&& fn) {
  std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string InputText(const DataPoint& p, bool use_context) {
  return use_context ? WithContext(p) : p.text;
}

std::vector<Label> LabelsOf(std::span<const DataPoint> data) {
  std::vector<Label> labels;
  labels.reserve(data.size());
  for (const DataPoint& p : data) labels.push_back(p.label);
  return labels;
}

std::vector<std::size_t> Complement(std::size_t n, const std::vector<std::size_t>& excluded) {
  std::vector<bool> out(n, false);
  for (std::size_t i : excluded) out[i] = true;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i) {
    if (!out[i]) rest.push_back(i);
  }
  return rest;
}

std::vector<std::vector<std::size_t>> OuterFolds(std::span<const DataPoint> data,
                                                 const ExperimentOptions& options) {
  auto labels = LabelsOf(data);
  return StratifiedFolds(labels, options.outer_folds, DeriveSeed(options.seed, "outer_folds"));
}

// EDA settings as used by a run: seeded from the root seed.
std::vector<EdaConfig> SeededEda(std::vector<EdaConfig> grid, const ExperimentOptions& options) {
  for (EdaConfig& e : grid) {
    e.seed = DeriveSeed(options.seed, "eda");
    e.composition = options.eda_composition;
    e.Validate();
  }
  return grid;
}

// Normalized tokens of every data point and of the augmented copies of the
// requested rows, one set of copies per EDA setting.
class TokenCache {
 public:
  TokenCache(std::span<const DataPoint> data, std::vector<EdaConfig> eda,
             const Resources& resources, bool use_context, std::span<const std::size_t> augment,
             int threads)
      : eda_(std::move(eda)), base_(data.size()), augmented_(eda_.size()) {
    ParallelFor(data.size(), threads, [&](std::size_t i) {
      base_[i] = NormalizeForClassical(InputText(data[i], use_context), resources.stopwords);
    });
    for (std::size_t e = 0; e < eda_.size(); ++e) {
      augmented_[e].resize(data.size());
      ParallelFor(augment.size(), threads, [&](std::size_t k) {
        std::size_t i = augment[k];
        Rng rng = RecordRng(eda_[e], data[i].id);
        for (const std::string& copy : AugmentRecord(InputText(data[i], use_context), eda_[e],
                                                     resources.lexicon, rng,
                                                     resources.stopwords)) {
          augmented_[e][i].push_back(NormalizeForClassical(copy, resources.stopwords));
        }
      });
    }
  }

  const Tokens& Base(std::size_t i) const { return base_[i]; }
  const std::vector<Tokens>& Augmented(std::size_t e, std::size_t i) const {
    return augmented_[e][i];
  }
  const EdaConfig& eda(std::size_t e) const { return eda_[e]; }
  std::size_t eda_count() const { return eda_.size(); }

 private:
  std::vector<EdaConfig> eda_;
  std::vector<Tokens> base_;
  std::vector<std::vector<std::vector<Tokens>>> augmented_;
};

struct TrainingSet {
  VocabularyModel vocabulary;
  ConversationalScaler scaler;
  SparseMatrix x;
  std::vector<Label> y;
  std::vector<std::string> fit_ids;
};

SparseVector Encode(const VocabularyModel& vocabulary, const ConversationalScaler& scaler,
                    const Tokens& tokens, const std::vector<double>& conversational) {
  std::vector<double> scaled = scaler.Apply(conversational);
  return Concatenate(vocabulary.Transform(tokens), scaled,
                     static_cast<uint32_t>(vocabulary.size()));
}

// Vocabulary, scaler and feature rows fitted on the training rows and their
// augmented copies only.
TrainingSet Assemble(std::span<const DataPoint> data, std::span<const std::size_t> train,
                     const TokenCache& cache, std::size_t eda_index, NgramMode ngram, Task task) {
  std::vector<Tokens> docs;
  std::vector<std::vector<double>> conversational;
  TrainingSet ts;
  for (std::size_t i : train) {
    docs.push_back(cache.Base(i));
    conversational.push_back(data[i].conversational);
    ts.y.push_back(data[i].label);
    ts.fit_ids.push_back(data[i].id);
    for (const Tokens& copy : cache.Augmented(eda_index, i)) {
      docs.push_back(copy);
      conversational.push_back(data[i].conversational);
      ts.y.push_back(data[i].label);
      ts.fit_ids.push_back(data[i].id);
    }
  }
  ts.vocabulary = VocabularyModel::Fit(docs, ngram);
  ts.scaler = ConversationalScaler::Fit(conversational, task);
  ts.x.cols = ts.vocabulary.size() + ConversationalFeatureNames(task).size();
  ts.x.rows.reserve(docs.size());
  for (std::size_t r = 0; r < docs.size(); ++r) {
    ts.x.rows.push_back(Encode(ts.vocabulary, ts.scaler, docs[r], conversational[r]));
  }
  return ts;
}

SparseMatrix EncodeRows(std::span<const DataPoint> data, std::span<const std::size_t> rows,
                        const TokenCache& cache, const TrainingSet& ts) {
  SparseMatrix x;
  x.cols = ts.x.cols;
  for (std::size_t i : rows) {
    x.rows.push_back(Encode(ts.vocabulary, ts.scaler, cache.Base(i), data[i].conversational));
  }
  return x;
}

std::vector<std::string> IdsOf(std::span<const DataPoint> data,
                               std::span<const std::size_t> rows) {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (std::size_t i : rows) ids.push_back(data[i].id);
  return ids;
}

// Aborts when any record is used both to fit and to evaluate.
void CheckLeakage(const std::vector<std::string>& fit_ids,
                  const std::vector<std::string>& eval_ids) {
  std::unordered_set<std::string> fit(fit_ids.begin(), fit_ids.end());
  for (const std::string& id : eval_ids) {
    if (fit.count(id)) throw LeakageError("record '" + id + "' used at fit and test time");
  }
}

void Notify(const ExperimentOptions& options, int outer, int inner,
            const std::vector<std::string>& fit_ids, const std::vector<std::string>& eval_ids,
            const VocabularyModel* vocabulary, const SparseMatrix* eval_x) {
  if (!options.observer) return;
  options.observer(FitTrace{outer, inner, &fit_ids, &eval_ids, vocabulary, eval_x});
}

TrainedModel BalanceAndTrain(const TrainingSet& ts, ClassifierKind kind, BalanceKind balance,
                             const HyperParams& hyperparams, const ExperimentOptions& options,
                             uint64_t balance_seed, uint64_t model_seed) {
  BalanceStrategy strategy{balance, options.k_neighbors, options.smote_variant, balance_seed};
  BalancedSet balanced = ApplyBalance(ts.x, ts.y, strategy);
  ClassifierSpec spec{kind, hyperparams, model_seed};
  return Train(spec, balanced.features, balanced.labels);
}

std::vector<Label> Truth(std::span<const DataPoint> data, std::span<const std::size_t> rows) {
  std::vector<Label> y;
  for (std::size_t i : rows) y.push_back(data[i].label);
  return y;
}

constexpr uint64_t kRefit = ~uint64_t{0};

// Augmented training texts for the backend arm (raw cleaned text, no stemming).
void BackendTrainingTexts(std::span<const DataPoint> data, std::span<const std::size_t> rows,
                          const EdaConfig* eda, const Resources& resources,
                          const ExperimentOptions& options, BackendTrainRequest& request,
                          std::vector<std::string>& fit_ids) {
  for (std::size_t i : rows) {
    std::string text = InputText(data[i], options.use_context);
    std::string label = LabelName(options.task, data[i].label);
    if (eda != nullptr) {
      Rng rng = RecordRng(*eda, data[i].id);
      for (std::string& copy : AugmentRecord(text, *eda, resources.lexicon, rng,
                                             resources.stopwords)) {
        request.texts.push_back(std::move(copy));
        request.labels.push_back(label);
        fit_ids.push_back(data[i].id);
      }
    }
    request.texts.push_back(std::move(text));
    request.labels.push_back(std::move(label));
    fit_ids.push_back(data[i].id);
  }
}

std::vector<Label> BackendPredict(std::span<const DataPoint> data,
                                  std::span<const std::size_t> rows,
                                  const ExperimentOptions& options, BackendClient& backend) {
  std::vector<std::string> texts;
  for (std::size_t i : rows) texts.push_back(InputText(data[i], options.use_context));
  BackendPrediction prediction = backend.Predict(texts);
  std::vector<Label> labels;
  for (const std::string& l : prediction.labels) {
    try {
      labels.push_back(ParseLabelName(options.task, l));
    } catch (const ContractError&) {
      throw ProtocolError("backend predicted an unknown label", l);
    }
  }
  return labels;
}

// Trains the backend on `train` (with optional EDA) and predicts `eval`.
std::vector<Label> BackendFitPredict(std::span<const DataPoint> data,
                                     std::span<const std::size_t> train,
                                     std::span<const std::size_t> eval, BalanceKind balance,
                                     const EdaConfig* eda, const Resources& resources,
                                     const ExperimentOptions& options, BackendClient& backend,
                                     int outer, int inner) {
  BackendTrainRequest request;
  request.balance = balance;
  request.trials = options.backend_trials;
  std::vector<std::string> fit_ids;
  BackendTrainingTexts(data, train, eda, resources, options, request, fit_ids);
  std::vector<std::string> eval_ids = IdsOf(data, eval);
  CheckLeakage(fit_ids, eval_ids);
  Notify(options, outer, inner, fit_ids, eval_ids, nullptr, nullptr);
  backend.Train(request);
  return BackendPredict(data, eval, options, backend);
}

void RequireBothClasses(std::span<const DataPoint> data) {
  bool seen[2] = {false, false};
  for (const DataPoint& p : data) seen[p.label == 1 ? 1 : 0] = true;
  if (!seen[0] || !seen[1]) throw StratificationError("the data set contains a single class");
}

EvalReport FoldReport(std::span<const DataPoint> data, const std::vector<std::size_t>& test,
                      const std::vector<Label>& predictions, const std::string& id, int fold) {
  auto truth = Truth(data, test);
  return Evaluate(ConfusionMatrix::FromPredictions(truth, predictions), id, fold);
}

void FinishCondition(ConditionResult& result) {
  std::vector<EvalReport> reports;
  for (const FoldOutcome& f : result.folds) reports.push_back(f.report);
  result.mean = MeanReport(reports, result.id);
}

std::string ResolvePath(const std::filesystem::path& base, const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (base / p).lexically_normal().string();
}

}  // namespace

// ---------------------------------------------------------------------------
// Data points.

std::string LabelName(Task task, Label label) {
  if (task == Task::kCt1) return label == 1 ? "non_tone_bearing" : "tone_bearing";
  return label == 1 ? "civil" : "uncivil";
}

Label ParseLabelName(Task task, std::string_view name) {
  for (Label l : {0, 1}) {
    if (LabelName(task, l) == name) return l;
  }
  throw ContractError("unknown label '" + std::string(name) + "' for " +
                      std::string(ToString(task)));
}

std::vector<DataPoint> BuildDataset(const std::vector<Thread>& corpus, Task task,
                                    const RoleResolver& roles) {
  std::vector<DataPoint> points;
  for (const Thread& thread : corpus) {
    for (std::size_t i = 0; i < thread.messages.size(); ++i) {
      const Message& m = thread.messages[i];
      std::string base_id =
          std::string(ToString(thread.platform)) + ":" + thread.id + ":" + m.id;
      std::string previous = i > 0 ? thread.messages[i - 1].clean_text : std::string();
      if (task == Task::kCt1) {
        if (!m.ct1_label) continue;
        DataPoint p;
        p.id = base_id;
        p.thread_id = thread.id;
        p.platform = thread.platform;
        p.text = m.clean_text;
        p.previous = previous;
        p.conversational = ConversationalFeatures(thread, i, std::nullopt, task, roles).values;
        p.label = *m.ct1_label == Ct1Label::kNonToneBearing ? 1 : 0;
        std::set<std::string> names;
        for (const Sentence& s : m.sentences) {
          for (const Tbdf& t : s.tbdfs) names.insert(t.name);
        }
        p.tbdfs.assign(names.begin(), names.end());
        points.push_back(std::move(p));
      } else {
        if (m.ct1_label != Ct1Label::kToneBearing) continue;
        for (std::size_t j = 0; j < m.sentences.size(); ++j) {
          const Sentence& s = m.sentences[j];
          if (!s.ct2_label) continue;
          DataPoint p;
          p.id = base_id + "#" + std::to_string(j);
          p.thread_id = thread.id;
          p.platform = thread.platform;
          p.text = s.text;
          p.previous = previous;
          p.conversational = ConversationalFeatures(thread, i, j, task, roles).values;
          p.label = *s.ct2_label == Ct2Label::kCivil ? 1 : 0;
          for (const Tbdf& t : s.tbdfs) p.tbdfs.push_back(t.name);
          points.push_back(std::move(p));
        }
      }
    }
  }
  return points;
}

std::string WithContext(const DataPoint& point) {
  if (point.previous.empty()) return point.text;
  return point.previous + std::string(kContextSeparator) + point.text;
}

std::vector<std::vector<std::size_t>> StratifiedFolds(std::span<const Label> labels, int k,
                                                      uint64_t seed) {
  if (k < 2) throw ContractError("at least 2 folds are required");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] == 1 ? 1 : 0].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < static_cast<std::size_t>(k)) {
      throw StratificationError("class " + std::to_string(c) + " has " +
                                std::to_string(by_class[c].size()) + " members, fewer than " +
                                std::to_string(k) + " folds");
    }
  }
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t slot = 0;
  for (auto& members : by_class) {
    rng.Shuffle(members);
    for (std::size_t i : members) folds[slot++ % folds.size()].push_back(i);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

// ---------------------------------------------------------------------------
// Settings.

std::string PipelineSetting::Key() const {
  return hyperparams.dump() + "|" + eda.Id() + "|" + std::string(ToString(ngram));
}

json PipelineSetting::ToJson() const {
  return {{"hyperparams", hyperparams}, {"eda", eda.ToJson()}, {"ngram", ToString(ngram)}};
}

PipelineSetting PipelineSetting::FromJson(const json& j) {
  PipelineSetting s;
  s.hyperparams = j.at("hyperparams");
  s.eda = EdaConfig::FromJson(j.at("eda"));
  s.ngram = ParseNgramMode(j.at("ngram").get<std::string>());
  return s;
}

std::string ConditionId(std::string_view arm, BalanceKind balance) {
  return std::string(arm) + "+" + std::string(ToString(balance));
}

json ConditionResult::ToJson() const {
  json folds_json = json::array();
  for (const FoldOutcome& f : folds) {
    folds_json.push_back({{"fold", f.fold},
                          {"setting", f.setting.ToJson()},
                          {"inner_nmcc", f.inner_nmcc},
                          {"report", f.report.ToJson()},
                          {"test_indices", f.test_indices},
                          {"predictions", f.predictions}});
  }
  return {{"id", id},
          {"arm", arm},
          {"balance", ToString(balance)},
          {"grid_size", grid_size},
          {"mean", mean.ToJson()},
          {"folds", folds_json}};
}

ConditionResult ConditionResult::FromJson(const json& j) {
  ConditionResult r;
  r.id = j.at("id").get<std::string>();
  r.arm = j.at("arm").get<std::string>();
  r.balance = ParseBalanceKind(j.at("balance").get<std::string>());
  r.grid_size = j.value("grid_size", std::size_t{0});
  r.mean = EvalReport::FromJson(j.at("mean"));
  for (const json& f : j.at("folds")) {
    FoldOutcome o;
    o.fold = f.at("fold").get<int>();
    o.setting = PipelineSetting::FromJson(f.at("setting"));
    o.inner_nmcc = f.value("inner_nmcc", 0.0);
    o.report = EvalReport::FromJson(f.at("report"));
    o.test_indices = f.at("test_indices").get<std::vector<std::size_t>>();
    o.predictions = f.at("predictions").get<std::vector<Label>>();
    r.folds.push_back(std::move(o));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Pipelines.

FittedPipeline::FittedPipeline(VocabularyModel vocabulary, ConversationalScaler scaler,
                               TrainedModel model, std::vector<std::string> fit_ids,
                               bool use_context, StopwordSet stopwords)
    : vocabulary_(std::move(vocabulary)), scaler_(std::move(scaler)), model_(std::move(model)),
      fit_ids_(std::move(fit_ids)), use_context_(use_context), stopwords_(std::move(stopwords)) {}

FittedPipeline FittedPipeline::Fit(std::span<const DataPoint> data,
                                   std::span<const std::size_t> train, ClassifierKind kind,
                                   BalanceKind balance, const PipelineSetting& setting,
                                   const Resources& resources, const ExperimentOptions& options,
                                   uint64_t seed) {
  TokenCache cache(data, {setting.eda}, resources, options.use_context, train, options.threads);
  TrainingSet ts = Assemble(data, train, cache, 0, setting.ngram, options.task);
  TrainedModel model = BalanceAndTrain(ts, kind, balance, setting.hyperparams, options,
                                       DeriveSeed(seed, "balance"), DeriveSeed(seed, "model"));
  return FittedPipeline(std::move(ts.vocabulary), std::move(ts.scaler), std::move(model),
                        std::move(ts.fit_ids), options.use_context, resources.stopwords);
}

std::vector<Label> FittedPipeline::Predict(std::span<const DataPoint> data,
                                           std::span<const std::size_t> rows) const {
  SparseMatrix x;
  x.cols = model_.dimension();
  for (std::size_t i : rows) {
    Tokens tokens = NormalizeForClassical(InputText(data[i], use_context_), stopwords_);
    x.rows.push_back(Encode(vocabulary_, scaler_, tokens, data[i].conversational));
  }
  return model_.Predict(x);
}

ConditionResult NestedCv(std::span<const DataPoint> data, ClassifierKind kind,
                         BalanceKind balance, const SearchSpace& space,
                         const Resources& resources, const ExperimentOptions& options) {
  if (space.hyperparams.empty() || space.eda.empty() || space.ngram.empty()) {
    throw ContractError("empty search space");
  }
  RequireBothClasses(data);
  ConditionResult result;
  result.arm = std::string(ToString(kind));
  result.balance = balance;
  result.id = ConditionId(result.arm, balance);
  result.grid_size = space.size();
  spdlog::info("{}: nested CV {}x{} over {} settings ({} hyperparameter sets x {} EDA x {} "
               "n-gram modes), EDA composition {}",
               result.id, options.outer_folds, options.inner_folds, space.size(),
               space.hyperparams.size(), space.eda.size(), space.ngram.size(),
               ToString(options.eda_composition));

  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  TokenCache cache(data, SeededEda(space.eda, options), resources, options.use_context, all,
                   options.threads);

  const auto outer = OuterFolds(data, options);
  result.folds.resize(outer.size());
  const std::size_t n_h = space.hyperparams.size(), n_g = space.ngram.size();
  const std::size_t n_settings = cache.eda_count() * n_g * n_h;

  ParallelFor(outer.size(), options.threads, [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    const std::vector<std::size_t>& test = outer[f];
    const std::vector<std::size_t> train = Complement(data.size(), test);
    std::vector<Label> train_labels;
    for (std::size_t i : train) train_labels.push_back(data[i].label);
    const auto inner =
        StratifiedFolds(train_labels, options.inner_folds,
                        DeriveSeed(options.seed, "inner_folds", {static_cast<uint64_t>(f)}));

    std::vector<double> score(n_settings, 0.0);
    for (std::size_t g_fold = 0; g_fold < inner.size(); ++g_fold) {
      std::vector<std::size_t> inner_eval, inner_train;
      for (std::size_t k : inner[g_fold]) inner_eval.push_back(train[k]);
      for (std::size_t k : Complement(train.size(), inner[g_fold])) {
        inner_train.push_back(train[k]);
      }
      std::vector<Label> eval_truth = Truth(data, inner_eval);
      std::vector<std::string> eval_ids = IdsOf(data, inner_eval);
      for (std::size_t e = 0; e < cache.eda_count(); ++e) {
        for (std::size_t g = 0; g < n_g; ++g) {
          TrainingSet ts = Assemble(data, inner_train, cache, e, space.ngram[g], options.task);
          SparseMatrix eval_x = EncodeRows(data, inner_eval, cache, ts);
          CheckLeakage(ts.fit_ids, eval_ids);
          Notify(options, fold, static_cast<int>(g_fold), ts.fit_ids, eval_ids, &ts.vocabulary,
                 &eval_x);
          BalanceStrategy strategy{balance, options.k_neighbors, options.smote_variant,
                                   DeriveSeed(options.seed, "balance", {f, g_fold})};
          BalancedSet balanced = ApplyBalance(ts.x, ts.y, strategy);
          for (std::size_t h = 0; h < n_h; ++h) {
            ClassifierSpec spec{kind, space.hyperparams[h],
                                DeriveSeed(options.seed, "model", {f, g_fold})};
            TrainedModel model = Train(spec, balanced.features, balanced.labels);
            auto cm = ConfusionMatrix::FromPredictions(eval_truth, model.Predict(eval_x));
            score[(e * n_g + g) * n_h + h] += Nmcc(cm).value / static_cast<double>(inner.size());
          }
        }
      }
    }
    // First setting wins ties, in (EDA, n-gram, hyperparameter) grid order.
    std::size_t best = static_cast<std::size_t>(
        std::max_element(score.begin(), score.end()) - score.begin());
    std::size_t e = best / (n_g * n_h), g = (best / n_h) % n_g, h = best % n_h;

    FoldOutcome outcome;
    outcome.fold = fold;
    outcome.setting = {space.hyperparams[h], cache.eda(e), space.ngram[g]};
    outcome.inner_nmcc = score[best];
    TrainingSet ts = Assemble(data, train, cache, e, space.ngram[g], options.task);
    SparseMatrix test_x = EncodeRows(data, test, cache, ts);
    std::vector<std::string> test_ids = IdsOf(data, test);
    CheckLeakage(ts.fit_ids, test_ids);
    Notify(options, fold, -1, ts.fit_ids, test_ids, &ts.vocabulary, &test_x);
    TrainedModel model = BalanceAndTrain(ts, kind, balance, space.hyperparams[h], options,
                                         DeriveSeed(options.seed, "balance", {f, kRefit}),
                                         DeriveSeed(options.seed, "model", {f, kRefit}));
    outcome.test_indices = test;
    outcome.predictions = model.Predict(test_x);
    outcome.report = FoldReport(data, test, outcome.predictions, result.id, fold);
    result.folds[f] = std::move(outcome);
  });
  FinishCondition(result);
  spdlog::info("{}: mean nMCC {:.4f}, macro-F1 {:.4f}", result.id, result.mean.nmcc,
               result.mean.macro_f1);
  return result;
}

ConditionResult BackendCv(std::span<const DataPoint> data, BalanceKind balance,
                          const std::vector<EdaConfig>& eda_grid, const Resources& resources,
                          const ExperimentOptions& options, BackendClient& backend) {
  if (balance == BalanceKind::kSmote) {
    throw ContractError("SMOTE cannot be combined with the text backend");
  }
  if (eda_grid.empty()) throw ContractError("empty EDA grid");
  RequireBothClasses(data);
  ConditionResult result;
  result.arm = std::string(kBackendArm);
  result.balance = balance;
  result.id = ConditionId(result.arm, balance);
  result.grid_size = eda_grid.size();
  const std::vector<EdaConfig> eda = SeededEda(eda_grid, options);
  spdlog::info("{}: {} outer folds, {} EDA settings", result.id, options.outer_folds, eda.size());

  const auto outer = OuterFolds(data, options);
  for (std::size_t f = 0; f < outer.size(); ++f) {
    const int fold = static_cast<int>(f);
    const std::vector<std::size_t>& test = outer[f];
    const std::vector<std::size_t> train = Complement(data.size(), test);

    std::size_t chosen = 0;
    double chosen_nmcc = 0.0;
    if (eda.size() > 1) {
      std::vector<Label> train_labels;
      for (std::size_t i : train) train_labels.push_back(data[i].label);
      auto slices = StratifiedFolds(train_labels, options.inner_folds,
                                    DeriveSeed(options.seed, "backend_validation", {f}));
      std::vector<std::size_t> val, fit;
      for (std::size_t k : slices[0]) val.push_back(train[k]);
      for (std::size_t k : Complement(train.size(), slices[0])) fit.push_back(train[k]);
      double best = -1.0;
      for (std::size_t e = 0; e < eda.size(); ++e) {
        auto predicted = BackendFitPredict(data, fit, val, balance, &eda[e], resources, options,
                                           backend, fold, 0);
        double nmcc = Nmcc(ConfusionMatrix::FromPredictions(Truth(data, val), predicted)).value;
        if (nmcc > best) {
          best = nmcc;
          chosen = e;
        }
      }
      chosen_nmcc = best;
    }
    FoldOutcome outcome;
    outcome.fold = fold;
    outcome.setting.eda = eda[chosen];
    outcome.inner_nmcc = chosen_nmcc;
    outcome.test_indices = test;
    outcome.predictions = BackendFitPredict(data, train, test, balance, &eda[chosen], resources,
                                            options, backend, fold, -1);
    outcome.report = FoldReport(data, test, outcome.predictions, result.id, fold);
    result.folds.push_back(std::move(outcome));
  }
  FinishCondition(result);
  spdlog::info("{}: mean nMCC {:.4f}", result.id, result.mean.nmcc);
  return result;
}

ConditionResult FixedCv(std::span<const DataPoint> data, std::string_view arm,
                        BalanceKind balance, const PipelineSetting& setting,
                        const Resources& resources, const ExperimentOptions& options,
                        BackendClient* backend) {
  RequireBothClasses(data);
  const bool is_backend = arm == kBackendArm;
  if (is_backend && backend == nullptr) throw ContractError("the backend arm needs a backend");
  ConditionResult result;
  result.arm = std::string(arm);
  result.balance = balance;
  result.id = ConditionId(arm, balance);
  result.grid_size = 1;
  const auto outer = OuterFolds(data, options);
  result.folds.resize(outer.size());

  PipelineSetting seeded = setting;
  seeded.eda = SeededEda({setting.eda}, options)[0];
  auto run_fold = [&](std::size_t f) {
    const std::vector<std::size_t>& test = outer[f];
    const std::vector<std::size_t> train = Complement(data.size(), test);
    FoldOutcome outcome;
    outcome.fold = static_cast<int>(f);
    outcome.setting = seeded;
    outcome.test_indices = test;
    if (is_backend) {
      outcome.predictions = BackendFitPredict(data, train, test, balance, &seeded.eda, resources,
                                              options, *backend, outcome.fold, -1);
    } else {
      FittedPipeline pipeline =
          FittedPipeline::Fit(data, train, ParseClassifierKind(arm), balance, seeded, resources,
                              options, DeriveSeed(options.seed, "fixed", {f}));
      std::vector<std::string> test_ids = IdsOf(data, test);
      CheckLeakage(pipeline.fit_ids(), test_ids);
      Notify(options, outcome.fold, -1, pipeline.fit_ids(), test_ids, &pipeline.vocabulary(),
             nullptr);
      outcome.predictions = pipeline.Predict(data, test);
    }
    outcome.report = FoldReport(data, test, outcome.predictions, result.id, outcome.fold);
    result.folds[f] = std::move(outcome);
  };
  if (is_backend) {
    for (std::size_t f = 0; f < outer.size(); ++f) run_fold(f);
  } else {
    ParallelFor(outer.size(), options.threads, run_fold);
  }
  FinishCondition(result);
  return result;
}

// ---------------------------------------------------------------------------
// Selection.

std::size_t SelectMostFrequent(std::span<const FoldChoice> folds) {
  if (folds.empty()) throw ContractError("no folds to select from");
  std::map<std::string, std::size_t> count;
  for (const FoldChoice& f : folds) ++count[f.key];
  std::size_t top = 0;
  for (const auto& [key, c] : count) top = std::max(top, c);
  std::size_t pick = folds.size();
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if (count[folds[i].key] != top) continue;
    if (pick == folds.size() || folds[i].nmcc > folds[pick].nmcc) pick = i;
  }
  return pick;
}

PipelineSetting MostFrequentSetting(const ConditionResult& result) {
  std::vector<FoldChoice> choices;
  for (const FoldOutcome& f : result.folds) choices.push_back({f.setting.Key(), f.report.nmcc});
  return result.folds[SelectMostFrequent(choices)].setting;
}

const ConditionResult& BestCondition(const std::vector<ConditionResult>& results,
                                     std::optional<std::string_view> prefer_arm) {
  if (results.empty()) throw ContractError("no conditions to choose from");
  bool restrict = prefer_arm && std::any_of(results.begin(), results.end(), [&](const auto& r) {
                    return r.arm == *prefer_arm;
                  });
  const ConditionResult* best = nullptr;
  for (const ConditionResult& r : results) {
    if (restrict && r.arm != *prefer_arm) continue;
    if (best == nullptr || r.mean.nmcc > best->mean.nmcc) best = &r;
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Protocols.

std::vector<ConditionSpec> Rq1Conditions(const std::vector<ClassifierKind>& classifiers,
                                         const std::vector<BalanceKind>& classical_balances,
                                         bool with_backend) {
  std::vector<ConditionSpec> conditions;
  for (ClassifierKind k : classifiers) {
    for (BalanceKind b : classical_balances) conditions.push_back({std::string(ToString(k)), b});
  }
  if (with_backend) {
    for (BalanceKind b :
         {BalanceKind::kNone, BalanceKind::kRandomOver, BalanceKind::kRandomUnder}) {
      conditions.push_back({std::string(kBackendArm), b});
    }
  }
  return conditions;
}

json Rq2Report::ToJson() const {
  json rows_json = json::array();
  for (const DeltaRow& r : rows) {
    rows_json.push_back({{"metric", r.metric}, {"rq1", r.rq1}, {"rq2", r.rq2}, {"delta", r.delta}});
  }
  return {{"condition", condition_id}, {"setting", setting.ToJson()}, {"separator", separator},
          {"rq1", rq1.ToJson()},       {"rq2", rq2.ToJson()},         {"delta", rows_json}};
}

Rq2Report DeltaReport(std::string condition_id, PipelineSetting setting, const EvalReport& rq1,
                      const EvalReport& rq2) {
  Rq2Report report;
  report.condition_id = std::move(condition_id);
  report.setting = std::move(setting);
  report.rq1 = rq1;
  report.rq2 = rq2;
  auto before = MetricTable(rq1);
  auto after = MetricTable(rq2);
  for (std::size_t i = 0; i < before.size(); ++i) {
    report.rows.push_back(
        {before[i].first, before[i].second, after[i].second, DeltaPm(after[i].second, before[i].second)});
  }
  return report;
}

json Rq3Result::ToJson() const {
  return {{"arm", arm},
          {"balance", ToString(balance)},
          {"train_platform", ToString(train_platform)},
          {"test_platform", ToString(test_platform)},
          {"setting", setting.ToJson()},
          {"report", report.ToJson()}};
}

std::vector<Rq3Result> RunRq3Direction(std::span<const DataPoint> train,
                                       const std::vector<ConditionResult>& train_rq1,
                                       std::span<const DataPoint> test,
                                       const Resources& resources,
                                       const ExperimentOptions& options,
                                       BackendClient* backend) {
  if (train.empty() || test.empty()) throw ContractError("both platforms need data");
  std::vector<std::string> arms;
  for (const ConditionResult& r : train_rq1) {
    if (std::find(arms.begin(), arms.end(), r.arm) == arms.end()) arms.push_back(r.arm);
  }
  std::vector<std::size_t> train_rows(train.size()), test_rows(test.size());
  for (std::size_t i = 0; i < train_rows.size(); ++i) train_rows[i] = i;
  for (std::size_t i = 0; i < test_rows.size(); ++i) test_rows[i] = i;
  std::vector<std::string> test_ids = IdsOf(test, test_rows);

  std::vector<Rq3Result> out;
  for (const std::string& arm : arms) {
    std::vector<ConditionResult> mine;
    for (const ConditionResult& r : train_rq1) {
      if (r.arm == arm) mine.push_back(r);
    }
    const ConditionResult& best = BestCondition(mine);
    Rq3Result result;
    result.arm = arm;
    result.balance = best.balance;
    result.train_platform = train.front().platform;
    result.test_platform = test.front().platform;
    result.setting = MostFrequentSetting(best);
    PipelineSetting seeded = result.setting;
    seeded.eda = SeededEda({seeded.eda}, options)[0];
    std::vector<Label> predicted;
    if (arm == kBackendArm) {
      if (backend == nullptr) {
        spdlog::warn("skipping {}: no backend configured", best.id);
        continue;
      }
      BackendTrainRequest request;
      request.balance = best.balance;
      request.trials = options.backend_trials;
      std::vector<std::string> fit_ids;
      BackendTrainingTexts(train, train_rows, &seeded.eda, resources, options, request, fit_ids);
      CheckLeakage(fit_ids, test_ids);
      backend->Train(request);
      predicted = BackendPredict(test, test_rows, options, *backend);
    } else {
      FittedPipeline pipeline =
          FittedPipeline::Fit(train, train_rows, ParseClassifierKind(arm), best.balance, seeded,
                              resources, options, DeriveSeed(options.seed, "cross_platform"));
      CheckLeakage(pipeline.fit_ids(), test_ids);
      Notify(options, 0, -1, pipeline.fit_ids(), test_ids, &pipeline.vocabulary(), nullptr);
      predicted = pipeline.Predict(test, test_rows);
    }
    auto truth = LabelsOf(test);
    result.report = Evaluate(ConfusionMatrix::FromPredictions(truth, predicted),
                             best.id + ":" + std::string(ToString(result.train_platform)) + "->" +
                                 std::string(ToString(result.test_platform)));
    spdlog::info("{}: nMCC {:.4f}", result.report.condition_id, result.report.nmcc);
    out.push_back(std::move(result));
  }
  return out;
}

json Rq4Report::ToJson() const {
  json rows_json = json::array();
  for (const Rq4Row& r : rows) {
    rows_json.push_back({{"tbdf", r.tbdf},
                         {"classifier", r.classifier},
                         {"misclassified", r.misclassified},
                         {"total", r.total},
                         {"percent", r.percent}});
  }
  return {{"rows", rows_json}, {"notes", notes}};
}

void Rq4Report::WriteCsv(std::ostream& out) const {
  out << "tbdf,classifier,misclassified,total,percent\n";
  for (const Rq4Row& r : rows) {
    out << '"' << r.tbdf << "\"," << r.classifier << ',' << r.misclassified << ',' << r.total
        << ',' << r.percent << '\n';
  }
}

Rq4Report ComputeRq4(
    std::span<const DataPoint> data,
    const std::vector<std::pair<std::string, std::vector<FoldOutcome>>>& per_classifier,
    const std::vector<std::string>& names) {
  std::set<std::string> all(names.begin(), names.end());
  for (const DataPoint& p : data) all.insert(p.tbdfs.begin(), p.tbdfs.end());

  // tbdf -> classifier -> (misclassified, total)
  std::map<std::string, std::map<std::string, std::pair<std::size_t, std::size_t>>> tally;
  for (const auto& [classifier, folds] : per_classifier) {
    for (const FoldOutcome& f : folds) {
      if (f.test_indices.size() != f.predictions.size()) {
        throw ContractError("fold predictions and test indices differ in count");
      }
      for (std::size_t k = 0; k < f.test_indices.size(); ++k) {
        const DataPoint& p = data[f.test_indices[k]];
        bool wrong = f.predictions[k] != p.label;
        for (const std::string& t : p.tbdfs) {
          auto& cell = tally[t][classifier];
          cell.first += wrong ? 1 : 0;
          cell.second += 1;
        }
      }
    }
  }
  Rq4Report report;
  for (const std::string& name : all) {
    auto it = tally.find(name);
    if (it == tally.end()) {
      report.notes.push_back("'" + name + "' does not occur in any test fold; row omitted");
      continue;
    }
    for (const auto& [classifier, folds] : per_classifier) {
      auto cell = it->second.find(classifier);
      if (cell == it->second.end()) continue;
      auto [wrong, total] = cell->second;
      report.rows.push_back({name, classifier, wrong, total,
                             100.0 * static_cast<double>(wrong) / static_cast<double>(total)});
    }
  }
  return report;
}

Rq4Report RunRq4(std::span<const DataPoint> data, const std::vector<ConditionResult>& rq1,
                 const std::vector<std::string>& names) {
  std::vector<std::string> arms;
  for (const ConditionResult& r : rq1) {
    if (std::find(arms.begin(), arms.end(), r.arm) == arms.end()) arms.push_back(r.arm);
  }
  std::vector<std::pair<std::string, std::vector<FoldOutcome>>> per_classifier;
  for (const std::string& arm : arms) {
    const ConditionResult& best = BestCondition(rq1, std::string_view(arm));
    per_classifier.emplace_back(best.id, best.folds);
  }
  return ComputeRq4(data, per_classifier, names);
}

// ---------------------------------------------------------------------------
// Configuration.

void RunConfig::Validate() const {
  if (outer_folds < 2 || inner_folds < 2) throw ContractError("cv folds must be >= 2");
  if (classifiers.empty()) throw ContractError("no classifiers configured");
  if (balances.empty()) throw ContractError("no balance strategies configured");
  if (eda_grid.empty()) throw ContractError("empty EDA grid");
  for (const EdaConfig& e : eda_grid) e.Validate();
  if (ngram_modes.empty()) throw ContractError("no n-gram modes configured");
  if (k_neighbors < 1) throw ContractError("smote k_neighbors must be >= 1");
  if (backend_trials < 1) throw ContractError("backend trials must be >= 1");
  if (backend_timeout_seconds < 1) throw ContractError("backend timeout must be >= 1 s");
  for (const auto& [name, grid] : grids) {
    ClassifierKind kind = ParseClassifierKind(name);
    if (grid.empty()) throw ContractError("empty grid for " + name);
    for (const HyperParams& h : grid) ClassifierSpec{kind, h, 0}.Validate();
  }
  clean.Validate();
}

namespace {

void RejectUnknownKeys(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ContractError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ContractError("unknown " + where + " key '" + key + "'");
  }
}

}  // namespace

RunConfig RunConfig::FromJson(const json& j) {
  static const std::set<std::string> known = {
      "task",      "datasets", "tbdf_mapping", "clean",   "lexicon",         "stopwords",
      "classifiers", "balances", "grids",      "eda_grid", "eda_composition", "ngram_modes",
      "cv",        "seed",     "smote",        "threads", "backend",         "output_dir"};
  if (!j.is_object()) throw ContractError("run config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ContractError("unknown run config key '" + key + "'");
  }
  RunConfig c;
  try {
    if (j.contains("task")) c.task = ParseTask(j.at("task").get<std::string>());
    if (j.contains("datasets")) {
      for (const json& d : j.at("datasets")) {
        RejectUnknownKeys(d, {"path", "platform", "maintainers"}, "dataset");
        DatasetSpec spec;
        spec.path = d.at("path").get<std::string>();
        spec.platform = ParsePlatform(d.at("platform").get<std::string>());
        spec.maintainers = d.value("maintainers", "");
        c.datasets.push_back(spec);
      }
    }
    c.tbdf_mapping = j.value("tbdf_mapping", "");
    if (j.contains("clean")) c.clean = CleanConfig::FromJson(j.at("clean"));
    c.lexicon = j.value("lexicon", "");
    c.stopwords = j.value("stopwords", "");
    if (j.contains("classifiers")) {
      c.classifiers.clear();
      for (const json& k : j.at("classifiers")) {
        c.classifiers.push_back(ParseClassifierKind(k.get<std::string>()));
      }
    }
    if (j.contains("balances")) {
      c.balances.clear();
      for (const json& b : j.at("balances")) {
        c.balances.push_back(ParseBalanceKind(b.get<std::string>()));
      }
    }
    if (j.contains("grids")) {
      for (const auto& [name, grid] : j.at("grids").items()) {
        c.grids[name] = grid.get<std::vector<HyperParams>>();
      }
    }
    if (j.contains("eda_grid")) {
      c.eda_grid.clear();
      for (const json& e : j.at("eda_grid")) c.eda_grid.push_back(EdaConfig::FromJson(e));
    }
    if (j.contains("eda_composition")) {
      c.eda_composition = ParseEdaComposition(j.at("eda_composition").get<std::string>());
    }
    if (j.contains("ngram_modes")) {
      c.ngram_modes.clear();
      for (const json& m : j.at("ngram_modes")) {
        c.ngram_modes.push_back(ParseNgramMode(m.get<std::string>()));
      }
    }
    if (j.contains("cv")) {
      RejectUnknownKeys(j.at("cv"), {"outer_folds", "inner_folds"}, "cv");
      c.outer_folds = j.at("cv").value("outer_folds", c.outer_folds);
      c.inner_folds = j.at("cv").value("inner_folds", c.inner_folds);
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("smote")) {
      RejectUnknownKeys(j.at("smote"), {"k_neighbors", "variant"}, "smote");
      c.k_neighbors = j.at("smote").value("k_neighbors", c.k_neighbors);
      if (j.at("smote").contains("variant")) {
        c.smote_variant = ParseSmoteVariant(j.at("smote").at("variant").get<std::string>());
      }
    }
    c.threads = j.value("threads", c.threads);
    if (j.contains("backend") && !j.at("backend").is_null()) {
      const json& b = j.at("backend");
      RejectUnknownKeys(b, {"command", "trials", "timeout_seconds"}, "backend");
      c.backend_command = b.value("command", "");
      c.backend_trials = b.value("trials", c.backend_trials);
      c.backend_timeout_seconds = b.value("timeout_seconds", c.backend_timeout_seconds);
    }
    c.output_dir = j.value("output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw ContractError(std::string("invalid run config: ") + e.what());
  }
  c.Validate();
  return c;
}

RunConfig RunConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open run config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON in run config: ") + e.what(), 0);
  }
  RunConfig c = FromJson(j);
  // Relative paths are relative to the config file.
  std::filesystem::path base = std::filesystem::path(path).parent_path();
  for (DatasetSpec& d : c.datasets) {
    d.path = ResolvePath(base, d.path);
    d.maintainers = ResolvePath(base, d.maintainers);
  }
  c.tbdf_mapping = ResolvePath(base, c.tbdf_mapping);
  c.lexicon = ResolvePath(base, c.lexicon);
  c.stopwords = ResolvePath(base, c.stopwords);
  return c;
}

json RunConfig::ToJson() const {
  json datasets_json = json::array();
  for (const DatasetSpec& d : datasets) {
    datasets_json.push_back(
        {{"path", d.path}, {"platform", ToString(d.platform)}, {"maintainers", d.maintainers}});
  }
  json classifiers_json = json::array(), balances_json = json::array(),
       eda_json = json::array(), ngram_json = json::array(), grids_json = json::object();
  for (ClassifierKind k : classifiers) classifiers_json.push_back(ToString(k));
  for (BalanceKind b : balances) balances_json.push_back(ToString(b));
  for (const EdaConfig& e : eda_grid) eda_json.push_back(e.ToJson());
  for (NgramMode m : ngram_modes) ngram_json.push_back(ToString(m));
  for (const auto& [name, grid] : grids) grids_json[name] = grid;
  return {{"task", ToString(task)},
          {"datasets", datasets_json},
          {"tbdf_mapping", tbdf_mapping},
          {"clean", clean.ToJson()},
          {"lexicon", lexicon},
          {"stopwords", stopwords},
          {"classifiers", classifiers_json},
          {"balances", balances_json},
          {"grids", grids_json},
          {"eda_grid", eda_json},
          {"eda_composition", ToString(eda_composition)},
          {"ngram_modes", ngram_json},
          {"cv", {{"outer_folds", outer_folds}, {"inner_folds", inner_folds}}},
          {"seed", seed},
          {"smote", {{"k_neighbors", k_neighbors}, {"variant", ToString(smote_variant)}}},
          {"threads", threads},
          {"backend",
           {{"command", backend_command},
            {"trials", backend_trials},
            {"timeout_seconds", backend_timeout_seconds}}},
          {"output_dir", output_dir}};
}

SearchSpace RunConfig::SpaceFor(ClassifierKind kind) const {
  SearchSpace space;
  auto it = grids.find(std::string(ToString(kind)));
  space.hyperparams = it != grids.end() ? it->second : DefaultGrid(kind);
  space.eda = eda_grid;
  space.ngram = ngram_modes;
  return space;
}

ExperimentOptions RunConfig::Options() const {
  ExperimentOptions o;
  o.task = task;
  o.outer_folds = outer_folds;
  o.inner_folds = inner_folds;
  o.seed = seed;
  o.threads = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  o.k_neighbors = k_neighbors;
  o.smote_variant = smote_variant;
  o.eda_composition = eda_composition;
  o.backend_trials = backend_trials;
  return o;
}

Resources LoadResources(const RunConfig& config) {
  Resources r;
  std::string lexicon = config.lexicon;
  if (lexicon.empty()) lexicon = std::string(CIVILITY_DATA_DIR) + "/lexicon.json";
  if (std::filesystem::exists(lexicon)) {
    r.lexicon = SynonymLexicon::LoadFile(lexicon);
  } else if (!config.lexicon.empty()) {
    throw Error("lexicon file '" + lexicon + "' not found");
  } else {
    spdlog::warn("bundled lexicon not found at {}; synonym operations are no-ops", lexicon);
  }
  if (!config.stopwords.empty()) r.stopwords = LoadStopwords(config.stopwords);
  return r;
}

LoadOptions CorpusOptions(const RunConfig& config) {
  LoadOptions o;
  if (!config.tbdf_mapping.empty()) o.mapping = TbdfMapping::LoadFile(config.tbdf_mapping);
  o.clean = config.clean;
  return o;
}

std::vector<Thread> LoadDatasetCorpus(const RunConfig& config, const DatasetSpec& dataset) {
  return LoadCorpus(dataset.path, dataset.platform, CorpusOptions(config));
}

std::vector<DataPoint> LoadDataset(const RunConfig& config, const DatasetSpec& dataset) {
  std::vector<Thread> corpus = LoadDatasetCorpus(config, dataset);
  RoleResolver roles = dataset.maintainers.empty()
                           ? RoleResolver::FromRecords(corpus)
                           : RoleResolver::FromMaintainers(corpus,
                                                           LoadMaintainers(dataset.maintainers));
  return BuildDataset(corpus, config.task, roles);
}

std::vector<ConditionResult> RunRq1(std::span<const DataPoint> data, const RunConfig& config,
                                    const Resources& resources, BackendClient* backend) {
  ExperimentOptions options = config.Options();
  auto conditions = Rq1Conditions(config.classifiers, config.balances, backend != nullptr);
  spdlog::info("RQ1: {} conditions on {} data points", conditions.size(), data.size());
  std::vector<ConditionResult> results;
  for (const ConditionSpec& c : conditions) {
    if (c.arm == kBackendArm) {
      results.push_back(BackendCv(data, c.balance, config.eda_grid, resources, options, *backend));
    } else {
      ClassifierKind kind = ParseClassifierKind(c.arm);
      results.push_back(NestedCv(data, kind, c.balance, config.SpaceFor(kind), resources, options));
    }
  }
  return results;
}

Rq2Report RunRq2(std::span<const DataPoint> data, const std::vector<ConditionResult>& rq1,
                 const RunConfig& config, const Resources& resources, BackendClient* backend) {
  std::optional<std::string_view> prefer;
  if (backend != nullptr) prefer = kBackendArm;
  const ConditionResult& best = BestCondition(rq1, prefer);
  PipelineSetting setting = MostFrequentSetting(best);
  ExperimentOptions options = config.Options();
  options.use_context = true;
  spdlog::info("RQ2: rerunning {} with the previous message as context (newline separator)",
               best.id);
  ConditionResult with_context =
      FixedCv(data, best.arm, best.balance, setting, resources, options, backend);
  return DeltaReport(best.id, setting, best.mean, with_context.mean);
}

void WriteConditionCsv(std::ostream& out, const std::vector<ConditionResult>& results,
                       Task task) {
  WriteReportCsvHeader(out);
  const std::string pos = LabelName(task, 1), neg = LabelName(task, 0);
  for (const ConditionResult& r : results) {
    for (const FoldOutcome& f : r.folds) WriteReportCsvRows(out, f.report, pos, neg);
    WriteReportCsvRows(out, r.mean, pos, neg);
  }
}

json ConditionsToJson(const std::vector<ConditionResult>& results) {
  json out = json::array();
  for (const ConditionResult& r : results) out.push_back(r.ToJson());
  return out;
}

std::vector<ConditionResult> ConditionsFromJson(const json& j) {
  std::vector<ConditionResult> out;
  for (const json& r : j) out.push_back(ConditionResult::FromJson(r));
  return out;
}

}  // namespace civility
