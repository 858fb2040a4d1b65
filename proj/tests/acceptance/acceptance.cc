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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit status
// when any criterion fails. The replication-data check runs only when the
// corpus paths are given through CIVILITY_CODE_REVIEW_CORPUS and
// CIVILITY_ISSUES_CORPUS (optionally with a TBDF mapping in
// CIVILITY_TBDF_MAPPING).

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "civility/augment.h"
#include "civility/balance.h"
#include "civility/corpus.h"
#include "civility/desk_corpus.h"
#include "civility/harness.h"
#include "civility/metrics.h"
#include "civility/rng.h"
#include "test_util.h"

namespace civility {
namespace {

using Clock = std::chrono::steady_clock;

// Collects failure descriptions; a criterion passes when none are recorded.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++count_;
  }
  bool ok() const { return count_ == 0; }
  std::string Summary() const {
    std::ostringstream out;
    out << count_ << " failure(s)";
    for (const std::string& f : failures_) out << "; " << f;
    return out.str();
  }

 private:
  std::vector<std::string> failures_;
  std::size_t count_ = 0;
};

struct Outcome {
  enum { kPass, kFail, kSkip } status = kPass;
  std::string detail;
};

Outcome Run(const std::string& name, double budget_seconds,
            const std::function<void(Check&, std::string&)>& body) {
  Check check;
  std::string note;
  auto start = Clock::now();
  try {
    body(check, note);
  } catch (const std::exception& e) {
    check.Expect(false, std::string("exception: ") + e.what());
  }
  double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (budget_seconds > 0) {
    std::ostringstream b;
    b << "runtime " << seconds << " s exceeds " << budget_seconds << " s";
    check.Expect(seconds < budget_seconds, b.str());
  }
  Outcome o;
  o.status = check.ok() ? Outcome::kPass : Outcome::kFail;
  std::ostringstream line;
  line << (check.ok() ? "PASS" : "FAIL") << "  " << name << "  [" << seconds << " s]";
  if (!note.empty()) line << "  " << note;
  if (!check.ok()) line << "  " << check.Summary();
  std::cout << line.str() << std::endl;
  return o;
}

std::string Str(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

// ---------------------------------------------------------------------------

void MetricsOracle(Check& c, std::string& note) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int64_t> count(0, 1000);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionMatrix cm{count(gen), count(gen), count(gen), count(gen)};
    auto o = testing::ComputeOracle(cm.tp, cm.fp, cm.fn, cm.tn);
    double p = Precision(cm).value, r = Recall(cm).value;
    auto near = [](double a, long double b) { return std::abs(a - static_cast<double>(b)) <= 1e-12; };
    c.Expect(near(p, o.precision), "precision trial " + std::to_string(trial));
    c.Expect(near(r, o.recall), "recall trial " + std::to_string(trial));
    c.Expect(near(F1(p, r), o.f1), "f1 trial " + std::to_string(trial));
    c.Expect(near(Mcc(cm).value, o.mcc), "mcc trial " + std::to_string(trial));
    c.Expect(near(Nmcc(cm).value, o.nmcc), "nmcc trial " + std::to_string(trial));
  }
  for (int64_t n : {1, 7, 25, 1000, 123457}) {
    double v = Nmcc({n, n, n, n}).value;
    c.Expect(v == 0.5, "nMCC(" + std::to_string(n) + " x4) = " + Str(v));
  }
  note = "200 matrices";
}

// Indices of `ids` within `data`.
std::vector<std::size_t> IndicesOf(const std::vector<DataPoint>& data,
                                   const std::set<std::string>& ids) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (ids.count(data[i].id)) out.push_back(i);
  }
  return out;
}

void StratificationAndLeakage(Check& c, std::string& note) {
  auto data = testing::SyntheticRecords(500, 0.3, 17);
  std::vector<Label> labels;
  for (const DataPoint& p : data) labels.push_back(p.label);
  Resources resources;
  resources.lexicon = SynonymLexicon::LoadFile(std::string(CIVILITY_DATA_DIR) + "/lexicon.json");

  struct RunSpec {
    ClassifierKind kind;
    BalanceKind balance;
  };
  const std::vector<RunSpec> runs = {{ClassifierKind::kMultinomialNb, BalanceKind::kRandomOver},
                                     {ClassifierKind::kLogisticRegression, BalanceKind::kSmote},
                                     {ClassifierKind::kMultinomialNb, BalanceKind::kRandomUnder}};
  std::size_t fits = 0;
  for (const RunSpec& spec : runs) {
    const std::string tag = std::string(ToString(spec.kind)) + "+" + std::string(ToString(spec.balance));
    testing::LeakageAudit audit(data);
    ExperimentOptions options;
    options.seed = 99;
    options.observer = audit.Observer();
    SearchSpace space;
    space.hyperparams = {DefaultGrid(spec.kind).front()};
    EdaConfig eda;
    eda.n_aug = 1;
    space.eda = {eda};
    space.ngram = {NgramMode::kUniBi};
    ConditionResult r = NestedCv(data, spec.kind, spec.balance, space, resources, options);
    fits += audit.fits();

    for (const std::string& v : audit.violations()) c.Expect(false, tag + ": " + v);
    c.Expect(audit.sentinel_hits() > 0, tag + ": sentinel check never engaged");

    // Outer folds: disjoint, covering, stratified.
    std::vector<std::vector<std::size_t>> outer;
    for (const FoldOutcome& f : r.folds) {
      outer.push_back(IndicesOf(data, audit.eval_sets().at({f.fold, -1})));
      c.Expect(outer.back() == std::vector<std::size_t>(f.test_indices.begin(), f.test_indices.end()) ||
                   std::is_permutation(outer.back().begin(), outer.back().end(),
                                       f.test_indices.begin(), f.test_indices.end()),
               tag + ": observed and reported test folds differ");
    }
    std::string err = testing::CheckStratifiedPartition(outer, labels);
    c.Expect(err.empty(), tag + " outer: " + err);

    // Inner folds over each outer training part.
    for (std::size_t o = 0; o < outer.size(); ++o) {
      std::set<std::size_t> test(outer[o].begin(), outer[o].end());
      std::vector<std::size_t> train;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (!test.count(i)) train.push_back(i);
      }
      std::map<std::size_t, std::size_t> local;
      std::vector<Label> train_labels;
      for (std::size_t i : train) {
        local[i] = train_labels.size();
        train_labels.push_back(labels[i]);
      }
      std::vector<std::vector<std::size_t>> inner;
      for (int j = 0; j < options.inner_folds; ++j) {
        std::vector<std::size_t> fold;
        for (std::size_t i : IndicesOf(data, audit.eval_sets().at({static_cast<int>(o), j}))) {
          auto it = local.find(i);
          c.Expect(it != local.end(), tag + ": inner fold holds an outer test record");
          if (it != local.end()) fold.push_back(it->second);
        }
        inner.push_back(fold);
      }
      err = testing::CheckStratifiedPartition(inner, train_labels);
      c.Expect(err.empty(), tag + " inner of outer " + std::to_string(o) + ": " + err);
    }
  }
  note = std::to_string(runs.size()) + " nested runs, " + std::to_string(fits) + " audited fits";
}

SynonymLexicon SmallLexicon() {
  return SynonymLexicon({{"quick", {"fast", "speedy"}},
                         {"fox", {"vixen"}},
                         {"lazy", {"idle", "slow"}},
                         {"dog", {"hound", "pup"}},
                         {"jumps", {"leaps"}}});
}

void EdaInvariants(Check& c, std::string& note) {
  Rng rng(2024);
  const Words vocabulary = {"quick", "brown", "fox", "jumps", "over", "the", "lazy", "dog", "again"};
  auto random_words = [&](std::size_t n) {
    Words w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(vocabulary[rng.Below(vocabulary.size())]);
    return w;
  };

  // RS preserves multisets.
  for (int t = 0; t < 2000; ++t) {
    Words w = random_words(1 + rng.Below(15));
    Words s = RandomSwap(w, 1 + rng.Below(4), rng);
    c.Expect(std::is_permutation(w.begin(), w.end(), s.begin(), s.end()), "RS changed the multiset");
  }
  // RD: identity at p = 0, never empty.
  for (int t = 0; t < 2000; ++t) {
    Words w = random_words(1 + rng.Below(15));
    c.Expect(RandomDeletion(w, 0.0, rng) == w, "RD with p=0 changed the input");
    for (double p : {0.5, 0.9, 1.0}) c.Expect(!RandomDeletion(w, p, rng).empty(), "RD emptied input");
  }
  // SR against the enumerated output set.
  SynonymLexicon lexicon = SmallLexicon();
  const StopwordSet no_stopwords;
  std::size_t sr_cases = 0;
  for (int t = 0; t < 300; ++t) {
    Words w = random_words(2 + rng.Below(5));
    std::size_t n = 1 + rng.Below(3);
    std::set<Words> allowed = testing::EnumerateReplacements(w, n, lexicon, no_stopwords);
    std::set<std::string> eligible;
    for (const std::string& x : w) {
      if (!lexicon.Synonyms(LookupKey(x)).empty()) eligible.insert(LookupKey(x));
    }
    for (int draw = 0; draw < 5; ++draw) {
      Words out = SynonymReplacement(w, n, lexicon, rng, no_stopwords);
      c.Expect(allowed.count(out) > 0, "SR output outside the enumerated set");
      std::size_t changed = 0;
      for (std::size_t i = 0; i < w.size(); ++i) changed += out[i] != w[i];
      c.Expect(changed == std::min(n, eligible.size()), "SR replaced the wrong number of tokens");
      ++sr_cases;
    }
  }
  // Operation count hand values.
  c.Expect(OperationCount(0.1, 20) == 2, "n(0.1, 20) != 2");
  c.Expect(OperationCount(0.1, 5) == 1, "n(0.1, 5) != 1");
  c.Expect(OperationCount(0.05, 3) == 1, "n(0.05, 3) != 1");
  c.Expect(OperationCount(0.1, 35) == 4, "n(0.1, 35) != 4");
  c.Expect(OperationCount(0.2, 12) == 2, "n(0.2, 12) != 2");
  // RD expected survival, 10,000 trials.
  const std::size_t length = 20;
  const int trials = 10000;
  Words words;
  for (std::size_t i = 0; i < length; ++i) words.push_back("w" + std::to_string(i));
  for (double p : {0.05, 0.1, 0.3}) {
    double total = 0;
    for (int t = 0; t < trials; ++t) total += static_cast<double>(RandomDeletion(words, p, rng).size());
    double mean = total / trials;
    double expected = (1 - p) * static_cast<double>(length);
    double sigma = std::sqrt(static_cast<double>(length) * p * (1 - p) / trials);
    c.Expect(std::abs(mean - expected) <= 3 * sigma,
             "RD p=" + Str(p) + " mean " + Str(mean) + " vs " + Str(expected));
  }
  note = std::to_string(sr_cases) + " SR draws";
}

// Two 2-D Gaussian clusters with `ones` minority and `zeros` majority rows.
std::pair<SparseMatrix, std::vector<Label>> Clusters(std::size_t ones, std::size_t zeros,
                                                     uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  SparseMatrix x;
  x.cols = 2;
  std::vector<Label> y;
  for (std::size_t i = 0; i < ones + zeros; ++i) {
    bool one = i < ones;
    std::vector<double> row = {noise(gen) + (one ? 4 : 0), noise(gen) + (one ? 4 : 0)};
    x.rows.push_back(SparseVector::FromDense(row));
    y.push_back(one ? 1 : 0);
  }
  return {x, y};
}

void Balancing(Check& c, std::string& note) {
  std::size_t fixtures = 0;
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    std::mt19937_64 gen(seed);
    std::size_t minority = 2 + gen() % 20, majority = minority + 1 + gen() % 60;
    bool flip = seed % 2 == 0;
    auto [x, y] = flip ? Clusters(majority, minority, seed) : Clusters(minority, majority, seed);
    for (BalanceKind kind : {BalanceKind::kRandomOver, BalanceKind::kRandomUnder, BalanceKind::kSmote}) {
      for (SmoteVariant variant : {SmoteVariant::kOversampleOnly, SmoteVariant::kMidpointUndersample}) {
        if (kind != BalanceKind::kSmote && variant != SmoteVariant::kOversampleOnly) continue;
        BalanceStrategy s{kind, 5, variant, seed};
        BalancedSet b = ApplyBalance(x, y, s);
        std::size_t ones = std::count(b.labels.begin(), b.labels.end(), 1);
        c.Expect(2 * ones == b.labels.size(),
                 std::string(ToString(kind)) + " left " + std::to_string(ones) + "/" +
                     std::to_string(b.labels.size()) + " (seed " + std::to_string(seed) + ")");
        c.Expect(b.features.size() == b.labels.size(), "features and labels differ in count");
      }
    }
    for (int k : {1, 3, 5}) {
      for (SmoteVariant variant : {SmoteVariant::kOversampleOnly, SmoteVariant::kMidpointUndersample}) {
        SmoteResult r = Smote(x, y, k, seed, variant);
        std::string err = testing::CheckSmoteGeometry(x, y, r, r.k_used, 1e-9);
        c.Expect(err.empty(), "seed " + std::to_string(seed) + " k " + std::to_string(k) + ": " + err);
        std::size_t target = variant == SmoteVariant::kOversampleOnly
                                 ? majority
                                 : (majority + minority) / 2;
        c.Expect(r.synthetic.size() == target - minority,
                 "synthetic rows " + std::to_string(r.synthetic.size()) + " != " +
                     std::to_string(target - minority));
        ++fixtures;
      }
    }
  }
  note = std::to_string(fixtures) + " SMOTE fixtures";
}

void DeskRun(Check& c, std::string& note) {
  RunConfig config = RunConfig::Load(std::string(CIVILITY_DATA_DIR) + "/desk_config.json");
  auto corpus = LoadDatasetCorpus(config, config.datasets.front());
  for (Task task : {Task::kCt1, Task::kCt2}) {
    SeparabilityResult s = CheckSeparable(corpus, task);
    c.Expect(s.separable, std::string(ToString(task)) + " not separable: " + s.detail);
  }
  Resources resources = LoadResources(config);
  auto data = LoadDataset(config, config.datasets.front());
  auto results = RunRq1(data, config, resources, nullptr);
  c.Expect(results.size() == config.classifiers.size() * config.balances.size(),
           "unexpected condition count");
  std::ostringstream summary;
  summary << data.size() << " messages;";
  for (const ConditionResult& r : results) {
    summary << " " << r.id << "=" << r.mean.macro_f1;
    c.Expect(r.mean.macro_f1 >= 0.9, r.id + " macro-F1 " + Str(r.mean.macro_f1));
  }
  note = summary.str();
}

void ProtocolGrids(Check& c, std::string& note) {
  // RQ1 grid sizes.
  std::vector<BalanceKind> balances = {BalanceKind::kRandomOver, BalanceKind::kRandomUnder,
                                       BalanceKind::kSmote};
  c.Expect(Rq1Conditions(AllClassifierKinds(), balances, false).size() == 18, "RQ1 without backend != 18");
  auto with = Rq1Conditions(AllClassifierKinds(), balances, true);
  c.Expect(with.size() == 21, "RQ1 with backend != 21");
  std::set<std::string> ids;
  for (const ConditionSpec& s : with) ids.insert(ConditionId(s.arm, s.balance));
  c.Expect(ids.size() == 21, "RQ1 condition ids are not unique");

  // RQ2 delta table.
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int64_t> count(1, 300);
  for (int t = 0; t < 50; ++t) {
    EvalReport a = Evaluate({count(gen), count(gen), count(gen), count(gen)});
    EvalReport b = Evaluate({count(gen), count(gen), count(gen), count(gen)});
    Rq2Report r = DeltaReport("x", PipelineSetting{}, a, b);
    auto ta = MetricTable(a), tb = MetricTable(b);
    c.Expect(r.rows.size() == ta.size(), "delta table size");
    for (std::size_t i = 0; i < std::min(ta.size(), r.rows.size()); ++i) {
      c.Expect(r.rows[i].metric == ta[i].first && r.rows[i].rq1 == ta[i].second &&
                   r.rows[i].rq2 == tb[i].second &&
                   std::abs(r.rows[i].delta - (tb[i].second - ta[i].second)) <= 1e-15,
               "delta cell " + ta[i].first);
    }
  }

  // RQ3 selection on synthetic fold outcomes: independent reference rule.
  auto reference = [](const std::vector<std::pair<int, double>>& folds) {
    std::map<int, int> freq;
    for (auto [s, v] : folds) ++freq[s];
    int top = 0;
    for (auto [s, n] : freq) top = std::max(top, n);
    std::size_t best = folds.size();
    for (std::size_t i = 0; i < folds.size(); ++i) {
      if (freq[folds[i].first] != top) continue;
      if (best == folds.size() || folds[i].second > folds[best].second) best = i;
    }
    return folds[best].first;
  };
  std::size_t cases = 0;
  for (int t = 0; t < 500; ++t) {
    std::vector<std::pair<int, double>> folds;
    ConditionResult result;
    for (int f = 0; f < 5; ++f) {
      int setting = static_cast<int>(gen() % 3);
      double nmcc = static_cast<double>(gen() % 1000) / 1000.0;
      folds.push_back({setting, nmcc});
      FoldOutcome o;
      o.fold = f;
      o.setting.hyperparams = {{"C", setting}};
      o.report.nmcc = nmcc;
      result.folds.push_back(o);
    }
    int want = reference(folds);
    PipelineSetting got = MostFrequentSetting(result);
    c.Expect(got.hyperparams.at("C").get<int>() == want, "RQ3 selection differs on case " + std::to_string(t));
    ++cases;
  }
  // The documented example: A and B tie on frequency, A holds the best fold.
  std::vector<FoldChoice> example = {{"A", 0.70}, {"B", 0.80}, {"A", 0.91}, {"B", 0.85}, {"C", 0.99}};
  c.Expect(example[SelectMostFrequent(example)].key == "A", "tie-break example");

  // RQ4 on the 10-sentence fixture.
  testing::Rq4Fixture f = testing::MakeRq4Fixture();
  Rq4Report r = ComputeRq4(f.data, f.per_classifier, f.names);
  const std::map<std::string, double> lr = {{"friendly joke", 50.0}, {"humility", 100.0 / 3.0},
                                            {"irony", 50.0},         {"mocking", 50.0},
                                            {"sadness", 0.0},        {"threat", 0.0},
                                            {"vulgarity", 50.0}};
  std::size_t lr_rows = 0, nb_rows = 0;
  for (const Rq4Row& row : r.rows) {
    if (row.classifier == "lr") {
      ++lr_rows;
      auto it = lr.find(row.tbdf);
      c.Expect(it != lr.end() && std::abs(row.percent - it->second) <= 1e-12, "RQ4 lr " + row.tbdf);
    } else {
      ++nb_rows;
      c.Expect(row.percent == 0.0, "RQ4 nb " + row.tbdf);
    }
  }
  c.Expect(lr_rows == 7 && nb_rows == 7, "RQ4 row count");
  c.Expect(r.notes.size() == 1, "RQ4 absent-TBDF note");
  note = std::to_string(cases) + " selection cases";
}

void ReplicationCounts(Check& c, std::string& note) {
  struct Expected {
    const char* env;
    Platform platform;
    std::size_t non_tone_bearing, tone_bearing, civil, uncivil;
  };
  const Expected sets[] = {{"CIVILITY_CODE_REVIEW_CORPUS", Platform::kCodeReview, 1365, 168, 117, 276},
                           {"CIVILITY_ISSUES_CORPUS", Platform::kIssues, 4793, 718, 353, 896}};
  LoadOptions options;
  if (const char* mapping = std::getenv("CIVILITY_TBDF_MAPPING")) {
    options.mapping = TbdfMapping::LoadFile(mapping);
  }
  std::ostringstream summary;
  for (const Expected& e : sets) {
    const char* path = std::getenv(e.env);
    auto stats = ComputeStats(LoadCorpus(path, e.platform, options));
    summary << ToString(e.platform) << " " << stats.non_tone_bearing << "/" << stats.tone_bearing << " "
            << stats.civil_sentences << "/" << stats.uncivil_sentences << "; ";
    c.Expect(stats.non_tone_bearing == e.non_tone_bearing, std::string(e.env) + " non-tone-bearing");
    c.Expect(stats.tone_bearing == e.tone_bearing, std::string(e.env) + " tone-bearing");
    c.Expect(stats.civil_sentences == e.civil, std::string(e.env) + " civil sentences");
    c.Expect(stats.uncivil_sentences == e.uncivil, std::string(e.env) + " uncivil sentences");
  }
  note = summary.str();
}

int Main() {
  spdlog::set_level(spdlog::level::warn);
  std::vector<Outcome> outcomes;
  outcomes.push_back(Run("metrics oracle", 1.0, MetricsOracle));
  outcomes.push_back(Run("stratification and leakage", 10.0, StratificationAndLeakage));
  outcomes.push_back(Run("EDA invariants", 0, EdaInvariants));
  outcomes.push_back(Run("balancing", 0, Balancing));
  outcomes.push_back(Run("desk end-to-end run", 60.0, DeskRun));
  outcomes.push_back(Run("protocol grids", 0, ProtocolGrids));
  if (std::getenv("CIVILITY_CODE_REVIEW_CORPUS") && std::getenv("CIVILITY_ISSUES_CORPUS")) {
    outcomes.push_back(Run("replication ingestion counts", 0, ReplicationCounts));
  } else {
    std::cout << "SKIP  replication ingestion counts  (set CIVILITY_CODE_REVIEW_CORPUS and "
                 "CIVILITY_ISSUES_CORPUS)"
              << std::endl;
  }
  bool failed = std::any_of(outcomes.begin(), outcomes.end(),
                            [](const Outcome& o) { return o.status == Outcome::kFail; });
  return failed ? 1 : 0;
}

}  // namespace
}  // namespace civility

int main() { return civility::Main(); }
