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

#ifndef CIVILITY_METRICS_H_
#define CIVILITY_METRICS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "civility/balance.h"
#include "json.hpp"

namespace civility {

// Counts with label 1 (civil / non-tone-bearing) as the positive class.
struct ConfusionMatrix {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t tn = 0;

  int64_t total() const { return tp + fp + fn + tn; }
  // The same predictions seen with the other class as positive.
  ConfusionMatrix Swapped() const { return {tn, fn, fp, tp}; }

  static ConfusionMatrix FromPredictions(std::span<const Label> truth,
                                         std::span<const Label> predicted);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// A metric value plus a flag raised when a zero denominator forced it to 0.
struct Metric {
  double value = 0.0;
  bool degenerate = false;
};

Metric Precision(const ConfusionMatrix& cm);
Metric Recall(const ConfusionMatrix& cm);
double F1(double precision, double recall);  // 0 when both are 0
Metric Mcc(const ConfusionMatrix& cm);
Metric Nmcc(const ConfusionMatrix& cm);  // (mcc + 1) / 2
double MacroAverage(std::span<const double> per_class);
// Negative means the second condition scored higher.
double DeltaPm(double pm_rq2, double pm_rq1);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::string condition_id;
  int fold = -1;  // -1 for aggregates
  ConfusionMatrix confusion;
  ClassMetrics positive;  // civil / non-tone-bearing
  ClassMetrics negative;  // uncivil / tone-bearing
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double mcc = 0.0;
  double nmcc = 0.5;
  bool degenerate = false;

  nlohmann::json ToJson() const;
  static EvalReport FromJson(const nlohmann::json& j);
};

EvalReport Evaluate(const ConfusionMatrix& cm, std::string condition_id = "", int fold = -1);

// Unweighted mean of every metric over the reports; confusion counts summed.
EvalReport MeanReport(std::span<const EvalReport> reports, std::string condition_id = "");

// Named scalar metrics in a fixed order: per-class precision/recall/F1 for
// both classes, macro precision/recall/F1, mcc and nmcc.
std::vector<std::pair<std::string, double>> MetricTable(const EvalReport& r);

// CSV with one row per (condition, fold, class) and stable columns:
// condition,fold,class,precision,recall,f1,macro_precision,macro_recall,
// macro_f1,mcc,nmcc
void WriteReportCsvHeader(std::ostream& out);
void WriteReportCsvRows(std::ostream& out, const EvalReport& r,
                        const std::string& positive_name,
                        const std::string& negative_name);

}  // namespace civility

#endif  // CIVILITY_METRICS_H_
