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

#include "civility/metrics.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "civility/errors.h"

namespace civility {
namespace {

Metric SafeRatio(double num, double den) {
  if (den == 0.0) return {0.0, true};
  return {num / den, false};
}

ClassMetrics ClassMetricsOf(const ConfusionMatrix& cm, bool& degenerate) {
  Metric p = Precision(cm);
  Metric r = Recall(cm);
  degenerate = degenerate || p.degenerate || r.degenerate;
  return {p.value, r.value, F1(p.value, r.value)};
}

nlohmann::json ClassJson(const ClassMetrics& c) {
  return {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
}

ClassMetrics ClassFromJson(const nlohmann::json& j) {
  return {j.at("precision").get<double>(), j.at("recall").get<double>(),
          j.at("f1").get<double>()};
}

}  // namespace

ConfusionMatrix ConfusionMatrix::FromPredictions(std::span<const Label> truth,
                                                 std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw ContractError("truth and predictions differ in length");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      predicted[i] == 1 ? ++cm.tp : ++cm.fn;
    } else {
      predicted[i] == 1 ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

Metric Precision(const ConfusionMatrix& cm) {
  return SafeRatio(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fp));
}

Metric Recall(const ConfusionMatrix& cm) {
  return SafeRatio(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fn));
}

double F1(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Metric Mcc(const ConfusionMatrix& cm) {
  const double tp = static_cast<double>(cm.tp), fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn), tn = static_cast<double>(cm.tn);
  const double a = tp + fp, b = tp + fn, c = tn + fp, d = tn + fn;
  if (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0) return {0.0, true};
  double mcc = (tp * tn - fp * fn) / std::sqrt(a * b * c * d);
  return {std::clamp(mcc, -1.0, 1.0), false};
}

Metric Nmcc(const ConfusionMatrix& cm) {
  Metric m = Mcc(cm);
  return {(m.value + 1.0) / 2.0, m.degenerate};
}

double MacroAverage(std::span<const double> per_class) {
  if (per_class.empty()) return 0.0;
  double sum = 0.0;
  for (double v : per_class) sum += v;
  return sum / static_cast<double>(per_class.size());
}

double DeltaPm(double pm_rq2, double pm_rq1) { return pm_rq2 - pm_rq1; }

EvalReport Evaluate(const ConfusionMatrix& cm, std::string condition_id, int fold) {
  EvalReport r;
  r.condition_id = std::move(condition_id);
  r.fold = fold;
  r.confusion = cm;
  bool degenerate = false;
  r.positive = ClassMetricsOf(cm, degenerate);
  r.negative = ClassMetricsOf(cm.Swapped(), degenerate);
  const double p[] = {r.positive.precision, r.negative.precision};
  const double rc[] = {r.positive.recall, r.negative.recall};
  const double f[] = {r.positive.f1, r.negative.f1};
  r.macro_precision = MacroAverage(p);
  r.macro_recall = MacroAverage(rc);
  r.macro_f1 = MacroAverage(f);
  Metric mcc = Mcc(cm);
  r.mcc = mcc.value;
  r.nmcc = (mcc.value + 1.0) / 2.0;
  r.degenerate = degenerate || mcc.degenerate;
  return r;
}

EvalReport MeanReport(std::span<const EvalReport> reports, std::string condition_id) {
  EvalReport m;
  m.condition_id = std::move(condition_id);
  if (reports.empty()) return m;
  const double n = static_cast<double>(reports.size());
  m.nmcc = 0.0;
  for (const EvalReport& r : reports) {
    m.confusion.tp += r.confusion.tp;
    m.confusion.fp += r.confusion.fp;
    m.confusion.fn += r.confusion.fn;
    m.confusion.tn += r.confusion.tn;
    m.positive.precision += r.positive.precision / n;
    m.positive.recall += r.positive.recall / n;
    m.positive.f1 += r.positive.f1 / n;
    m.negative.precision += r.negative.precision / n;
    m.negative.recall += r.negative.recall / n;
    m.negative.f1 += r.negative.f1 / n;
    m.macro_precision += r.macro_precision / n;
    m.macro_recall += r.macro_recall / n;
    m.macro_f1 += r.macro_f1 / n;
    m.mcc += r.mcc / n;
    m.nmcc += r.nmcc / n;
    m.degenerate = m.degenerate || r.degenerate;
  }
  return m;
}

std::vector<std::pair<std::string, double>> MetricTable(const EvalReport& r) {
  return {{"precision_positive", r.positive.precision},
          {"recall_positive", r.positive.recall},
          {"f1_positive", r.positive.f1},
          {"precision_negative", r.negative.precision},
          {"recall_negative", r.negative.recall},
          {"f1_negative", r.negative.f1},
          {"macro_precision", r.macro_precision},
          {"macro_recall", r.macro_recall},
          {"macro_f1", r.macro_f1},
          {"mcc", r.mcc},
          {"nmcc", r.nmcc}};
}

nlohmann::json EvalReport::ToJson() const {
  return {{"condition", condition_id},
          {"fold", fold},
          {"confusion", {{"tp", confusion.tp}, {"fp", confusion.fp},
                         {"fn", confusion.fn}, {"tn", confusion.tn}}},
          {"positive", ClassJson(positive)},
          {"negative", ClassJson(negative)},
          {"macro_precision", macro_precision},
          {"macro_recall", macro_recall},
          {"macro_f1", macro_f1},
          {"mcc", mcc},
          {"nmcc", nmcc},
          {"degenerate", degenerate}};
}

EvalReport EvalReport::FromJson(const nlohmann::json& j) {
  EvalReport r;
  r.condition_id = j.value("condition", "");
  r.fold = j.value("fold", -1);
  const auto& c = j.at("confusion");
  r.confusion = {c.at("tp").get<int64_t>(), c.at("fp").get<int64_t>(),
                 c.at("fn").get<int64_t>(), c.at("tn").get<int64_t>()};
  r.positive = ClassFromJson(j.at("positive"));
  r.negative = ClassFromJson(j.at("negative"));
  r.macro_precision = j.at("macro_precision").get<double>();
  r.macro_recall = j.at("macro_recall").get<double>();
  r.macro_f1 = j.at("macro_f1").get<double>();
  r.mcc = j.at("mcc").get<double>();
  r.nmcc = j.at("nmcc").get<double>();
  r.degenerate = j.value("degenerate", false);
  return r;
}

void WriteReportCsvHeader(std::ostream& out) {
  out << "condition,fold,class,precision,recall,f1,macro_precision,macro_recall,"
         "macro_f1,mcc,nmcc\n";
}

void WriteReportCsvRows(std::ostream& out, const EvalReport& r,
                        const std::string& positive_name,
                        const std::string& negative_name) {
  auto row = [&](const std::string& name, const ClassMetrics& c) {
    out << r.condition_id << ',' << (r.fold < 0 ? std::string("mean") : std::to_string(r.fold))
        << ',' << name << ',' << c.precision << ',' << c.recall << ',' << c.f1 << ','
        << r.macro_precision << ',' << r.macro_recall << ',' << r.macro_f1 << ','
        << r.mcc << ',' << r.nmcc << '\n';
  };
  row(positive_name, r.positive);
  row(negative_name, r.negative);
}

}  // namespace civility
