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


// Command-line front end:
//   civility ingest|rq1|rq2|rq3|rq4|report [--task ct1|ct2] [--config run.json]
//            [--seed N] [--backend CMD] [--out DIR] [--corpus PATH --platform P]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "civility/backend_client.h"
#include "civility/errors.h"
#include "civility/harness.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace civility;

namespace {

struct Flags {
  std::string task;
  std::string config;
  std::optional<uint64_t> seed;
  std::string backend;
  std::string out;
  std::string corpus;
  std::string platform = "code_review";
  std::string maintainers;
  bool verbose = false;
};

RunConfig MakeConfig(const Flags& flags, bool need_dataset) {
  RunConfig config = flags.config.empty() ? RunConfig{} : RunConfig::Load(flags.config);
  if (!flags.task.empty()) config.task = ParseTask(flags.task);
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.backend.empty()) config.backend_command = flags.backend;
  if (!flags.out.empty()) config.output_dir = flags.out;
  if (!flags.corpus.empty()) {
    config.datasets = {{flags.corpus, ParsePlatform(flags.platform), flags.maintainers}};
  }
  if (need_dataset && config.datasets.empty()) {
    throw ContractError("no dataset: pass --corpus or list datasets in --config");
  }
  config.Validate();
  return config;
}

void WriteJson(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
  spdlog::info("wrote {}", path.string());
}

std::string Stem(const RunConfig& config, const DatasetSpec& d) {
  return std::string(ToString(config.task)) + "_" + std::string(ToString(d.platform));
}

std::unique_ptr<BackendClient> StartBackend(const RunConfig& config) {
  if (config.backend_command.empty()) return nullptr;
  return BackendClient::Launch(config.backend_command,
                               std::chrono::seconds(config.backend_timeout_seconds));
}

json Metadata(const RunConfig& config, const std::string& command) {
  json grids = json::object();
  for (ClassifierKind k : config.classifiers) {
    grids[std::string(ToString(k))] = config.SpaceFor(k).size();
  }
  return {{"command", command},
          {"config", config.ToJson()},
          {"seed", config.seed},
          {"eda_composition", ToString(config.eda_composition)},
          {"smote_variant", ToString(config.smote_variant)},
          {"context_separator", std::string(kContextSeparator)},
          {"search_space_sizes", grids},
          {"selection_metric", "nmcc"},
          {"joint_search", "hyperparameters x eda x ngram"}};
}

// RQ1 results for one dataset, reused from disk when the configuration
// that produced them is unchanged.
std::vector<ConditionResult> Rq1For(const RunConfig& config, const DatasetSpec& dataset,
                                    std::span<const DataPoint> data, const Resources& resources,
                                    BackendClient* backend) {
  fs::path path = fs::path(config.output_dir) / ("rq1_" + Stem(config, dataset) + ".json");
  json config_json = config.ToJson();
  config_json.erase("output_dir");
  if (fs::exists(path)) {
    std::ifstream in(path);
    json cached = json::parse(in);
    if (cached.value("config", json()) == config_json &&
        cached.value("backend", false) == (backend != nullptr)) {
      spdlog::info("reusing RQ1 results from {}", path.string());
      return ConditionsFromJson(cached.at("results"));
    }
  }
  auto results = RunRq1(data, config, resources, backend);
  WriteJson(path, {{"config", config_json},
                   {"backend", backend != nullptr},
                   {"platform", ToString(dataset.platform)},
                   {"results", ConditionsToJson(results)}});
  std::ofstream csv(fs::path(config.output_dir) / ("rq1_" + Stem(config, dataset) + ".csv"));
  WriteConditionCsv(csv, results, config.task);
  return results;
}

int Ingest(const RunConfig& config) {
  for (const DatasetSpec& d : config.datasets) {
    auto corpus = LoadDatasetCorpus(config, d);
    CorpusStats stats = ComputeStats(corpus);
    std::cout << d.path << " (" << ToString(d.platform) << "): " << stats.ToJson().dump() << '\n';
    WriteJson(fs::path(config.output_dir) / ("ingest_" + std::string(ToString(d.platform)) + ".json"),
              stats.ToJson());
    RoleResolver roles = d.maintainers.empty()
                             ? RoleResolver::FromRecords(corpus)
                             : RoleResolver::FromMaintainers(corpus, LoadMaintainers(d.maintainers));
    std::ofstream csv(fs::path(config.output_dir) /
                      ("conversational_" + Stem(config, d) + ".csv"));
    WriteConversationalCsv(csv, corpus, config.task, roles);
  }
  return 0;
}

int Rq1(const RunConfig& config) {
  Resources resources = LoadResources(config);
  auto backend = StartBackend(config);
  for (const DatasetSpec& d : config.datasets) {
    auto data = LoadDataset(config, d);
    auto results = Rq1For(config, d, data, resources, backend.get());
    for (const ConditionResult& r : results) {
      std::cout << ToString(d.platform) << ' ' << r.id << " nMCC=" << r.mean.nmcc
                << " macroF1=" << r.mean.macro_f1 << '\n';
    }
  }
  return 0;
}

int Rq2(const RunConfig& config) {
  Resources resources = LoadResources(config);
  auto backend = StartBackend(config);
  for (const DatasetSpec& d : config.datasets) {
    auto data = LoadDataset(config, d);
    auto rq1 = Rq1For(config, d, data, resources, backend.get());
    Rq2Report report = RunRq2(data, rq1, config, resources, backend.get());
    WriteJson(fs::path(config.output_dir) / ("rq2_" + Stem(config, d) + ".json"), report.ToJson());
    std::ofstream csv(fs::path(config.output_dir) / ("rq2_" + Stem(config, d) + ".csv"));
    csv << "condition,metric,rq1,rq2,delta\n";
    for (const DeltaRow& r : report.rows) {
      csv << report.condition_id << ',' << r.metric << ',' << r.rq1 << ',' << r.rq2 << ','
          << r.delta << '\n';
      std::cout << ToString(d.platform) << ' ' << report.condition_id << ' ' << r.metric
                << " delta=" << r.delta << '\n';
    }
  }
  return 0;
}

int Rq3(const RunConfig& config) {
  if (config.datasets.size() != 2 || config.datasets[0].platform == config.datasets[1].platform) {
    throw ContractError("rq3 needs one code_review and one issues dataset");
  }
  Resources resources = LoadResources(config);
  auto backend = StartBackend(config);
  std::vector<std::vector<DataPoint>> data;
  std::vector<std::vector<ConditionResult>> rq1;
  for (const DatasetSpec& d : config.datasets) {
    data.push_back(LoadDataset(config, d));
    rq1.push_back(Rq1For(config, d, data.back(), resources, backend.get()));
  }
  json out = json::array();
  std::ofstream csv(fs::path(config.output_dir) /
                    ("rq3_" + std::string(ToString(config.task)) + ".csv"));
  WriteReportCsvHeader(csv);
  for (std::size_t from = 0; from < 2; ++from) {
    std::size_t to = 1 - from;
    for (const Rq3Result& r : RunRq3Direction(data[from], rq1[from], data[to], resources,
                                              config.Options(), backend.get())) {
      out.push_back(r.ToJson());
      WriteReportCsvRows(csv, r.report, LabelName(config.task, 1), LabelName(config.task, 0));
      std::cout << r.report.condition_id << " nMCC=" << r.report.nmcc << '\n';
    }
  }
  WriteJson(fs::path(config.output_dir) / ("rq3_" + std::string(ToString(config.task)) + ".json"),
            out);
  return 0;
}

int Rq4(const RunConfig& config) {
  Resources resources = LoadResources(config);
  auto backend = StartBackend(config);
  std::vector<std::string> names;
  const LoadOptions options = CorpusOptions(config);
  for (const auto& [name, category] : options.mapping.entries()) {
    names.push_back(name);
  }
  for (const DatasetSpec& d : config.datasets) {
    auto data = LoadDataset(config, d);
    auto rq1 = Rq1For(config, d, data, resources, backend.get());
    Rq4Report report = RunRq4(data, rq1, names);
    WriteJson(fs::path(config.output_dir) / ("rq4_" + Stem(config, d) + ".json"), report.ToJson());
    std::ofstream csv(fs::path(config.output_dir) / ("rq4_" + Stem(config, d) + ".csv"));
    report.WriteCsv(csv);
    report.WriteCsv(std::cout);
    for (const std::string& note : report.notes) std::cout << "note: " << note << '\n';
  }
  return 0;
}

// Collects every RQ1 result file in the output directory into one table.
int Report(const RunConfig& config) {
  fs::path dir(config.output_dir);
  std::ofstream csv(dir / "summary.csv");
  csv << "file,condition,nmcc,mcc,macro_precision,macro_recall,macro_f1,best\n";
  json summary = json::object();
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("rq1_", 0) != 0 || entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    auto results = ConditionsFromJson(json::parse(in).at("results"));
    if (results.empty()) continue;
    ++files;
    const ConditionResult& best = BestCondition(results);
    for (const ConditionResult& r : results) {
      csv << name << ',' << r.id << ',' << r.mean.nmcc << ',' << r.mean.mcc << ','
          << r.mean.macro_precision << ',' << r.mean.macro_recall << ',' << r.mean.macro_f1
          << ',' << (&r == &best ? 1 : 0) << '\n';
    }
    summary[name] = {{"conditions", results.size()},
                     {"best", best.id},
                     {"best_nmcc", best.mean.nmcc},
                     {"best_setting", MostFrequentSetting(best).ToJson()}};
    std::cout << name << ": " << results.size() << " conditions, best " << best.id
              << " (nMCC " << best.mean.nmcc << ")\n";
  }
  if (files == 0) throw Error("no rq1_*.json results in " + dir.string());
  WriteJson(dir / "summary.json", summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incivility detection experiments for threaded developer discussions"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--task", flags.task, "Classification task")
        ->check(CLI::IsMember({"ct1", "ct2"}));
    cmd->add_option("--config", flags.config, "Run config JSON");
    cmd->add_option("--seed", flags.seed, "Root seed");
    cmd->add_option("--backend", flags.backend, "Backend command (run through /bin/sh)");
    cmd->add_option("--out", flags.out, "Output directory");
    cmd->add_option("--corpus", flags.corpus, "Single corpus file, overrides config datasets");
    cmd->add_option("--platform", flags.platform, "Platform of --corpus")
        ->check(CLI::IsMember({"code_review", "issues"}));
    cmd->add_option("--maintainers", flags.maintainers, "Maintainers file for --corpus");
    cmd->add_flag("-v,--verbose", flags.verbose, "Debug logging");
  };
  std::map<std::string, int (*)(const RunConfig&)> handlers = {
      {"ingest", Ingest}, {"rq1", Rq1}, {"rq2", Rq2},
      {"rq3", Rq3},       {"rq4", Rq4}, {"report", Report}};
  const std::map<std::string, std::string> help = {
      {"ingest", "Load corpora and print dataset statistics"},
      {"rq1", "Nested cross-validation over every classifier x balancing condition"},
      {"rq2", "Rerun the best condition with the previous message as context"},
      {"rq3", "Cross-platform training and testing in both directions"},
      {"rq4", "Per-TBDF misclassification rates"},
      {"report", "Summarize RQ1 results found in the output directory"}};
  for (const auto& [name, description] : help) add_common(app.add_subcommand(name, description));
  CLI11_PARSE(app, argc, argv);
  if (flags.verbose) spdlog::set_level(spdlog::level::debug);

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    RunConfig config = MakeConfig(flags, command != "report");
    fs::create_directories(config.output_dir);
    if (command != "report") {
      WriteJson(fs::path(config.output_dir) / ("metadata_" + command + ".json"),
                Metadata(config, command));
    }
    return handlers.at(command)(config);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
