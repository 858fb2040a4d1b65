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


// Writes the synthetic desk corpus and refuses to do so unless both tasks
// are separable by the planted markers.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "civility/desk_corpus.h"

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic desk corpus"};
  civility::DeskCorpusOptions options;
  std::string out = "desk_corpus.jsonl";
  app.add_option("--seed", options.seed, "Generator seed");
  app.add_option("--threads", options.threads, "Number of threads");
  app.add_option("--out", out, "Output NDJSON path");
  CLI11_PARSE(app, argc, argv);

  auto corpus = civility::GenerateDeskCorpus(options);
  for (civility::Task task : {civility::Task::kCt1, civility::Task::kCt2}) {
    auto check = civility::CheckSeparable(corpus, task);
    std::cout << civility::ToString(task) << ": " << check.documents << " data points, "
              << check.detail << (check.separable ? " (separable)" : " (NOT separable)") << '\n';
    if (!check.separable) return 1;
  }
  std::ofstream file(out);
  civility::WriteCorpus(file, corpus);
  std::cout << "wrote " << out << '\n';
  return file ? 0 : 1;
}
