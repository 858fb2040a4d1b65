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


// A small synthetic discussion corpus with a planted lexical signal, used
// for desk-scale end-to-end runs. Tone-bearing messages always contain at
// least one marker word; civil and uncivil sentences draw markers from
// disjoint word lists.

#ifndef CIVILITY_DESK_CORPUS_H_
#define CIVILITY_DESK_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "civility/corpus.h"
#include "civility/features.h"

namespace civility {

struct DeskCorpusOptions {
  int threads = 40;
  int messages_per_thread = 5;
  double tone_bearing_rate = 0.35;
  uint64_t seed = 7;
};

std::vector<Thread> GenerateDeskCorpus(const DeskCorpusOptions& options = {});

struct SeparabilityResult {
  bool separable = false;
  std::size_t documents = 0;
  // Normalized tokens that occur only in negative-class documents; every
  // negative document contains one of them.
  std::vector<std::string> witness;
  std::string detail;
};

// Exhaustive check over the normalized vocabulary that a single "contains
// any of these tokens" rule labels every data point of the task correctly.
// Such a disjunction is a linear threshold function, so success proves
// linear separability of the bag-of-words representation.
SeparabilityResult CheckSeparable(const std::vector<Thread>& corpus, Task task);

}  // namespace civility

#endif  // CIVILITY_DESK_CORPUS_H_
