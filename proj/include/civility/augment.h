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

// Easy Data Augmentation: synonym replacement (SR), random insertion (RI),
// random swap (RS) and random deletion (RD) over whitespace-separated words.

#ifndef CIVILITY_AUGMENT_H_
#define CIVILITY_AUGMENT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "civility/preprocess.h"
#include "civility/rng.h"
#include "json.hpp"

namespace civility {

using Words = std::vector<std::string>;

enum class EdaComposition {
  kPerOperation,  // copy i applies only operation i mod 4 (SR, RI, RS, RD)
  kComposed,      // every copy applies SR -> RI -> RS -> RD
};

std::string_view ToString(EdaComposition c);
EdaComposition ParseEdaComposition(std::string_view s);

struct EdaConfig {
  double alpha = 0.1;  // fraction of words changed by SR/RI/RS, in (0, 1)
  double p_rd = 0.1;   // deletion probability, in [0, 1]
  int n_aug = 4;       // augmented copies per original
  uint64_t seed = 0;
  EdaComposition composition = EdaComposition::kPerOperation;

  // Throws ContractError on out-of-range fields.
  void Validate() const;
  // Short stable identifier, e.g. "a0.1_p0.05_n4".
  std::string Id() const;

  nlohmann::json ToJson() const;
  static EdaConfig FromJson(const nlohmann::json& j);
};

// The eight settings searched by default: alpha x p_rd x n_aug over
// {0.05, 0.1} x {0.05, 0.1} x {4, 8}.
std::vector<EdaConfig> DefaultEdaGrid();

// Number of words SR, RI and RS change: max(1, round(alpha * length)).
std::size_t OperationCount(double alpha, std::size_t length);

// Lowercased word -> synonyms. A word never lists itself.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;
  explicit SynonymLexicon(std::map<std::string, std::vector<std::string>> entries);

  static SynonymLexicon FromJson(const nlohmann::json& j);
  static SynonymLexicon LoadFile(const std::string& path);

  // Empty for unknown words. `word` is matched after lowercasing.
  const std::vector<std::string>& Synonyms(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

// The key used for lexicon and stopword lookups: lowercased with leading and
// trailing ASCII punctuation removed.
std::string LookupKey(std::string_view word);

// Replaces one occurrence of each of min(n, #eligible) distinct eligible
// words with a random synonym. Eligible: not a stopword, has synonyms.
Words SynonymReplacement(const Words& words, std::size_t n,
                         const SynonymLexicon& lexicon, Rng& rng,
                         const StopwordSet& stopwords = DefaultStopwords());

// n times: picks a random eligible word of the input and inserts one of its
// synonyms at a random position. Stops early when nothing is eligible.
Words RandomInsertion(const Words& words, std::size_t n,
                      const SynonymLexicon& lexicon, Rng& rng,
                      const StopwordSet& stopwords = DefaultStopwords());

// n times: swaps the words at two distinct random positions.
Words RandomSwap(const Words& words, std::size_t n, Rng& rng);

// Keeps each word with probability 1 - p. If every word would be deleted a
// single uniformly chosen word survives.
Words RandomDeletion(const Words& words, double p, Rng& rng);

// n_aug augmented versions of `text`; the original is not included.
std::vector<std::string> AugmentRecord(std::string_view text, const EdaConfig& config,
                                       const SynonymLexicon& lexicon, Rng& rng,
                                       const StopwordSet& stopwords = DefaultStopwords());

// The per-record stream: records are augmented identically regardless of
// processing order.
Rng RecordRng(const EdaConfig& config, std::string_view record_id);

}  // namespace civility

#endif  // CIVILITY_AUGMENT_H_
