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

#ifndef CIVILITY_PREPROCESS_H_
#define CIVILITY_PREPROCESS_H_

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"

namespace civility {

using StopwordSet = std::unordered_set<std::string>;

// The frozen English stopword list (179 entries) used for both token
// normalization and augmentation eligibility.
const StopwordSet& DefaultStopwords();

// One word per line; blank lines and lines starting with '#' are skipped.
StopwordSet LoadStopwords(const std::string& path);

// The 21 sign-off phrases removed from the end of emails.
std::vector<std::string> DefaultSignatureTerms();

// Options for CleanMessage. Each strip_* flag toggles one cleaning step.
struct CleanConfig {
  bool strip_headers = true;
  bool strip_greetings = true;
  bool strip_signatures = true;
  bool strip_reply_quotes = true;
  // Best-effort automatic approximation of the manual cleaning step:
  // removes code spans/fences, @mentions and non-ASCII characters.
  bool heuristic_step1 = false;
  std::vector<std::string> signature_terms = DefaultSignatureTerms();
  // Lines whose first non-blank character is one of these are reply quotes.
  std::string quote_markers = ">";

  // Throws ContractError when signature_terms is empty or not lowercase.
  void Validate() const;

  static CleanConfig FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

// Removes reply headers ("On ... wrote:"), greetings and review/test
// attributions, signature blocks and reply quotes. The result may be empty;
// callers flag such messages. Idempotent.
std::string CleanMessage(std::string_view raw_text, const CleanConfig& config);

// Lowercases, strips punctuation, drops stopwords and Porter-stems every
// remaining word. Only the classical classifiers consume this form.
std::vector<std::string> NormalizeForClassical(
    std::string_view clean_text,
    const StopwordSet& stopwords = DefaultStopwords());

// Splits on ASCII whitespace.
std::vector<std::string> SplitWords(std::string_view text);

// Trims ASCII whitespace from both ends.
std::string_view Trim(std::string_view text);

std::string ToLowerAscii(std::string_view text);

}  // namespace civility

#endif  // CIVILITY_PREPROCESS_H_
