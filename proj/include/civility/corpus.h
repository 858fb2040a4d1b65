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

// Discussion corpus data model: threads of messages from a code review
// mailing list or an issue tracker, each message optionally labeled
// tone-bearing / non-tone-bearing and split into sentences that carry
// tone-bearing discussion features (TBDFs).

#ifndef CIVILITY_CORPUS_H_
#define CIVILITY_CORPUS_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "civility/preprocess.h"
#include "json.hpp"

namespace civility {

enum class Platform { kCodeReview, kIssues };
enum class AuthorRole { kMaintainer, kDeveloper };
enum class Ct1Label { kToneBearing, kNonToneBearing };
enum class Ct2Label { kCivil, kUncivil };
enum class TbdfCategory { kCivilPositive, kCivilNeutral, kCivilNegative, kUncivil };

std::string_view ToString(Platform p);
std::string_view ToString(AuthorRole r);
std::string_view ToString(Ct1Label l);
std::string_view ToString(Ct2Label l);
std::string_view ToString(TbdfCategory c);
// Accept the ToString spellings; throw ParseError otherwise.
Platform ParsePlatform(std::string_view s);
AuthorRole ParseAuthorRole(std::string_view s);
Ct1Label ParseCt1Label(std::string_view s);
TbdfCategory ParseTbdfCategory(std::string_view s);

struct Tbdf {
  std::string name;
  TbdfCategory category;

  friend bool operator==(const Tbdf&, const Tbdf&) = default;
};

// TBDF name -> civility category. Names are matched case-insensitively.
class TbdfMapping {
 public:
  TbdfMapping() = default;
  explicit TbdfMapping(std::map<std::string, TbdfCategory> categories);

  // The bundled default covering every TBDF name the two datasets use.
  static TbdfMapping Default();
  static TbdfMapping FromJson(const nlohmann::json& j);
  static TbdfMapping LoadFile(const std::string& path);

  // Throws MappingError for unknown names.
  Tbdf Lookup(std::string_view name) const;
  bool Contains(std::string_view name) const;
  const std::map<std::string, TbdfCategory>& entries() const { return categories_; }

 private:
  std::map<std::string, TbdfCategory> categories_;
};

struct Sentence {
  std::string text;
  std::vector<Tbdf> tbdfs;  // sorted by name, unique
  std::optional<Ct2Label> ct2_label;  // set iff tbdfs is non-empty
};

struct Message {
  std::string id;
  std::string author_id;
  AuthorRole author_role = AuthorRole::kDeveloper;
  bool role_supplied = false;  // the record carried an explicit role
  int64_t timestamp = 0;       // epoch seconds
  std::string raw_text;
  std::string clean_text;
  bool empty_after_cleaning = false;
  int position_index = 0;
  std::optional<Ct1Label> ct1_label;
  std::vector<Sentence> sentences;
  bool sentences_annotated = false;  // sentences came from the record
};

struct Thread {
  std::string id;
  Platform platform = Platform::kCodeReview;
  std::vector<Message> messages;  // ascending timestamp
  int64_t total_duration = 0;     // last timestamp - first timestamp
};

// Sentences are split after every '.', '!' or '?'; the delimiter stays with
// the preceding sentence, surrounding whitespace is trimmed and empty pieces
// are dropped.
std::vector<std::string> SplitSentences(std::string_view clean_text);

// Uncivil iff any member is uncivil. Throws ContractError on an empty set.
Ct2Label DeriveCt2Label(const std::vector<Tbdf>& tbdfs);

struct LoadOptions {
  TbdfMapping mapping = TbdfMapping::Default();
  CleanConfig clean;
};

// Reads newline-delimited JSON message records (see README for the schema).
// Records are grouped into threads in order of first appearance; messages
// are ordered by timestamp (stable on ties) and re-indexed from 0.
// Throws ParseError (with line number) or MappingError.
std::vector<Thread> LoadCorpus(const std::string& path, Platform platform,
                               const LoadOptions& options = {});
std::vector<Thread> ReadCorpus(std::istream& in, Platform platform,
                               const LoadOptions& options = {});

// Serializes threads back to the record format (round-trips through
// ReadCorpus).
void WriteCorpus(std::ostream& out, const std::vector<Thread>& threads);

// Throws ContractError describing the first violated invariant.
void ValidateThread(const Thread& thread);

struct CorpusStats {
  std::size_t threads = 0;
  std::size_t messages = 0;
  std::size_t tone_bearing = 0;
  std::size_t non_tone_bearing = 0;
  std::size_t civil_sentences = 0;
  std::size_t uncivil_sentences = 0;
  std::size_t empty_after_cleaning = 0;
  std::map<std::string, std::size_t> tbdf_counts;

  nlohmann::json ToJson() const;
};

CorpusStats ComputeStats(const std::vector<Thread>& threads);

}  // namespace civility

#endif  // CIVILITY_CORPUS_H_
