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

#ifndef CIVILITY_FEATURES_H_
#define CIVILITY_FEATURES_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "civility/corpus.h"
#include "civility/sparse.h"
#include "json.hpp"

namespace civility {

enum class NgramMode { kUni, kUniBi };
enum class Task { kCt1, kCt2 };

std::string_view ToString(NgramMode m);
NgramMode ParseNgramMode(std::string_view s);
std::string_view ToString(Task t);
Task ParseTask(std::string_view s);

// Unigrams, plus space-joined adjacent pairs in kUniBi mode.
std::vector<std::string> ExtractTerms(const std::vector<std::string>& tokens,
                                      NgramMode mode);

// Term index and smoothed inverse document frequencies,
// idf(t) = ln((1 + N) / (1 + df(t))) + 1. Terms are indexed in lexicographic
// order. Weights are raw term counts times idf; no length normalization.
class VocabularyModel {
 public:
  // Throws ContractError when `train_docs` is empty.
  static VocabularyModel Fit(const std::vector<std::vector<std::string>>& train_docs,
                             NgramMode mode);

  // Out-of-vocabulary terms contribute nothing.
  SparseVector Transform(const std::vector<std::string>& tokens) const;

  std::optional<uint32_t> IndexOf(std::string_view term) const;
  std::size_t DocumentFrequency(std::string_view term) const;
  double Idf(std::string_view term) const;  // 0 when unknown

  std::size_t size() const { return terms_.size(); }
  std::size_t num_documents() const { return num_documents_; }
  NgramMode mode() const { return mode_; }
  const std::vector<std::string>& terms() const { return terms_; }

  nlohmann::json ToJson() const;
  static VocabularyModel FromJson(const nlohmann::json& j);

 private:
  std::unordered_map<std::string, uint32_t> index_;
  std::vector<std::string> terms_;
  std::vector<std::size_t> document_frequency_;
  std::vector<double> idf_;
  std::size_t num_documents_ = 0;
  NgramMode mode_ = NgramMode::kUni;
};

// Maintainer names and email addresses, lowercased.
struct MaintainerList {
  std::set<std::string> names;
  std::set<std::string> emails;
};

// Accepts either a Linux-style MAINTAINERS file (only "M:" entries are read)
// or a plain list with one "Name <email>", name or address per line.
MaintainerList ParseMaintainers(std::istream& in);
MaintainerList LoadMaintainers(const std::string& path);

// Resolves AUTHOR_ROLE and author identity. Identities that share a name or
// an email address collapse into one group. With a maintainer list, an
// author is a maintainer iff any identity of its group is listed; without
// one the role recorded in the corpus is used (developer when absent).
class RoleResolver {
 public:
  RoleResolver() = default;
  static RoleResolver FromRecords(const std::vector<Thread>& corpus);
  static RoleResolver FromMaintainers(const std::vector<Thread>& corpus,
                                      MaintainerList maintainers);

  AuthorRole Resolve(const Message& message) const;
  // Canonical group key; equal keys mean the same person.
  std::string IdentityOf(std::string_view author_id) const;
  bool uses_maintainers() const { return maintainers_.has_value(); }

 private:
  void Build(const std::vector<Thread>& corpus);

  std::unordered_map<std::string, std::string> group_of_;  // author_id -> key
  std::unordered_map<std::string, std::string> group_of_part_;  // name/email -> key
  std::unordered_map<std::string, bool> group_is_maintainer_;
  std::optional<MaintainerList> maintainers_;
};

// Column names of the conversational block for a task, in vector order.
const std::vector<std::string>& ConversationalFeatureNames(Task task);

struct NamedVector {
  std::vector<std::string> names;
  std::vector<double> values;

  // Throws std::out_of_range for unknown names.
  double Get(std::string_view name) const;
};

// Conversational features of one message (kCt1) or one sentence of a
// message (kCt2, `sentence_index` required). Ratios whose denominator is
// zero are 0; single-message or zero-duration threads have all temporal
// features 0. Booleans are 0/1.
NamedVector ConversationalFeatures(const Thread& thread, std::size_t message_index,
                                   std::optional<std::size_t> sentence_index,
                                   Task task, const RoleResolver& roles);

// Number of whitespace-separated words.
std::size_t WordCount(std::string_view text);

// Scales the unbounded CHAR_TEXT column by its training maximum and clips
// every conversational value to [0, 1], keeping inputs non-negative for
// multinomial Naive Bayes.
class ConversationalScaler {
 public:
  static ConversationalScaler Fit(const std::vector<std::vector<double>>& rows, Task task);
  std::vector<double> Apply(std::vector<double> row) const;
  nlohmann::json ToJson() const;
  static ConversationalScaler FromJson(const nlohmann::json& j);

 private:
  std::vector<double> divisors_;
};

// CSV audit exports.
void WriteConversationalCsv(std::ostream& out, const std::vector<Thread>& corpus,
                            Task task, const RoleResolver& roles);
// One "row,term,weight" line per non-zero entry.
void WriteTextualCsv(std::ostream& out, const std::vector<SparseVector>& rows,
                     const VocabularyModel& vocab);

}  // namespace civility

#endif  // CIVILITY_FEATURES_H_
