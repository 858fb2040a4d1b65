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

#include "civility/features.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "civility/errors.h"
#include "civility/preprocess.h"

namespace civility {
namespace {

struct IdentityParts {
  std::string name;   // lowercased, may be empty
  std::string email;  // lowercased, may be empty
};

IdentityParts ParseIdentity(std::string_view author_id) {
  IdentityParts parts;
  std::string_view id = Trim(author_id);
  std::size_t lt = id.find('<');
  std::size_t gt = id.find('>', lt == std::string_view::npos ? 0 : lt);
  if (lt != std::string_view::npos && gt != std::string_view::npos) {
    parts.email = ToLowerAscii(Trim(id.substr(lt + 1, gt - lt - 1)));
    std::string_view name = Trim(id.substr(0, lt));
    if (name.size() >= 2 && name.front() == '"' && name.back() == '"') {
      name = name.substr(1, name.size() - 2);
    }
    parts.name = ToLowerAscii(Trim(name));
  } else if (id.find('@') != std::string_view::npos &&
             id.find(' ') == std::string_view::npos) {
    parts.email = ToLowerAscii(id);
  } else {
    parts.name = ToLowerAscii(id);
  }
  return parts;
}

std::vector<std::string> PartKeys(const IdentityParts& p) {
  std::vector<std::string> keys;
  if (!p.name.empty()) keys.push_back("n:" + p.name);
  if (!p.email.empty()) keys.push_back("e:" + p.email);
  return keys;
}

class UnionFind {
 public:
  std::size_t Add() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }
  std::size_t Find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void Union(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::size_t CodePointCount(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

double Ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

const char* const kCharText = "CHAR_TEXT";

}  // namespace

std::string_view ToString(NgramMode m) { return m == NgramMode::kUni ? "uni" : "unibi"; }

NgramMode ParseNgramMode(std::string_view s) {
  if (s == "uni") return NgramMode::kUni;
  if (s == "unibi") return NgramMode::kUniBi;
  throw ParseError("unknown n-gram mode '" + std::string(s) + "'", 0);
}

std::string_view ToString(Task t) { return t == Task::kCt1 ? "ct1" : "ct2"; }

Task ParseTask(std::string_view s) {
  if (s == "ct1") return Task::kCt1;
  if (s == "ct2") return Task::kCt2;
  throw ParseError("unknown task '" + std::string(s) + "'", 0);
}

std::vector<std::string> ExtractTerms(const std::vector<std::string>& tokens,
                                      NgramMode mode) {
  std::vector<std::string> terms(tokens.begin(), tokens.end());
  if (mode == NgramMode::kUniBi) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      terms.push_back(tokens[i] + " " + tokens[i + 1]);
    }
  }
  return terms;
}

VocabularyModel VocabularyModel::Fit(
    const std::vector<std::vector<std::string>>& train_docs, NgramMode mode) {
  if (train_docs.empty()) throw ContractError("cannot fit a vocabulary on an empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : train_docs) {
    std::vector<std::string> terms = ExtractTerms(doc, mode);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (std::string& t : terms) ++df[std::move(t)];
  }
  VocabularyModel v;
  v.mode_ = mode;
  v.num_documents_ = train_docs.size();
  const double n = static_cast<double>(v.num_documents_);
  for (auto& [term, count] : df) {
    v.index_.emplace(term, static_cast<uint32_t>(v.terms_.size()));
    v.terms_.push_back(term);
    v.document_frequency_.push_back(count);
    v.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return v;
}

SparseVector VocabularyModel::Transform(const std::vector<std::string>& tokens) const {
  std::vector<std::pair<uint32_t, double>> pairs;
  for (const std::string& term : ExtractTerms(tokens, mode_)) {
    auto it = index_.find(term);
    if (it != index_.end()) pairs.emplace_back(it->second, idf_[it->second]);
  }
  return SparseVector::FromPairs(std::move(pairs));
}

std::optional<uint32_t> VocabularyModel::IndexOf(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t VocabularyModel::DocumentFrequency(std::string_view term) const {
  auto i = IndexOf(term);
  return i ? document_frequency_[*i] : 0;
}

double VocabularyModel::Idf(std::string_view term) const {
  auto i = IndexOf(term);
  return i ? idf_[*i] : 0.0;
}

nlohmann::json VocabularyModel::ToJson() const {
  return {{"mode", ToString(mode_)},
          {"num_documents", num_documents_},
          {"terms", terms_},
          {"document_frequency", document_frequency_}};
}

VocabularyModel VocabularyModel::FromJson(const nlohmann::json& j) {
  VocabularyModel v;
  v.mode_ = ParseNgramMode(j.at("mode").get<std::string>());
  v.num_documents_ = j.at("num_documents").get<std::size_t>();
  v.terms_ = j.at("terms").get<std::vector<std::string>>();
  v.document_frequency_ = j.at("document_frequency").get<std::vector<std::size_t>>();
  if (v.terms_.size() != v.document_frequency_.size()) {
    throw ParseError("vocabulary terms and frequencies differ in length", 0);
  }
  const double n = static_cast<double>(v.num_documents_);
  for (std::size_t i = 0; i < v.terms_.size(); ++i) {
    v.index_.emplace(v.terms_[i], static_cast<uint32_t>(i));
    v.idf_.push_back(
        std::log((1.0 + n) / (1.0 + static_cast<double>(v.document_frequency_[i]))) + 1.0);
  }
  return v;
}

MaintainerList ParseMaintainers(std::istream& in) {
  MaintainerList list;
  std::string line;
  std::vector<std::string> lines;
  bool structured = false;
  while (std::getline(in, line)) {
    std::string_view t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.size() >= 2 && t[1] == ':' && std::isupper(static_cast<unsigned char>(t[0]))) {
      structured = true;
    }
    lines.emplace_back(t);
  }
  for (const std::string& l : lines) {
    std::string_view entry = l;
    if (structured) {
      if (entry.size() < 2 || entry.substr(0, 2) != "M:") continue;
      entry = Trim(entry.substr(2));
    }
    IdentityParts p = ParseIdentity(entry);
    if (!p.name.empty()) list.names.insert(p.name);
    if (!p.email.empty()) list.emails.insert(p.email);
  }
  return list;
}

MaintainerList LoadMaintainers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open maintainers file " + path);
  return ParseMaintainers(in);
}

RoleResolver RoleResolver::FromRecords(const std::vector<Thread>& corpus) {
  RoleResolver r;
  r.Build(corpus);
  return r;
}

RoleResolver RoleResolver::FromMaintainers(const std::vector<Thread>& corpus,
                                           MaintainerList maintainers) {
  RoleResolver r;
  r.maintainers_ = std::move(maintainers);
  r.Build(corpus);
  return r;
}

void RoleResolver::Build(const std::vector<Thread>& corpus) {
  std::vector<std::string> ids;
  for (const Thread& t : corpus) {
    for (const Message& m : t.messages) ids.push_back(m.author_id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  UnionFind uf;
  std::unordered_map<std::string, std::size_t> part_node;
  std::vector<std::size_t> id_node;
  for (const std::string& id : ids) {
    std::size_t node = uf.Add();
    id_node.push_back(node);
    for (const std::string& key : PartKeys(ParseIdentity(id))) {
      auto [it, inserted] = part_node.emplace(key, node);
      if (!inserted) uf.Union(node, it->second);
    }
  }
  // The group key is the lexicographically smallest author id in the group.
  std::unordered_map<std::size_t, std::string> root_key;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    root_key.emplace(uf.Find(id_node[i]), ids[i]);
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    group_of_[ids[i]] = root_key[uf.Find(id_node[i])];
  }
  for (const auto& [key, node] : part_node) {
    group_of_part_[key] = root_key[uf.Find(node)];
  }
  if (maintainers_) {
    for (const std::string& id : ids) {
      IdentityParts p = ParseIdentity(id);
      bool listed = (!p.name.empty() && maintainers_->names.count(p.name)) ||
                    (!p.email.empty() && maintainers_->emails.count(p.email));
      bool& flag = group_is_maintainer_[group_of_[id]];
      flag = flag || listed;
    }
  }
}

std::string RoleResolver::IdentityOf(std::string_view author_id) const {
  auto it = group_of_.find(std::string(author_id));
  if (it != group_of_.end()) return it->second;
  for (const std::string& key : PartKeys(ParseIdentity(author_id))) {
    auto p = group_of_part_.find(key);
    if (p != group_of_part_.end()) return p->second;
  }
  return std::string(author_id);
}

AuthorRole RoleResolver::Resolve(const Message& message) const {
  if (!maintainers_) {
    return message.role_supplied ? message.author_role : AuthorRole::kDeveloper;
  }
  auto it = group_is_maintainer_.find(IdentityOf(message.author_id));
  if (it != group_is_maintainer_.end()) {
    return it->second ? AuthorRole::kMaintainer : AuthorRole::kDeveloper;
  }
  IdentityParts p = ParseIdentity(message.author_id);
  bool listed = (!p.name.empty() && maintainers_->names.count(p.name)) ||
                (!p.email.empty() && maintainers_->emails.count(p.email));
  return listed ? AuthorRole::kMaintainer : AuthorRole::kDeveloper;
}

const std::vector<std::string>& ConversationalFeatureNames(Task task) {
  static const std::vector<std::string> kCt1 = {
      "AUTHOR_ROLE", "FIRST_AUTHOR", "CHAR_TEXT", "LEN_TEXT", "POS_TEXT_T",
      "LAST_COMMENT", "TIME_FIRST_COMMENT", "TIME_TEXT_LAST",
      "TIME_PREVIOUS_COMMENT", "TIME_TEXT_NEXT"};
  static const std::vector<std::string> kCt2 = {
      "AUTHOR_ROLE", "FIRST_AUTHOR", "CHAR_SENT", "LEN_SENT_T", "LEN_SENT_C",
      "POS_SENT_E", "POS_SENT_T", "LAST_COMMENT", "TIME_FIRST_COMMENT",
      "TIME_TEXT_LAST", "TIME_PREVIOUS_COMMENT", "TIME_TEXT_NEXT"};
  return task == Task::kCt1 ? kCt1 : kCt2;
}

double NamedVector::Get(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  throw std::out_of_range("no feature named " + std::string(name));
}

std::size_t WordCount(std::string_view text) { return SplitWords(text).size(); }

NamedVector ConversationalFeatures(const Thread& thread, std::size_t message_index,
                                   std::optional<std::size_t> sentence_index,
                                   Task task, const RoleResolver& roles) {
  if (message_index >= thread.messages.size()) {
    throw ContractError("message index out of range for thread " + thread.id);
  }
  const Message& msg = thread.messages[message_index];
  const std::size_t n = thread.messages.size();
  std::map<std::string, double> f;

  f["AUTHOR_ROLE"] = roles.Resolve(msg) == AuthorRole::kMaintainer ? 1.0 : 0.0;
  f["FIRST_AUTHOR"] =
      roles.IdentityOf(msg.author_id) == roles.IdentityOf(thread.messages.front().author_id)
          ? 1.0
          : 0.0;
  f["LAST_COMMENT"] = message_index + 1 == n ? 1.0 : 0.0;

  const double total = static_cast<double>(thread.total_duration);
  const double t = static_cast<double>(msg.timestamp);
  if (n > 1 && total > 0) {
    const double first = static_cast<double>(thread.messages.front().timestamp);
    const double last = static_cast<double>(thread.messages.back().timestamp);
    f["TIME_FIRST_COMMENT"] = (t - first) / total;
    f["TIME_TEXT_LAST"] = (last - t) / total;
    f["TIME_PREVIOUS_COMMENT"] =
        message_index > 0
            ? (t - static_cast<double>(thread.messages[message_index - 1].timestamp)) / total
            : 0.0;
    f["TIME_TEXT_NEXT"] =
        message_index + 1 < n
            ? (static_cast<double>(thread.messages[message_index + 1].timestamp) - t) / total
            : 0.0;
  } else {
    f["TIME_FIRST_COMMENT"] = f["TIME_TEXT_LAST"] = 0.0;
    f["TIME_PREVIOUS_COMMENT"] = f["TIME_TEXT_NEXT"] = 0.0;
  }

  if (task == Task::kCt1) {
    std::size_t longest = 0;
    for (const Message& m : thread.messages) longest = std::max(longest, WordCount(m.clean_text));
    f["CHAR_TEXT"] = static_cast<double>(CodePointCount(msg.clean_text));
    f["LEN_TEXT"] = Ratio(static_cast<double>(WordCount(msg.clean_text)),
                          static_cast<double>(longest));
    f["POS_TEXT_T"] = static_cast<double>(message_index + 1) / static_cast<double>(n);
  } else {
    if (!sentence_index || *sentence_index >= msg.sentences.size()) {
      throw ContractError("sentence index required and in range for CT2 features");
    }
    const Sentence& sentence = msg.sentences[*sentence_index];
    std::size_t longest_words_thread = 0, longest_chars_thread = 0;
    std::size_t thread_sentences = 0, global_position = 0;
    for (std::size_t mi = 0; mi < n; ++mi) {
      const Message& m = thread.messages[mi];
      if (mi == message_index) global_position = thread_sentences + *sentence_index + 1;
      thread_sentences += m.sentences.size();
      for (const Sentence& s : m.sentences) {
        longest_words_thread = std::max(longest_words_thread, WordCount(s.text));
        longest_chars_thread = std::max(longest_chars_thread, CodePointCount(s.text));
      }
    }
    std::size_t longest_words_message = 0;
    for (const Sentence& s : msg.sentences) {
      longest_words_message = std::max(longest_words_message, WordCount(s.text));
    }
    const double words = static_cast<double>(WordCount(sentence.text));
    f["CHAR_SENT"] = Ratio(static_cast<double>(CodePointCount(sentence.text)),
                           static_cast<double>(longest_chars_thread));
    f["LEN_SENT_T"] = Ratio(words, static_cast<double>(longest_words_thread));
    f["LEN_SENT_C"] = Ratio(words, static_cast<double>(longest_words_message));
    f["POS_SENT_E"] = static_cast<double>(*sentence_index + 1) /
                      static_cast<double>(msg.sentences.size());
    f["POS_SENT_T"] =
        static_cast<double>(global_position) / static_cast<double>(thread_sentences);
  }

  NamedVector out;
  out.names = ConversationalFeatureNames(task);
  for (const std::string& name : out.names) out.values.push_back(f.at(name));
  return out;
}

ConversationalScaler ConversationalScaler::Fit(const std::vector<std::vector<double>>& rows,
                                               Task task) {
  const auto& names = ConversationalFeatureNames(task);
  ConversationalScaler s;
  s.divisors_.assign(names.size(), 1.0);
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (names[c] != kCharText) continue;
    double max = 0.0;
    for (const auto& row : rows) max = std::max(max, row.at(c));
    s.divisors_[c] = max > 0 ? max : 1.0;
  }
  return s;
}

std::vector<double> ConversationalScaler::Apply(std::vector<double> row) const {
  for (std::size_t c = 0; c < row.size() && c < divisors_.size(); ++c) {
    row[c] = std::clamp(row[c] / divisors_[c], 0.0, 1.0);
  }
  return row;
}

nlohmann::json ConversationalScaler::ToJson() const { return {{"divisors", divisors_}}; }

ConversationalScaler ConversationalScaler::FromJson(const nlohmann::json& j) {
  ConversationalScaler s;
  s.divisors_ = j.at("divisors").get<std::vector<double>>();
  return s;
}

void WriteConversationalCsv(std::ostream& out, const std::vector<Thread>& corpus,
                            Task task, const RoleResolver& roles) {
  out << "thread_id,message_id" << (task == Task::kCt2 ? ",sentence_index" : "");
  for (const std::string& name : ConversationalFeatureNames(task)) out << ',' << name;
  out << '\n';
  for (const Thread& t : corpus) {
    for (std::size_t mi = 0; mi < t.messages.size(); ++mi) {
      const Message& m = t.messages[mi];
      auto write = [&](std::optional<std::size_t> si) {
        NamedVector v = ConversationalFeatures(t, mi, si, task, roles);
        out << t.id << ',' << m.id;
        if (si) out << ',' << *si;
        for (double x : v.values) out << ',' << x;
        out << '\n';
      };
      if (task == Task::kCt1) {
        write(std::nullopt);
      } else {
        for (std::size_t si = 0; si < m.sentences.size(); ++si) write(si);
      }
    }
  }
}

void WriteTextualCsv(std::ostream& out, const std::vector<SparseVector>& rows,
                     const VocabularyModel& vocab) {
  out << "row,term,weight\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k = 0; k < rows[r].nnz(); ++k) {
      uint32_t index = rows[r].indices[k];
      std::string term = index < vocab.size() ? vocab.terms()[index] : "#" + std::to_string(index);
      out << r << ",\"" << term << "\"," << rows[r].values[k] << '\n';
    }
  }
}

}  // namespace civility
