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

#include "civility/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include "civility/errors.h"

namespace civility {
namespace {

using nlohmann::json;

std::string RequireString(const json& record, const char* key, std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw ParseError(std::string("missing or non-string field '") + key + "'", line);
  }
  return it->get<std::string>();
}

Sentence ParseSentence(const json& j, const TbdfMapping& mapping, std::size_t line) {
  if (!j.is_object()) throw ParseError("sentence must be an object", line);
  Sentence s;
  s.text = std::string(Trim(RequireString(j, "text", line)));
  if (auto it = j.find("tbdfs"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError("'tbdfs' must be an array", line);
    for (const json& name : *it) {
      if (!name.is_string()) throw ParseError("TBDF names must be strings", line);
      Tbdf t = mapping.Lookup(name.get<std::string>());
      bool seen = std::any_of(s.tbdfs.begin(), s.tbdfs.end(),
                              [&](const Tbdf& o) { return o.name == t.name; });
      if (!seen) s.tbdfs.push_back(std::move(t));
    }
    std::sort(s.tbdfs.begin(), s.tbdfs.end(),
              [](const Tbdf& a, const Tbdf& b) { return a.name < b.name; });
  }
  if (!s.tbdfs.empty()) s.ct2_label = DeriveCt2Label(s.tbdfs);
  return s;
}

std::string CanonicalName(std::string_view name) {
  std::string lower = ToLowerAscii(Trim(name));
  // Collapse internal runs of whitespace.
  std::string out;
  for (const std::string& w : SplitWords(lower)) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

std::string_view ToString(Platform p) {
  return p == Platform::kCodeReview ? "code_review" : "issues";
}
std::string_view ToString(AuthorRole r) {
  return r == AuthorRole::kMaintainer ? "maintainer" : "developer";
}
std::string_view ToString(Ct1Label l) {
  return l == Ct1Label::kToneBearing ? "tone_bearing" : "non_tone_bearing";
}
std::string_view ToString(Ct2Label l) {
  return l == Ct2Label::kCivil ? "civil" : "uncivil";
}
std::string_view ToString(TbdfCategory c) {
  switch (c) {
    case TbdfCategory::kCivilPositive:
      return "civil_positive";
    case TbdfCategory::kCivilNeutral:
      return "civil_neutral";
    case TbdfCategory::kCivilNegative:
      return "civil_negative";
    case TbdfCategory::kUncivil:
      return "uncivil";
  }
  return "uncivil";
}

Platform ParsePlatform(std::string_view s) {
  if (s == "code_review") return Platform::kCodeReview;
  if (s == "issues") return Platform::kIssues;
  throw ParseError("unknown platform '" + std::string(s) + "'", 0);
}

AuthorRole ParseAuthorRole(std::string_view s) {
  if (s == "maintainer") return AuthorRole::kMaintainer;
  if (s == "developer") return AuthorRole::kDeveloper;
  throw ParseError("unknown author_role '" + std::string(s) + "'", 0);
}

Ct1Label ParseCt1Label(std::string_view s) {
  if (s == "tone_bearing") return Ct1Label::kToneBearing;
  if (s == "non_tone_bearing") return Ct1Label::kNonToneBearing;
  throw ParseError("unknown ct1_label '" + std::string(s) + "'", 0);
}

TbdfCategory ParseTbdfCategory(std::string_view s) {
  if (s == "civil_positive") return TbdfCategory::kCivilPositive;
  if (s == "civil_neutral") return TbdfCategory::kCivilNeutral;
  if (s == "civil_negative") return TbdfCategory::kCivilNegative;
  if (s == "uncivil") return TbdfCategory::kUncivil;
  throw ParseError("unknown TBDF category '" + std::string(s) + "'", 0);
}

TbdfMapping::TbdfMapping(std::map<std::string, TbdfCategory> categories) {
  for (auto& [name, category] : categories) {
    categories_.emplace(CanonicalName(name), category);
  }
}

TbdfMapping TbdfMapping::Default() {
  using C = TbdfCategory;
  return TbdfMapping({
      {"appreciation and excitement", C::kCivilPositive},
      {"considerateness", C::kCivilPositive},
      {"humility", C::kCivilPositive},
      {"hope to get feedback", C::kCivilPositive},
      {"commanding", C::kCivilNeutral},
      {"confusion", C::kCivilNeutral},
      {"expectation", C::kCivilNeutral},
      {"friendly joke", C::kCivilNeutral},
      {"sincere apologies", C::kCivilNeutral},
      {"criticizing oppression", C::kCivilNegative},
      {"dissatisfaction", C::kCivilNegative},
      {"oppression", C::kCivilNegative},
      {"sadness", C::kCivilNegative},
      {"annoyance and bitter frustration", C::kUncivil},
      {"bitter frustration", C::kUncivil},
      {"entitlement", C::kUncivil},
      {"identity attack", C::kUncivil},
      {"impatience", C::kUncivil},
      {"insulting", C::kUncivil},
      {"irony", C::kUncivil},
      {"mocking", C::kUncivil},
      {"name calling", C::kUncivil},
      {"threat", C::kUncivil},
      {"vulgarity", C::kUncivil},
  });
}

TbdfMapping TbdfMapping::FromJson(const json& j) {
  if (!j.is_object()) throw ParseError("TBDF mapping must be a JSON object", 0);
  std::map<std::string, TbdfCategory> entries;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) {
      throw ParseError("category for '" + it.key() + "' must be a string", 0);
    }
    entries.emplace(it.key(), ParseTbdfCategory(it.value().get<std::string>()));
  }
  return TbdfMapping(std::move(entries));
}

TbdfMapping TbdfMapping::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open TBDF mapping " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid TBDF mapping JSON: ") + e.what(), 0);
  }
  return FromJson(j);
}

Tbdf TbdfMapping::Lookup(std::string_view name) const {
  std::string key = CanonicalName(name);
  auto it = categories_.find(key);
  if (it == categories_.end()) {
    throw MappingError("unknown TBDF '" + std::string(name) + "'");
  }
  return Tbdf{key, it->second};
}

bool TbdfMapping::Contains(std::string_view name) const {
  return categories_.count(CanonicalName(name)) > 0;
}

std::vector<std::string> SplitSentences(std::string_view clean_text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::string_view piece = Trim(clean_text.substr(start, end - start));
    if (!piece.empty()) sentences.emplace_back(piece);
    start = end;
  };
  for (std::size_t i = 0; i < clean_text.size(); ++i) {
    char c = clean_text[i];
    if (c == '.' || c == '!' || c == '?') emit(i + 1);
  }
  emit(clean_text.size());
  return sentences;
}

Ct2Label DeriveCt2Label(const std::vector<Tbdf>& tbdfs) {
  if (tbdfs.empty()) throw ContractError("DeriveCt2Label requires at least one TBDF");
  bool uncivil = std::any_of(tbdfs.begin(), tbdfs.end(), [](const Tbdf& t) {
    return t.category == TbdfCategory::kUncivil;
  });
  return uncivil ? Ct2Label::kUncivil : Ct2Label::kCivil;
}

std::vector<Thread> LoadCorpus(const std::string& path, Platform platform,
                               const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus " + path);
  return ReadCorpus(in, platform, options);
}

std::vector<Thread> ReadCorpus(std::istream& in, Platform platform,
                               const LoadOptions& options) {
  options.clean.Validate();
  std::vector<Thread> threads;
  std::unordered_map<std::string, std::size_t> thread_index;
  std::vector<std::set<std::string>> message_ids;

  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (Trim(text).empty()) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line);
    }
    if (!record.is_object()) throw ParseError("record must be a JSON object", line);

    std::string thread_id = RequireString(record, "thread_id", line);
    Platform record_platform;
    try {
      record_platform = ParsePlatform(RequireString(record, "platform", line));
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.what(), line);
    }
    if (record_platform != platform) {
      throw ParseError("record platform '" + std::string(ToString(record_platform)) +
                           "' does not match requested '" +
                           std::string(ToString(platform)) + "'",
                       line);
    }

    Message m;
    m.id = RequireString(record, "message_id", line);
    m.author_id = RequireString(record, "author_id", line);
    m.raw_text = RequireString(record, "raw_text", line);
    try {
      if (auto it = record.find("author_role"); it != record.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError("'author_role' must be a string", line);
        m.author_role = ParseAuthorRole(it->get<std::string>());
        m.role_supplied = true;
      }
      if (auto it = record.find("ct1_label"); it != record.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError("'ct1_label' must be a string", line);
        m.ct1_label = ParseCt1Label(it->get<std::string>());
      }
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.what(), line);
    }
    auto ts = record.find("timestamp");
    if (ts == record.end() || !ts->is_number()) {
      throw ParseError("missing or non-numeric field 'timestamp'", line);
    }
    m.timestamp = ts->is_number_integer() ? ts->get<int64_t>()
                                          : static_cast<int64_t>(ts->get<double>());

    m.clean_text = CleanMessage(m.raw_text, options.clean);
    m.empty_after_cleaning = m.clean_text.empty();

    if (auto it = record.find("sentences"); it != record.end() && !it->is_null()) {
      if (!it->is_array()) throw ParseError("'sentences' must be an array", line);
      for (const json& s : *it) {
        Sentence sentence = ParseSentence(s, options.mapping, line);
        if (!sentence.text.empty()) m.sentences.push_back(std::move(sentence));
      }
      m.sentences_annotated = true;
    } else {
      for (std::string& s : SplitSentences(m.clean_text)) {
        m.sentences.push_back(Sentence{std::move(s), {}, std::nullopt});
      }
    }
    if (m.ct1_label == Ct1Label::kNonToneBearing) {
      for (const Sentence& s : m.sentences) {
        if (!s.tbdfs.empty()) {
          throw ParseError("non-tone-bearing message '" + m.id + "' carries a TBDF", line);
        }
      }
    }

    auto [it, inserted] = thread_index.emplace(thread_id, threads.size());
    if (inserted) {
      Thread t;
      t.id = thread_id;
      t.platform = platform;
      threads.push_back(std::move(t));
      message_ids.emplace_back();
    }
    if (!message_ids[it->second].insert(m.id).second) {
      throw ParseError("duplicate message_id '" + m.id + "' in thread '" + thread_id + "'",
                       line);
    }
    threads[it->second].messages.push_back(std::move(m));
  }

  for (Thread& t : threads) {
    std::stable_sort(t.messages.begin(), t.messages.end(),
                     [](const Message& a, const Message& b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 0; i < t.messages.size(); ++i) {
      t.messages[i].position_index = static_cast<int>(i);
    }
    t.total_duration = t.messages.back().timestamp - t.messages.front().timestamp;
    ValidateThread(t);
  }
  return threads;
}

void WriteCorpus(std::ostream& out, const std::vector<Thread>& threads) {
  for (const Thread& t : threads) {
    for (const Message& m : t.messages) {
      json record = {{"thread_id", t.id},
                     {"platform", ToString(t.platform)},
                     {"message_id", m.id},
                     {"author_id", m.author_id},
                     {"timestamp", m.timestamp},
                     {"raw_text", m.raw_text}};
      if (m.role_supplied) record["author_role"] = ToString(m.author_role);
      if (m.ct1_label) record["ct1_label"] = ToString(*m.ct1_label);
      if (m.sentences_annotated) {
        json sentences = json::array();
        for (const Sentence& s : m.sentences) {
          json names = json::array();
          for (const Tbdf& tb : s.tbdfs) names.push_back(tb.name);
          sentences.push_back({{"text", s.text}, {"tbdfs", names}});
        }
        record["sentences"] = std::move(sentences);
      }
      out << record.dump() << '\n';
    }
  }
}

void ValidateThread(const Thread& thread) {
  if (thread.messages.empty()) {
    throw ContractError("thread '" + thread.id + "' has no messages");
  }
  for (std::size_t i = 0; i < thread.messages.size(); ++i) {
    const Message& m = thread.messages[i];
    if (m.position_index != static_cast<int>(i)) {
      throw ContractError("thread '" + thread.id + "': position indices not 0..n-1");
    }
    if (i > 0 && m.timestamp < thread.messages[i - 1].timestamp) {
      throw ContractError("thread '" + thread.id + "': timestamps decrease");
    }
    for (const Sentence& s : m.sentences) {
      if (s.ct2_label.has_value() != !s.tbdfs.empty()) {
        throw ContractError("sentence label must be set iff it carries TBDFs");
      }
    }
  }
  if (thread.total_duration !=
      thread.messages.back().timestamp - thread.messages.front().timestamp) {
    throw ContractError("thread '" + thread.id + "': inconsistent total_duration");
  }
}

nlohmann::json CorpusStats::ToJson() const {
  return {{"threads", threads},
          {"messages", messages},
          {"tone_bearing", tone_bearing},
          {"non_tone_bearing", non_tone_bearing},
          {"civil_sentences", civil_sentences},
          {"uncivil_sentences", uncivil_sentences},
          {"empty_after_cleaning", empty_after_cleaning},
          {"tbdf_counts", tbdf_counts}};
}

CorpusStats ComputeStats(const std::vector<Thread>& threads) {
  CorpusStats stats;
  stats.threads = threads.size();
  for (const Thread& t : threads) {
    for (const Message& m : t.messages) {
      ++stats.messages;
      if (m.empty_after_cleaning) ++stats.empty_after_cleaning;
      if (m.ct1_label == Ct1Label::kToneBearing) ++stats.tone_bearing;
      if (m.ct1_label == Ct1Label::kNonToneBearing) ++stats.non_tone_bearing;
      for (const Sentence& s : m.sentences) {
        if (!s.ct2_label) continue;
        if (*s.ct2_label == Ct2Label::kCivil) {
          ++stats.civil_sentences;
        } else {
          ++stats.uncivil_sentences;
        }
        for (const Tbdf& tb : s.tbdfs) ++stats.tbdf_counts[tb.name];
      }
    }
  }
  return stats;
}

}  // namespace civility
