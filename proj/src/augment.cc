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

#include "civility/augment.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "civility/errors.h"

namespace civility {
namespace {

const std::vector<std::string>& NoSynonyms() {
  static const std::vector<std::string> kEmpty;
  return kEmpty;
}

bool Eligible(const std::string& word, const SynonymLexicon& lexicon,
              const StopwordSet& stopwords) {
  std::string key = LookupKey(word);
  return !key.empty() && !stopwords.count(key) && !lexicon.Synonyms(key).empty();
}

std::string Join(const Words& words) {
  std::string out;
  for (const std::string& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string FormatNumber(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

}  // namespace

std::string_view ToString(EdaComposition c) {
  return c == EdaComposition::kPerOperation ? "per_operation" : "composed";
}

EdaComposition ParseEdaComposition(std::string_view s) {
  if (s == "per_operation") return EdaComposition::kPerOperation;
  if (s == "composed") return EdaComposition::kComposed;
  throw ParseError("unknown EDA composition '" + std::string(s) + "'", 0);
}

void EdaConfig::Validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("EDA alpha must lie in (0, 1)");
  if (!(p_rd >= 0.0 && p_rd <= 1.0)) throw ContractError("EDA p_rd must lie in [0, 1]");
  if (n_aug < 0) throw ContractError("EDA n_aug must be >= 0");
}

std::string EdaConfig::Id() const {
  return "a" + FormatNumber(alpha) + "_p" + FormatNumber(p_rd) + "_n" +
         std::to_string(n_aug);
}

nlohmann::json EdaConfig::ToJson() const {
  return {{"alpha", alpha},
          {"p_rd", p_rd},
          {"n_aug", n_aug},
          {"seed", seed},
          {"composition", ToString(composition)}};
}

EdaConfig EdaConfig::FromJson(const nlohmann::json& j) {
  EdaConfig c;
  c.alpha = j.value("alpha", c.alpha);
  c.p_rd = j.value("p_rd", c.p_rd);
  c.n_aug = j.value("n_aug", c.n_aug);
  c.seed = j.value("seed", c.seed);
  if (j.contains("composition")) {
    c.composition = ParseEdaComposition(j.at("composition").get<std::string>());
  }
  c.Validate();
  return c;
}

std::vector<EdaConfig> DefaultEdaGrid() {
  std::vector<EdaConfig> grid;
  for (double alpha : {0.05, 0.1}) {
    for (double p : {0.05, 0.1}) {
      for (int n : {4, 8}) {
        EdaConfig c;
        c.alpha = alpha;
        c.p_rd = p;
        c.n_aug = n;
        grid.push_back(c);
      }
    }
  }
  return grid;
}

std::size_t OperationCount(double alpha, std::size_t length) {
  long n = std::lround(alpha * static_cast<double>(length));
  return static_cast<std::size_t>(std::max(1L, n));
}

SynonymLexicon::SynonymLexicon(std::map<std::string, std::vector<std::string>> entries) {
  for (auto& [word, synonyms] : entries) {
    std::string key = ToLowerAscii(Trim(word));
    std::vector<std::string> clean;
    for (const std::string& s : synonyms) {
      std::string syn = ToLowerAscii(Trim(s));
      if (syn.empty() || syn == key) continue;
      if (std::find(clean.begin(), clean.end(), syn) == clean.end()) clean.push_back(syn);
    }
    if (!key.empty() && !clean.empty()) entries_[key] = std::move(clean);
  }
}

SynonymLexicon SynonymLexicon::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("lexicon must be a JSON object", 0);
  return SynonymLexicon(j.get<std::map<std::string, std::vector<std::string>>>());
}

SynonymLexicon SynonymLexicon::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid lexicon JSON: ") + e.what(), 0);
  }
  return FromJson(j);
}

const std::vector<std::string>& SynonymLexicon::Synonyms(std::string_view word) const {
  auto it = entries_.find(ToLowerAscii(word));
  return it == entries_.end() ? NoSynonyms() : it->second;
}

std::string LookupKey(std::string_view word) {
  while (!word.empty() && std::ispunct(static_cast<unsigned char>(word.front()))) {
    word.remove_prefix(1);
  }
  while (!word.empty() && std::ispunct(static_cast<unsigned char>(word.back()))) {
    word.remove_suffix(1);
  }
  return ToLowerAscii(word);
}

Words SynonymReplacement(const Words& words, std::size_t n, const SynonymLexicon& lexicon,
                         Rng& rng, const StopwordSet& stopwords) {
  Words out = words;
  if (n == 0) return out;
  // Distinct eligible keys in first-occurrence order, so the draw depends
  // only on the input and the stream.
  std::vector<std::string> keys;
  std::set<std::string> seen;
  for (const std::string& w : words) {
    if (!Eligible(w, lexicon, stopwords)) continue;
    std::string key = LookupKey(w);
    if (seen.insert(key).second) keys.push_back(key);
  }
  rng.Shuffle(keys);
  keys.resize(std::min(n, keys.size()));
  for (const std::string& key : keys) {
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (LookupKey(words[i]) == key) positions.push_back(i);
    }
    const auto& synonyms = lexicon.Synonyms(key);
    std::size_t pos = positions[rng.Below(positions.size())];
    out[pos] = synonyms[rng.Below(synonyms.size())];
  }
  return out;
}

Words RandomInsertion(const Words& words, std::size_t n, const SynonymLexicon& lexicon,
                      Rng& rng, const StopwordSet& stopwords) {
  Words out = words;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (Eligible(words[i], lexicon, stopwords)) candidates.push_back(i);
  }
  if (candidates.empty()) return out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::string& source = words[candidates[rng.Below(candidates.size())]];
    const auto& synonyms = lexicon.Synonyms(LookupKey(source));
    const std::string& synonym = synonyms[rng.Below(synonyms.size())];
    std::size_t pos = rng.Below(out.size() + 1);
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), synonym);
  }
  return out;
}

Words RandomSwap(const Words& words, std::size_t n, Rng& rng) {
  Words out = words;
  if (out.size() < 2) return out;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t i = rng.Below(out.size());
    std::size_t j = rng.Below(out.size() - 1);
    if (j >= i) ++j;
    std::swap(out[i], out[j]);
  }
  return out;
}

Words RandomDeletion(const Words& words, double p, Rng& rng) {
  if (words.empty()) return {};
  Words out;
  for (const std::string& w : words) {
    if (!rng.Bernoulli(p)) out.push_back(w);
  }
  if (out.empty()) out.push_back(words[rng.Below(words.size())]);
  return out;
}

std::vector<std::string> AugmentRecord(std::string_view text, const EdaConfig& config,
                                       const SynonymLexicon& lexicon, Rng& rng,
                                       const StopwordSet& stopwords) {
  config.Validate();
  const Words words = SplitWords(text);
  const std::size_t n = OperationCount(config.alpha, words.size());
  std::vector<std::string> copies;
  for (int i = 0; i < config.n_aug; ++i) {
    Words w = words;
    if (config.composition == EdaComposition::kComposed) {
      w = SynonymReplacement(w, n, lexicon, rng, stopwords);
      w = RandomInsertion(w, n, lexicon, rng, stopwords);
      w = RandomSwap(w, n, rng);
      w = RandomDeletion(w, config.p_rd, rng);
    } else {
      switch (i % 4) {
        case 0:
          w = SynonymReplacement(w, n, lexicon, rng, stopwords);
          break;
        case 1:
          w = RandomInsertion(w, n, lexicon, rng, stopwords);
          break;
        case 2:
          w = RandomSwap(w, n, rng);
          break;
        default:
          w = RandomDeletion(w, config.p_rd, rng);
          break;
      }
    }
    copies.push_back(Join(w));
  }
  return copies;
}

Rng RecordRng(const EdaConfig& config, std::string_view record_id) {
  return Rng(DeriveSeed(config.seed, "eda", {HashString(record_id)}));
}

}  // namespace civility
