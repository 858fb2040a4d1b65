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

#include "civility/preprocess.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>

#include "civility/errors.h"
#include "civility/porter_stemmer.h"

namespace civility {
namespace {

constexpr const char* kStopwords[] = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
    "you're", "you've", "you'll", "you'd", "your", "yours", "yourself",
    "yourselves", "he", "him", "his", "himself", "she", "she's", "her", "hers",
    "herself", "it", "it's", "its", "itself", "they", "them", "their",
    "theirs", "themselves", "what", "which", "who", "whom", "this", "that",
    "that'll", "these", "those", "am", "is", "are", "was", "were", "be",
    "been", "being", "have", "has", "had", "having", "do", "does", "did",
    "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as",
    "until", "while", "of", "at", "by", "for", "with", "about", "against",
    "between", "into", "through", "during", "before", "after", "above",
    "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
    "under", "again", "further", "then", "once", "here", "there", "when",
    "where", "why", "how", "all", "any", "both", "each", "few", "more",
    "most", "other", "some", "such", "no", "nor", "not", "only", "own",
    "same", "so", "than", "too", "very", "s", "t", "can", "will", "just",
    "don", "don't", "should", "should've", "now", "d", "ll", "m", "o", "re",
    "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't", "didn",
    "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't",
    "haven", "haven't", "isn", "isn't", "ma", "mightn", "mightn't", "mustn",
    "mustn't", "needn", "needn't", "shan", "shan't", "shouldn", "shouldn't",
    "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn",
    "wouldn't"};

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string> SplitLines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::string StripTrailingPunctuation(std::string_view text) {
  while (!text.empty() && std::string_view(",.!;:-").find(text.back()) !=
                              std::string_view::npos) {
    text.remove_suffix(1);
  }
  return std::string(Trim(text));
}

bool HasSentencePunctuation(std::string_view text) {
  return text.find_first_of(".!?") != std::string_view::npos;
}

// Removes fenced code blocks, inline code spans, @mentions and any byte
// outside printable ASCII (emojis, non-Latin scripts).
std::string HeuristicStep1(std::string_view text) {
  std::string out;
  bool in_fence = false;
  for (const std::string& line : SplitLines(text)) {
    if (Trim(line).substr(0, 3) == "```") {
      in_fence = !in_fence;
      continue;
    }
    if (in_fence) continue;
    out += line;
    out += '\n';
  }
  static const std::regex kInlineCode("`[^`\n]*`");
  static const std::regex kMention("(^|[^A-Za-z0-9_])@[A-Za-z0-9_][A-Za-z0-9_-]*");
  out = std::regex_replace(out, kInlineCode, "");
  out = std::regex_replace(out, kMention, "$1");
  std::string ascii;
  for (char c : out) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u < 0x80) ascii += c;
  }
  return ascii;
}

class Cleaner {
 public:
  explicit Cleaner(const CleanConfig& config) : config_(config) {
    for (const auto& term : config.signature_terms) terms_.push_back(term);
  }

  std::string Pass(std::string_view text) const {
    std::string input = config_.heuristic_step1 ? HeuristicStep1(text)
                                                : std::string(text);
    static const std::regex kHeader(R"(^On (.*?) wrote:$)");
    static const std::regex kAttribution(R"(^(reviewed|tested)[- ]by\b.*$)",
                                         std::regex::icase);
    static const std::regex kGreeting(
        R"(^(hi|hello|hey|dear)\b[^,:;!.?]*[,:;!.?]?\s*)", std::regex::icase);

    std::vector<std::string> lines = SplitLines(input);
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::string line(Trim(lines[i]));
      if (config_.strip_headers && std::regex_search(line, kHeader)) continue;
      if (config_.strip_reply_quotes && !line.empty() &&
          config_.quote_markers.find(line.front()) != std::string::npos) {
        continue;
      }
      if (config_.strip_greetings) {
        if (std::regex_match(line, kAttribution)) continue;
        std::smatch m;
        if (std::regex_search(line, m, kGreeting)) {
          line = std::string(Trim(line.substr(m.length(0))));
          if (line.empty()) continue;
        }
      }
      if (config_.strip_signatures && IsSignatureLine(line)) {
        // The sign-off is usually followed by the sender's name.
        while (i + 1 < lines.size() && IsNameLine(lines[i + 1])) ++i;
        continue;
      }
      kept.push_back(std::move(line));
    }

    std::string out;
    bool pending_blank = false;
    for (const std::string& line : kept) {
      if (line.empty()) {
        pending_blank = !out.empty();
        continue;
      }
      if (pending_blank) out += "\n";
      if (!out.empty()) out += "\n";
      out += line;
      pending_blank = false;
    }
    return out;
  }

 private:
  bool IsTerm(const std::string& text) const {
    return std::find(terms_.begin(), terms_.end(), text) != terms_.end();
  }

  // "Thanks," / "best regards." / "Thanks, Alice"
  bool IsSignatureLine(std::string_view line) const {
    std::string lower = ToLowerAscii(line);
    if (IsTerm(StripTrailingPunctuation(lower))) return true;
    std::size_t comma = lower.find(',');
    if (comma == std::string::npos) return false;
    std::string head(Trim(std::string_view(lower).substr(0, comma)));
    std::string_view tail = Trim(std::string_view(lower).substr(comma + 1));
    return IsTerm(head) && !tail.empty() && SplitWords(tail).size() <= 3 &&
           !HasSentencePunctuation(tail);
  }

  static bool IsNameLine(std::string_view line) {
    std::string_view t = Trim(line);
    if (t.empty()) return false;
    return SplitWords(t).size() <= 3 && !HasSentencePunctuation(t);
  }

  const CleanConfig& config_;
  std::vector<std::string> terms_;
};

}  // namespace

const StopwordSet& DefaultStopwords() {
  static const StopwordSet* kSet =
      new StopwordSet(std::begin(kStopwords), std::end(kStopwords));
  return *kSet;
}

StopwordSet LoadStopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stopword file " + path);
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    std::string word = ToLowerAscii(Trim(line));
    if (word.empty() || word.front() == '#') continue;
    set.insert(word);
  }
  return set;
}

std::vector<std::string> DefaultSignatureTerms() {
  return {"warm regards",  "kind regards",
          "regards",       "cheers",
          "many thanks",   "thanks",
          "sincerely",     "best",
          "thank you",     "talk soon",
          "cordially",     "yours truly",
          "all the best",  "best regards",
          "best wishes",   "looking forward to hearing from you",
          "sincerely yours", "thanks again",
          "with appreciation", "with gratitude",
          "yours sincerely"};
}

void CleanConfig::Validate() const {
  if (signature_terms.empty()) {
    throw ContractError("signature_terms must not be empty");
  }
  for (const auto& term : signature_terms) {
    if (term != ToLowerAscii(term)) {
      throw ContractError("signature term must be lowercase: " + term);
    }
  }
}

CleanConfig CleanConfig::FromJson(const nlohmann::json& j) {
  CleanConfig c;
  c.strip_headers = j.value("strip_headers", c.strip_headers);
  c.strip_greetings = j.value("strip_greetings", c.strip_greetings);
  c.strip_signatures = j.value("strip_signatures", c.strip_signatures);
  c.strip_reply_quotes = j.value("strip_reply_quotes", c.strip_reply_quotes);
  c.heuristic_step1 = j.value("heuristic_step1", c.heuristic_step1);
  c.quote_markers = j.value("quote_markers", c.quote_markers);
  if (j.contains("signature_terms")) {
    c.signature_terms = j.at("signature_terms").get<std::vector<std::string>>();
  } else if (j.contains("signature_terms_file")) {
    StopwordSet terms = LoadStopwords(j.at("signature_terms_file"));
    c.signature_terms.assign(terms.begin(), terms.end());
    std::sort(c.signature_terms.begin(), c.signature_terms.end());
  }
  c.Validate();
  return c;
}

nlohmann::json CleanConfig::ToJson() const {
  return {{"strip_headers", strip_headers},
          {"strip_greetings", strip_greetings},
          {"strip_signatures", strip_signatures},
          {"strip_reply_quotes", strip_reply_quotes},
          {"heuristic_step1", heuristic_step1},
          {"quote_markers", quote_markers},
          {"signature_terms", signature_terms}};
}

std::string CleanMessage(std::string_view raw_text, const CleanConfig& config) {
  Cleaner cleaner(config);
  std::string current = cleaner.Pass(raw_text);
  // Removing one element can expose another (e.g. a greeting prefix hiding a
  // sign-off), so iterate to a fixed point.
  for (int round = 0; round < 16; ++round) {
    std::string next = cleaner.Pass(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::vector<std::string> NormalizeForClassical(std::string_view clean_text,
                                               const StopwordSet& stopwords) {
  std::string buffer;
  buffer.reserve(clean_text.size());
  for (char c : clean_text) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::ispunct(u)) {
      buffer += ' ';
    } else {
      buffer += static_cast<char>(std::tolower(u));
    }
  }
  std::vector<std::string> tokens;
  for (std::string& word : SplitWords(buffer)) {
    if (stopwords.count(word)) continue;
    std::string stem = PorterStem(word);
    if (stem.empty() || stopwords.count(stem)) continue;
    tokens.push_back(std::move(stem));
  }
  return tokens;
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

std::string_view Trim(std::string_view text) {
  while (!text.empty() && IsSpace(text.front())) text.remove_prefix(1);
  while (!text.empty() && IsSpace(text.back())) text.remove_suffix(1);
  return text;
}

std::string ToLowerAscii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  return out;
}

}  // namespace civility
