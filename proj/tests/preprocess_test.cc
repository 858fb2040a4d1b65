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

#include <random>
#include <regex>

#include "civility/errors.h"
#include "civility/porter_stemmer.h"
#include "gtest/gtest.h"

namespace civility {
namespace {

using Tokens = std::vector<std::string>;

std::string Clean(std::string_view text) { return CleanMessage(text, CleanConfig{}); }

TEST(CleanMessageTest, HeaderAndQuotes) {
  EXPECT_EQ(Clean("On Mon, Linus wrote:\n> old text\nThis breaks boot."), "This breaks boot.");
}

TEST(CleanMessageTest, SignatureOnlyBecomesEmpty) {
  EXPECT_EQ(Clean("Thanks,\nAlice"), "");
  EXPECT_EQ(Clean("Looks right.\n\nBest regards,\nBob Smith"), "Looks right.");
  EXPECT_EQ(Clean("Fixed in v2.\nCheers"), "Fixed in v2.");
}

TEST(CleanMessageTest, UnchangedWithoutRemovableElements) {
  EXPECT_EQ(Clean("Patch applies cleanly."), "Patch applies cleanly.");
}

TEST(CleanMessageTest, GreetingsAndAttributions) {
  EXPECT_EQ(Clean("Hi Bob,\nPlease rebase."), "Please rebase.");
  EXPECT_EQ(Clean("Hello Alice, the fix works."), "the fix works.");
  EXPECT_EQ(Clean("Nice.\nReviewed-by: Jane Doe <jane@example.org>\nTested by Joe"), "Nice.");
  // Only at line starts.
  EXPECT_EQ(Clean("I said hi Bob already."), "I said hi Bob already.");
}

TEST(CleanMessageTest, SignatureTermsMatchWholeLinesOnly) {
  EXPECT_EQ(Clean("Thanks for the quick review, merging now."),
            "Thanks for the quick review, merging now.");
}

TEST(CleanMessageTest, QuoteMarkerIsConfigurable) {
  CleanConfig config;
  config.quote_markers = "<";
  EXPECT_EQ(CleanMessage("< quoted\nreply", config), "reply");
  EXPECT_EQ(CleanMessage("> kept\nreply", config), "> kept\nreply");
}

TEST(CleanMessageTest, StepsCanBeDisabled) {
  CleanConfig off;
  off.strip_headers = off.strip_greetings = off.strip_signatures = off.strip_reply_quotes = false;
  std::string text = "Hi Bob,\nOn Mon, X wrote:\n> q\nThanks,\nAlice";
  EXPECT_EQ(CleanMessage(text, off), text);
}

TEST(CleanMessageTest, HeuristicPassRemovesCodeAndMentions) {
  CleanConfig config;
  config.heuristic_step1 = true;
  std::string out = CleanMessage("Ping @alice about `foo()`.\n```\nint x;\n```\nDone \xC3\xA9.", config);
  EXPECT_EQ(out.find('@'), std::string::npos);
  EXPECT_EQ(out.find('`'), std::string::npos);
  EXPECT_EQ(out.find("int x"), std::string::npos);
  for (char c : out) EXPECT_LT(static_cast<unsigned char>(c), 0x80);
  EXPECT_NE(out.find("Done"), std::string::npos);
}

// Random messages assembled from removable and ordinary lines.
std::string RandomMessage(std::mt19937& gen) {
  static const std::vector<std::string> kLines = {
      "On Tue, Ada Park wrote:", "> quoted text", ">> nested quote", "Hi Ben,",
      "Hello team!",             "Thanks,",       "Best regards,",   "Ada",
      "Reviewed-by: Ben <b@x>",  "This breaks boot.", "Please split the patch.",
      "",                        "Thanks, Ada",   "Dear maintainers, the fix works.",
      "hi",                      "Cheers!",       "I think hi is fine."};
  std::string text;
  int n = 1 + gen() % 8;
  for (int i = 0; i < n; ++i) {
    if (i) text += '\n';
    text += kLines[gen() % kLines.size()];
  }
  return text;
}

TEST(CleanMessageTest, IdempotentAndPostconditionsHold) {
  std::mt19937 gen(5);
  const std::regex header(R"(^On (.*?) wrote:$)");
  const std::regex greeting(R"(^(hi|hello|hey|dear)\s+\S.*)", std::regex::icase);
  const auto terms = DefaultSignatureTerms();
  for (int trial = 0; trial < 2000; ++trial) {
    std::string raw = RandomMessage(gen);
    std::string once = Clean(raw);
    EXPECT_EQ(Clean(once), once) << raw;
    std::size_t start = 0;
    while (start <= once.size()) {
      std::size_t end = once.find('\n', start);
      if (end == std::string::npos) end = once.size();
      std::string line = once.substr(start, end - start);
      start = end + 1;
      EXPECT_FALSE(std::regex_search(line, header)) << raw;
      EXPECT_FALSE(!line.empty() && line.front() == '>') << raw;
      std::string lower = ToLowerAscii(line);
      while (!lower.empty() && std::string(",.!;:-").find(lower.back()) != std::string::npos) {
        lower.pop_back();
      }
      EXPECT_EQ(std::find(terms.begin(), terms.end(), lower), terms.end()) << raw;
    }
  }
}

TEST(NormalizeTest, Examples) {
  EXPECT_EQ(NormalizeForClassical("This patch is completely broken"),
            (Tokens{"patch", "complet", "broken"}));
  EXPECT_TRUE(NormalizeForClassical("").empty());
  EXPECT_TRUE(NormalizeForClassical("the of and").empty());
  EXPECT_EQ(NormalizeForClassical("Don't BREAK the build!!!"), (Tokens{"break", "build"}));
}

TEST(NormalizeTest, OutputIsLowercasePunctuationFreeAndStopwordFree) {
  std::mt19937 gen(9);
  const std::string alphabet = "abcdeIOUXY .,!?'-_()[]";
  const std::vector<std::string> words = {"The", "this", "Running", "isn't", "caresses",
                                          "ponies", "RELATIONAL", "happy", "a", "yours"};
  const StopwordSet& stop = DefaultStopwords();
  for (int trial = 0; trial < 1000; ++trial) {
    std::string text;
    int n = gen() % 12;
    for (int i = 0; i < n; ++i) {
      if (gen() % 2) {
        text += words[gen() % words.size()];
      } else {
        for (int c = gen() % 6; c > 0; --c) text += alphabet[gen() % alphabet.size()];
      }
      text += ' ';
    }
    for (const std::string& tok : NormalizeForClassical(text)) {
      EXPECT_FALSE(tok.empty());
      EXPECT_EQ(stop.count(tok), 0u) << tok;
      for (char c : tok) {
        EXPECT_FALSE(std::isupper(static_cast<unsigned char>(c))) << tok;
        EXPECT_FALSE(std::ispunct(static_cast<unsigned char>(c))) << tok;
        EXPECT_FALSE(std::isspace(static_cast<unsigned char>(c))) << tok;
      }
    }
  }
}

TEST(PorterStemTest, PublishedExamples) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"caresses", "caress"},   {"ponies", "poni"},         {"ties", "ti"},
      {"caress", "caress"},     {"cats", "cat"},            {"feed", "feed"},
      {"agreed", "agre"},       {"plastered", "plaster"},   {"bled", "bled"},
      {"motoring", "motor"},    {"sing", "sing"},           {"conflated", "conflat"},
      {"troubled", "troubl"},   {"sized", "size"},          {"hopping", "hop"},
      {"tanned", "tan"},        {"falling", "fall"},        {"hissing", "hiss"},
      {"fizzed", "fizz"},       {"failing", "fail"},        {"filing", "file"},
      {"happy", "happi"},       {"sky", "sky"},             {"relational", "relat"},
      {"conditional", "condit"}, {"rational", "ration"},    {"digitizer", "digit"},
      {"operator", "oper"},     {"feudalism", "feudal"},    {"decisiveness", "decis"},
      {"hopefulness", "hope"},  {"callousness", "callous"}, {"triplicate", "triplic"},
      {"formative", "form"},    {"formalize", "formal"},    {"electrical", "electr"},
      {"hopeful", "hope"},      {"goodness", "good"},       {"revival", "reviv"},
      {"allowance", "allow"},   {"inference", "infer"},     {"airliner", "airlin"},
      {"adjustable", "adjust"}, {"defensible", "defens"},   {"irritant", "irrit"},
      {"replacement", "replac"}, {"adjustment", "adjust"},  {"dependent", "depend"},
      {"adoption", "adopt"},    {"communism", "commun"},    {"activate", "activ"},
      {"effective", "effect"},  {"bowdlerize", "bowdler"},  {"probate", "probat"},
      {"rate", "rate"},         {"cease", "ceas"},          {"controll", "control"},
      {"roll", "roll"},         {"generalizations", "gener"}, {"oscillators", "oscil"},
  };
  for (const auto& [word, stem] : cases) EXPECT_EQ(PorterStem(word), stem) << word;
}

TEST(PorterStemTest, LeavesNonLowercaseAlone) {
  EXPECT_EQ(PorterStem("Running"), "Running");
  EXPECT_EQ(PorterStem("ab"), "ab");
  EXPECT_EQ(PorterStem(""), "");
}

TEST(StopwordsTest, BundledFileMatchesEmbeddedList) {
  StopwordSet file = LoadStopwords(std::string(CIVILITY_DATA_DIR) + "/stopwords_en.txt");
  EXPECT_EQ(file, DefaultStopwords());
  EXPECT_EQ(DefaultStopwords().size(), 179u);
}

TEST(CleanConfigTest, ValidationAndJson) {
  CleanConfig c;
  EXPECT_EQ(c.signature_terms.size(), 21u);
  EXPECT_NO_THROW(c.Validate());
  CleanConfig upper = c;
  upper.signature_terms.push_back("Thanks");
  EXPECT_THROW(upper.Validate(), ContractError);
  CleanConfig empty = c;
  empty.signature_terms.clear();
  EXPECT_THROW(empty.Validate(), ContractError);
  c.strip_greetings = false;
  c.quote_markers = "<>";
  CleanConfig back = CleanConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
}

TEST(SplitWordsTest, Whitespace) {
  EXPECT_EQ(SplitWords("  a\tb\nc  "), (Tokens{"a", "b", "c"}));
  EXPECT_TRUE(SplitWords("   ").empty());
  EXPECT_EQ(Trim("  x y "), "x y");
}

}  // namespace
}  // namespace civility
