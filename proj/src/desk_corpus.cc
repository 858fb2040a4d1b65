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


#include "civility/desk_corpus.h"

#include <algorithm>
#include <set>

#include "civility/preprocess.h"
#include "civility/rng.h"

namespace civility {
namespace {

struct Template {
  const char* tbdf;  // empty for plain technical sentences
  const char* text;  // "{n}" is replaced by a technical noun
};

constexpr const char* kNouns[] = {
    "patch",    "driver",  "buffer", "kernel",    "commit",   "module",   "config",
    "build",    "memory",  "lock",   "queue",     "scheduler", "interrupt", "register",
    "allocator", "cache",  "pointer", "function", "header",   "parser",   "socket"};

constexpr Template kTechnical[] = {
    {"", "This {n} moves the lock out of the fast path."},
    {"", "The {n} now frees the buffer on the error path."},
    {"", "Rebased the {n} onto the current tree."},
    {"", "The {n} change splits the init code into two helpers."},
    {"", "Updated the {n} to use the new allocation flags."},
    {"", "The {n} test passes on arm64 and x86."},
    {"", "Dropped the unused argument from the {n} call."},
    {"", "Version two renames the {n} field."},
    {"", "The {n} refcount is taken before the queue is walked."},
    {"", "Moved the {n} declaration into the shared header."},
};

constexpr Template kCivil[] = {
    {"appreciation and excitement", "I really appreciate the {n} work, wonderful job!"},
    {"appreciation and excitement", "Wonderful, this {n} cleanup is exactly what we needed."},
    {"considerateness", "Kindly take your time with the {n}, no pressure at all."},
    {"considerateness", "I understand the {n} was tricky, kindly ping me if stuck."},
    {"humility", "I might be mistaken about the {n}, happy to be corrected."},
    {"hope to get feedback", "Any feedback or suggestions on the {n} are welcome."},
    {"sincere apologies", "Sorry, my earlier {n} review was wrong, apologies."},
    {"friendly joke", "The {n} finally behaves, my coffee can rest now."},
};

constexpr Template kUncivil[] = {
    {"bitter frustration", "This {n} is garbage and I am sick of it!"},
    {"bitter frustration", "Honestly this {n} mess is infuriating."},
    {"mocking", "Wow, what a brilliant plan to break the {n} yet again!"},
    {"insulting", "Only a clueless amateur would write this {n}."},
    {"impatience", "I am tired of waiting, fix the {n} already!"},
    {"vulgarity", "This damn {n} is total crap."},
    {"name calling", "Whoever wrote the {n} is an idiot."},
    {"irony", "Sure, shipping a broken {n} is genius, pathetic."},
};

std::string Fill(const char* text, const std::string& noun) {
  std::string s = text;
  auto at = s.find("{n}");
  if (at != std::string::npos) s.replace(at, 3, noun);
  return s;
}

template <typename T, std::size_t N>
const T& Pick(const T (&items)[N], Rng& rng) {
  return items[rng.Below(N)];
}

// Data points of the task as (normalized tokens, positive?) pairs.
std::vector<std::pair<std::set<std::string>, bool>> TaskDocuments(
    const std::vector<Thread>& corpus, Task task) {
  std::vector<std::pair<std::set<std::string>, bool>> docs;
  for (const Thread& t : corpus) {
    for (const Message& m : t.messages) {
      if (task == Task::kCt1) {
        if (!m.ct1_label) continue;
        auto tokens = NormalizeForClassical(m.clean_text);
        docs.emplace_back(std::set<std::string>(tokens.begin(), tokens.end()),
                          *m.ct1_label == Ct1Label::kNonToneBearing);
      } else {
        if (m.ct1_label != Ct1Label::kToneBearing) continue;
        for (const Sentence& s : m.sentences) {
          if (!s.ct2_label) continue;
          auto tokens = NormalizeForClassical(s.text);
          docs.emplace_back(std::set<std::string>(tokens.begin(), tokens.end()),
                            *s.ct2_label == Ct2Label::kCivil);
        }
      }
    }
  }
  return docs;
}

}  // namespace

std::vector<Thread> GenerateDeskCorpus(const DeskCorpusOptions& options) {
  const TbdfMapping mapping = TbdfMapping::Default();
  Rng rng(options.seed);
  constexpr const char* kAuthors[] = {
      "Ada Park <ada@example.org>",     "Ben Ortiz <ben@example.org>",
      "Chen Wei <chen@example.org>",   "Dana Kim <dana@example.org>",
      "Eli Novak <eli@example.org>",   "Farah Aziz <farah@example.org>",
      "Gus Lund <gus@example.org>",    "Hana Sato <hana@example.org>"};
  std::vector<Thread> threads;
  int64_t clock = 1'600'000'000;
  for (int t = 0; t < options.threads; ++t) {
    Thread thread;
    thread.id = "desk-" + std::to_string(t);
    thread.platform = Platform::kCodeReview;
    for (int i = 0; i < options.messages_per_thread; ++i) {
      Message m;
      m.id = thread.id + "-m" + std::to_string(i);
      std::size_t author = rng.Below(std::size(kAuthors));
      m.author_id = kAuthors[author];
      m.author_role = author < 2 ? AuthorRole::kMaintainer : AuthorRole::kDeveloper;
      m.role_supplied = true;
      clock += 60 + static_cast<int64_t>(rng.Below(7200));
      m.timestamp = clock;
      m.position_index = i;
      m.sentences_annotated = true;

      bool tone_bearing = rng.Uniform() < options.tone_bearing_rate;
      m.ct1_label = tone_bearing ? Ct1Label::kToneBearing : Ct1Label::kNonToneBearing;
      std::size_t count = 2 + rng.Below(2);
      bool uncivil_message = rng.Uniform() < 0.6;
      for (std::size_t k = 0; k < count; ++k) {
        std::string noun = Pick(kNouns, rng);
        const Template* tpl = &Pick(kTechnical, rng);
        // Tone-bearing messages carry a TBDF in every sentence but the last
        // may be plain; uncivil messages mix in civil sentences too.
        if (tone_bearing && (k + 1 < count || rng.Uniform() < 0.5)) {
          bool uncivil = uncivil_message ? rng.Uniform() < 0.75 : rng.Uniform() < 0.2;
          tpl = uncivil ? &Pick(kUncivil, rng) : &Pick(kCivil, rng);
        }
        Sentence s;
        s.text = Fill(tpl->text, noun);
        if (*tpl->tbdf != '\0') {
          s.tbdfs.push_back(mapping.Lookup(tpl->tbdf));
          s.ct2_label = DeriveCt2Label(s.tbdfs);
        }
        m.sentences.push_back(std::move(s));
      }
      for (const Sentence& s : m.sentences) {
        if (!m.raw_text.empty()) m.raw_text += ' ';
        m.raw_text += s.text;
      }
      m.clean_text = m.raw_text;
      thread.messages.push_back(std::move(m));
    }
    thread.total_duration = thread.messages.back().timestamp - thread.messages.front().timestamp;
    threads.push_back(std::move(thread));
  }
  return threads;
}

SeparabilityResult CheckSeparable(const std::vector<Thread>& corpus, Task task) {
  auto docs = TaskDocuments(corpus, task);
  SeparabilityResult result;
  result.documents = docs.size();
  std::set<std::string> positive_tokens, negative_tokens;
  for (const auto& [tokens, positive] : docs) {
    (positive ? positive_tokens : negative_tokens).insert(tokens.begin(), tokens.end());
  }
  for (const std::string& token : negative_tokens) {
    if (!positive_tokens.count(token)) result.witness.push_back(token);
  }
  std::set<std::string> witness(result.witness.begin(), result.witness.end());
  std::size_t uncovered = 0, negatives = 0;
  for (const auto& [tokens, positive] : docs) {
    if (positive) continue;
    ++negatives;
    bool covered = std::any_of(tokens.begin(), tokens.end(),
                               [&](const std::string& t) { return witness.count(t) > 0; });
    if (!covered) ++uncovered;
  }
  result.separable = negatives > 0 && negatives < docs.size() && uncovered == 0;
  result.detail = std::to_string(negatives - uncovered) + "/" + std::to_string(negatives) +
                  " negative documents covered by " + std::to_string(witness.size()) +
                  " exclusive tokens";
  return result;
}

}  // namespace civility
