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

#include "civility/porter_stemmer.h"

#include <algorithm>

namespace civility {
namespace {

// Follows the structure of Porter's reference C implementation: `b_` holds
// the word, `k_` is the index of its last character and `j_` marks the end
// of the stem once a suffix has been matched by Ends().
class Stemmer {
 public:
  explicit Stemmer(std::string_view word) : b_(word), k_(static_cast<int>(word.size()) - 1) {}

  std::string Run() {
    if (k_ <= 1) return b_;
    Step1ab();
    if (k_ > 0) {
      Step1c();
      Step2();
      Step3();
      Step4();
      Step5();
    }
    return b_.substr(0, k_ + 1);
  }

 private:
  bool Cons(int i) const {
    switch (b_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !Cons(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b_[0..j_].
  int Measure() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j_) return n;
      if (!Cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (Cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!Cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool VowelInStem() const {
    for (int i = 0; i <= j_; ++i) {
      if (!Cons(i)) return true;
    }
    return false;
  }

  bool DoubleCons(int j) const {
    if (j < 1) return false;
    if (b_[j] != b_[j - 1]) return false;
    return Cons(j);
  }

  // consonant-vowel-consonant ending at i, where the last consonant is not
  // w, x or y.
  bool Cvc(int i) const {
    if (i < 2 || !Cons(i) || Cons(i - 1) || !Cons(i - 2)) return false;
    char ch = b_[i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool Ends(std::string_view s) {
    int len = static_cast<int>(s.size());
    if (len > k_ + 1) return false;
    if (b_.compare(k_ - len + 1, len, s) != 0) return false;
    j_ = k_ - len;
    return true;
  }

  void SetTo(std::string_view s) {
    b_.replace(j_ + 1, std::string::npos, s);
    k_ = j_ + static_cast<int>(s.size());
  }

  void Replace(std::string_view s) {
    if (Measure() > 0) SetTo(s);
  }

  void Step1ab() {
    if (b_[k_] == 's') {
      if (Ends("sses")) {
        k_ -= 2;
      } else if (Ends("ies")) {
        SetTo("i");
      } else if (b_[k_ - 1] != 's') {
        --k_;
      }
      b_.resize(k_ + 1);
    }
    if (Ends("eed")) {
      if (Measure() > 0) --k_;
    } else if ((Ends("ed") || Ends("ing")) && VowelInStem()) {
      k_ = j_;
      b_.resize(k_ + 1);
      if (Ends("at")) {
        SetTo("ate");
      } else if (Ends("bl")) {
        SetTo("ble");
      } else if (Ends("iz")) {
        SetTo("ize");
      } else if (DoubleCons(k_)) {
        --k_;
        char ch = b_[k_];
        if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
      } else {
        j_ = k_;
        if (Measure() == 1 && Cvc(k_)) {
          j_ = k_;
          SetTo("e");
        }
      }
    }
    b_.resize(k_ + 1);
  }

  void Step1c() {
    if (Ends("y") && VowelInStem()) b_[k_] = 'i';
  }

  void Step2() {
    if (k_ < 1) return;
    switch (b_[k_ - 1]) {
      case 'a':
        if (Ends("ational")) { Replace("ate"); break; }
        if (Ends("tional")) { Replace("tion"); break; }
        break;
      case 'c':
        if (Ends("enci")) { Replace("ence"); break; }
        if (Ends("anci")) { Replace("ance"); break; }
        break;
      case 'e':
        if (Ends("izer")) { Replace("ize"); break; }
        break;
      case 'l':
        if (Ends("bli")) { Replace("ble"); break; }
        if (Ends("alli")) { Replace("al"); break; }
        if (Ends("entli")) { Replace("ent"); break; }
        if (Ends("eli")) { Replace("e"); break; }
        if (Ends("ousli")) { Replace("ous"); break; }
        break;
      case 'o':
        if (Ends("ization")) { Replace("ize"); break; }
        if (Ends("ation")) { Replace("ate"); break; }
        if (Ends("ator")) { Replace("ate"); break; }
        break;
      case 's':
        if (Ends("alism")) { Replace("al"); break; }
        if (Ends("iveness")) { Replace("ive"); break; }
        if (Ends("fulness")) { Replace("ful"); break; }
        if (Ends("ousness")) { Replace("ous"); break; }
        break;
      case 't':
        if (Ends("aliti")) { Replace("al"); break; }
        if (Ends("iviti")) { Replace("ive"); break; }
        if (Ends("biliti")) { Replace("ble"); break; }
        break;
      case 'g':
        if (Ends("logi")) { Replace("log"); break; }
        break;
    }
    b_.resize(k_ + 1);
  }

  void Step3() {
    switch (b_[k_]) {
      case 'e':
        if (Ends("icate")) { Replace("ic"); break; }
        if (Ends("ative")) { Replace(""); break; }
        if (Ends("alize")) { Replace("al"); break; }
        break;
      case 'i':
        if (Ends("iciti")) { Replace("ic"); break; }
        break;
      case 'l':
        if (Ends("ical")) { Replace("ic"); break; }
        if (Ends("ful")) { Replace(""); break; }
        break;
      case 's':
        if (Ends("ness")) { Replace(""); break; }
        break;
    }
    b_.resize(k_ + 1);
  }

  void Step4() {
    if (k_ < 1) return;
    switch (b_[k_ - 1]) {
      case 'a':
        if (Ends("al")) break;
        return;
      case 'c':
        if (Ends("ance")) break;
        if (Ends("ence")) break;
        return;
      case 'e':
        if (Ends("er")) break;
        return;
      case 'i':
        if (Ends("ic")) break;
        return;
      case 'l':
        if (Ends("able")) break;
        if (Ends("ible")) break;
        return;
      case 'n':
        if (Ends("ant")) break;
        if (Ends("ement")) break;
        if (Ends("ment")) break;
        if (Ends("ent")) break;
        return;
      case 'o':
        if (Ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) break;
        if (Ends("ou")) break;
        return;
      case 's':
        if (Ends("ism")) break;
        return;
      case 't':
        if (Ends("ate")) break;
        if (Ends("iti")) break;
        return;
      case 'u':
        if (Ends("ous")) break;
        return;
      case 'v':
        if (Ends("ive")) break;
        return;
      case 'z':
        if (Ends("ize")) break;
        return;
      default:
        return;
    }
    if (Measure() > 1) {
      k_ = j_;
      b_.resize(k_ + 1);
    }
  }

  void Step5() {
    j_ = k_;
    if (b_[k_] == 'e') {
      int a = Measure();
      if (a > 1 || (a == 1 && !Cvc(k_ - 1))) --k_;
    }
    if (b_[k_] == 'l' && DoubleCons(k_) && Measure() > 1) --k_;
    b_.resize(k_ + 1);
  }

  std::string b_;
  int k_;
  int j_ = 0;
};

}  // namespace

std::string PorterStem(std::string_view word) {
  bool plain = !word.empty() && std::all_of(word.begin(), word.end(), [](char c) {
    return c >= 'a' && c <= 'z';
  });
  if (!plain) return std::string(word);
  return Stemmer(word).Run();
}

}  // namespace civility
