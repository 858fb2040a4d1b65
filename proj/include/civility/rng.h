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

#ifndef CIVILITY_RNG_H_
#define CIVILITY_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace civility {

// Derives an independent seed for a named sub-stream of `root`. Every source
// of randomness in a run (folds, grid, EDA, balancing, ...) draws from its
// own stream so that results do not depend on execution order.
uint64_t DeriveSeed(uint64_t root, std::string_view stream,
                    std::initializer_list<uint64_t> ids = {});

// Stable 64-bit hash of a string, used to key per-record streams.
uint64_t HashString(std::string_view text);

// Thin wrapper around mt19937_64. The integer and real draws are implemented
// here rather than with <random> distributions, whose output is not
// specified by the standard, so runs are bitwise reproducible across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t Below(uint64_t n);

  // Uniform real in [0, 1).
  double Uniform();

  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = Below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace civility

#endif  // CIVILITY_RNG_H_
