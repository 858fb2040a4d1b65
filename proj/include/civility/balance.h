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

#ifndef CIVILITY_BALANCE_H_
#define CIVILITY_BALANCE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "civility/sparse.h"

namespace civility {

// Binary labels throughout the library: 1 is the positive class (civil /
// non-tone-bearing), 0 the negative class.
using Label = int;

enum class BalanceKind { kNone, kRandomOver, kRandomUnder, kSmote };

std::string_view ToString(BalanceKind k);
BalanceKind ParseBalanceKind(std::string_view s);

enum class SmoteVariant {
  kOversampleOnly,      // minority grows to the majority count
  kMidpointUndersample,  // majority shrinks to the midpoint, minority grows to it
};

std::string_view ToString(SmoteVariant v);
SmoteVariant ParseSmoteVariant(std::string_view s);

struct BalanceStrategy {
  BalanceKind kind = BalanceKind::kNone;
  int k_neighbors = 5;
  SmoteVariant smote_variant = SmoteVariant::kOversampleOnly;
  uint64_t seed = 0;
};

// Row selections over the input. Entries index the original records; an
// index may repeat (oversampling).
std::vector<std::size_t> RandomOversample(std::span<const Label> labels, uint64_t seed);
std::vector<std::size_t> RandomUndersample(std::span<const Label> labels, uint64_t seed);

// One synthetic SMOTE row: base + lambda * (neighbor - base).
struct SyntheticOrigin {
  std::size_t base;
  std::size_t neighbor;
  double lambda;
};

struct SmoteResult {
  SparseMatrix features;
  std::vector<Label> labels;
  // For rows [0, kept.size()) the original row index; synthetic rows follow.
  std::vector<std::size_t> kept;
  std::vector<SyntheticOrigin> synthetic;
  // k actually used after clamping to minority size - 1.
  int k_used = 0;
  bool fell_back_to_oversampling = false;
};

// Synthetic minority oversampling. Neighbors are the k nearest minority rows
// by Euclidean distance (ties broken by row index). With a single minority
// row it falls back to random oversampling and logs a warning.
SmoteResult Smote(const SparseMatrix& features, std::span<const Label> labels,
                  int k_neighbors, uint64_t seed,
                  SmoteVariant variant = SmoteVariant::kOversampleOnly);

// Indices of the k nearest rows to `rows[query]` among `candidates`
// (excluding the query itself).
std::vector<std::size_t> NearestNeighbors(const SparseMatrix& features,
                                          std::size_t query,
                                          std::span<const std::size_t> candidates,
                                          std::size_t k);

// Applies `strategy` to a feature matrix, returning rows and labels in the
// balanced order. `origin[i]` is the source row (base row for synthetic
// rows).
struct BalancedSet {
  SparseMatrix features;
  std::vector<Label> labels;
  std::vector<std::size_t> origin;
};

BalancedSet ApplyBalance(const SparseMatrix& features, std::span<const Label> labels,
                         const BalanceStrategy& strategy);

}  // namespace civility

#endif  // CIVILITY_BALANCE_H_
