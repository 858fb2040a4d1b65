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

#ifndef CIVILITY_SRC_TREE_H_
#define CIVILITY_SRC_TREE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "civility/balance.h"
#include "civility/rng.h"
#include "civility/sparse.h"
#include "json.hpp"

namespace civility::internal {

struct TreeOptions {
  int max_depth = -1;  // < 0: unlimited
  int min_samples_split = 2;
  std::size_t max_features = 0;  // 0: every feature is a split candidate
};

// Binary CART classification tree grown with Gini impurity on sparse rows.
// Rows go left when x[feature] <= threshold.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double positive_fraction = 0.0;
  };

  // `samples` selects rows of `x` and may repeat them (bootstrap). `rng` is
  // required when max_features > 0.
  static DecisionTree Fit(const SparseMatrix& x, std::span<const Label> y,
                          std::vector<std::size_t> samples, const TreeOptions& options,
                          Rng* rng);

  double PositiveProbability(const SparseVector& row) const;
  // Exact ties (probability 0.5) go to label 0.
  Label Predict(const SparseVector& row) const { return PositiveProbability(row) > 0.5 ? 1 : 0; }

  std::size_t node_count() const { return nodes_.size(); }
  int depth() const;

  nlohmann::json ToJson() const;
  static DecisionTree FromJson(const nlohmann::json& j);

 private:
  int Grow(const SparseMatrix& x, std::span<const Label> y, std::vector<std::size_t>& samples,
           int depth, const TreeOptions& options, Rng* rng);

  std::vector<Node> nodes_;
};

}  // namespace civility::internal

#endif  // CIVILITY_SRC_TREE_H_
