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

#include "tree.h"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace civility::internal {
namespace {

double Gini(double n, double pos) {
  if (n <= 0) return 0.0;
  double p = pos / n;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

struct ValueGroup {
  double value;
  double count;
  double positives;
};

}  // namespace

DecisionTree DecisionTree::Fit(const SparseMatrix& x, std::span<const Label> y,
                               std::vector<std::size_t> samples, const TreeOptions& options,
                               Rng* rng) {
  DecisionTree tree;
  tree.Grow(x, y, samples, 0, options, rng);
  return tree;
}

int DecisionTree::Grow(const SparseMatrix& x, std::span<const Label> y,
                       std::vector<std::size_t>& samples, int depth,
                       const TreeOptions& options, Rng* rng) {
  const double n = static_cast<double>(samples.size());
  double positives = 0;
  for (std::size_t s : samples) positives += y[s] == 1 ? 1 : 0;

  int index = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_[index].positive_fraction = n > 0 ? positives / n : 0.0;

  const bool pure = positives == 0 || positives == n;
  if (pure || (options.max_depth >= 0 && depth >= options.max_depth) ||
      samples.size() < static_cast<std::size_t>(std::max(2, options.min_samples_split))) {
    return index;
  }

  // Non-zero (value, label) pairs per feature among the node's samples.
  std::unordered_map<uint32_t, std::vector<std::pair<double, Label>>> columns;
  for (std::size_t s : samples) {
    const SparseVector& row = x.rows[s];
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      columns[row.indices[k]].emplace_back(row.values[k], y[s]);
    }
  }
  std::vector<uint32_t> candidates;
  candidates.reserve(columns.size());
  for (const auto& [feature, entries] : columns) candidates.push_back(feature);
  std::sort(candidates.begin(), candidates.end());
  if (options.max_features > 0 && candidates.size() > options.max_features) {
    // Partial Fisher-Yates, then restore order for deterministic tie-breaks.
    for (std::size_t i = 0; i < options.max_features; ++i) {
      std::size_t j = i + rng->Below(candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(options.max_features);
    std::sort(candidates.begin(), candidates.end());
  }

  const double parent_impurity = Gini(n, positives);
  Split best;
  best.impurity = parent_impurity;
  for (uint32_t feature : candidates) {
    auto& entries = columns[feature];
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double zero_count = n - static_cast<double>(entries.size());
    double zero_pos = positives;
    for (const auto& e : entries) zero_pos -= e.second == 1 ? 1 : 0;

    std::vector<ValueGroup> groups;
    bool zero_placed = zero_count <= 0;
    for (const auto& [value, label] : entries) {
      if (!zero_placed && value > 0.0) {
        groups.push_back({0.0, zero_count, zero_pos});
        zero_placed = true;
      }
      if (!groups.empty() && groups.back().value == value) {
        groups.back().count += 1;
        groups.back().positives += label == 1 ? 1 : 0;
      } else {
        groups.push_back({value, 1, label == 1 ? 1.0 : 0.0});
      }
    }
    if (!zero_placed) groups.push_back({0.0, zero_count, zero_pos});

    double left_n = 0, left_pos = 0;
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
      left_n += groups[g].count;
      left_pos += groups[g].positives;
      double right_n = n - left_n, right_pos = positives - left_pos;
      double impurity = (left_n * Gini(left_n, left_pos) + right_n * Gini(right_n, right_pos)) / n;
      if (impurity < best.impurity - 1e-12) {
        best.feature = static_cast<int>(feature);
        best.threshold = 0.5 * (groups[g].value + groups[g + 1].value);
        best.impurity = impurity;
      }
    }
  }
  if (best.feature < 0) return index;

  std::vector<std::size_t> left, right;
  for (std::size_t s : samples) {
    if (x.rows[s].At(static_cast<uint32_t>(best.feature)) <= best.threshold) {
      left.push_back(s);
    } else {
      right.push_back(s);
    }
  }
  samples.clear();
  samples.shrink_to_fit();
  columns.clear();

  nodes_[index].feature = best.feature;
  nodes_[index].threshold = best.threshold;
  int l = Grow(x, y, left, depth + 1, options, rng);
  nodes_[index].left = l;
  int r = Grow(x, y, right, depth + 1, options, rng);
  nodes_[index].right = r;
  return index;
}

double DecisionTree::PositiveProbability(const SparseVector& row) const {
  int i = 0;
  while (nodes_[i].feature >= 0) {
    const Node& node = nodes_[i];
    i = row.At(static_cast<uint32_t>(node.feature)) <= node.threshold ? node.left : node.right;
  }
  return nodes_[i].positive_fraction;
}

int DecisionTree::depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int max_depth = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    max_depth = std::max(max_depth, depth[i]);
    if (nodes_[i].feature >= 0) {
      depth[nodes_[i].left] = depth[i] + 1;
      depth[nodes_[i].right] = depth[i] + 1;
    }
  }
  return max_depth;
}

nlohmann::json DecisionTree::ToJson() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& n : nodes_) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.positive_fraction});
  }
  return nodes;
}

DecisionTree DecisionTree::FromJson(const nlohmann::json& j) {
  DecisionTree t;
  for (const auto& n : j) {
    t.nodes_.push_back(Node{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                            n.at(3).get<int>(), n.at(4).get<double>()});
  }
  return t;
}

}  // namespace civility::internal
