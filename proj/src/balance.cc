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

#include "civility/balance.h"

#include <algorithm>
#include <utility>

#include <spdlog/spdlog.h>

#include "civility/errors.h"
#include "civility/rng.h"

namespace civility {
namespace {

struct ClassSplit {
  std::vector<std::size_t> minority;
  std::vector<std::size_t> majority;
  Label minority_label = 0;
};

ClassSplit SplitByClass(std::span<const Label> labels) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      pos.push_back(i);
    } else if (labels[i] == 0) {
      neg.push_back(i);
    } else {
      throw ContractError("labels must be 0 or 1");
    }
  }
  if (pos.empty() || neg.empty()) throw ContractError("balancing needs both classes present");
  ClassSplit s;
  // Ties: treat the positive class as the majority.
  if (pos.size() >= neg.size()) {
    s.majority = std::move(pos);
    s.minority = std::move(neg);
    s.minority_label = 0;
  } else {
    s.majority = std::move(neg);
    s.minority = std::move(pos);
    s.minority_label = 1;
  }
  return s;
}

std::vector<std::size_t> SampleWithoutReplacement(std::vector<std::size_t> pool,
                                                  std::size_t count, Rng& rng) {
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count && i < pool.size(); ++i) {
    std::size_t j = i + rng.Below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(std::min(count, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

std::string_view ToString(BalanceKind k) {
  switch (k) {
    case BalanceKind::kNone:
      return "none";
    case BalanceKind::kRandomOver:
      return "random_over";
    case BalanceKind::kRandomUnder:
      return "random_under";
    case BalanceKind::kSmote:
      return "smote";
  }
  return "none";
}

BalanceKind ParseBalanceKind(std::string_view s) {
  if (s == "none") return BalanceKind::kNone;
  if (s == "random_over") return BalanceKind::kRandomOver;
  if (s == "random_under") return BalanceKind::kRandomUnder;
  if (s == "smote") return BalanceKind::kSmote;
  throw ParseError("unknown balance strategy '" + std::string(s) + "'", 0);
}

std::string_view ToString(SmoteVariant v) {
  return v == SmoteVariant::kOversampleOnly ? "oversample_only" : "midpoint_undersample";
}

SmoteVariant ParseSmoteVariant(std::string_view s) {
  if (s == "oversample_only") return SmoteVariant::kOversampleOnly;
  if (s == "midpoint_undersample") return SmoteVariant::kMidpointUndersample;
  throw ParseError("unknown SMOTE variant '" + std::string(s) + "'", 0);
}

std::vector<std::size_t> RandomOversample(std::span<const Label> labels, uint64_t seed) {
  ClassSplit s = SplitByClass(labels);
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  Rng rng(seed);
  for (std::size_t k = s.minority.size(); k < s.majority.size(); ++k) {
    out.push_back(s.minority[rng.Below(s.minority.size())]);
  }
  return out;
}

std::vector<std::size_t> RandomUndersample(std::span<const Label> labels, uint64_t seed) {
  ClassSplit s = SplitByClass(labels);
  Rng rng(seed);
  std::vector<std::size_t> kept =
      SampleWithoutReplacement(s.majority, s.minority.size(), rng);
  kept.insert(kept.end(), s.minority.begin(), s.minority.end());
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<std::size_t> NearestNeighbors(const SparseMatrix& features, std::size_t query,
                                          std::span<const std::size_t> candidates,
                                          std::size_t k) {
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t c : candidates) {
    if (c == query) continue;
    dist.emplace_back(SquaredDistance(features.rows[query], features.rows[c]), c);
  }
  k = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(dist[i].second);
  return out;
}

SmoteResult Smote(const SparseMatrix& features, std::span<const Label> labels,
                  int k_neighbors, uint64_t seed, SmoteVariant variant) {
  if (features.size() != labels.size()) {
    throw ContractError("SMOTE: feature rows and labels differ in length");
  }
  if (k_neighbors < 1) throw ContractError("SMOTE: k_neighbors must be >= 1");
  ClassSplit s = SplitByClass(labels);
  Rng rng(seed);
  SmoteResult result;
  result.features.cols = features.cols;

  std::size_t target = s.majority.size();
  std::vector<std::size_t> kept_majority = s.majority;
  if (variant == SmoteVariant::kMidpointUndersample) {
    target = (s.majority.size() + s.minority.size()) / 2;
    target = std::max(target, s.minority.size());
    kept_majority = SampleWithoutReplacement(s.majority, target, rng);
  }
  result.kept = kept_majority;
  result.kept.insert(result.kept.end(), s.minority.begin(), s.minority.end());
  std::sort(result.kept.begin(), result.kept.end());
  for (std::size_t i : result.kept) {
    result.features.rows.push_back(features.rows[i]);
    result.labels.push_back(labels[i]);
  }

  const std::size_t needed = target - s.minority.size();
  if (s.minority.size() < 2) {
    spdlog::warn("SMOTE needs at least 2 minority samples; using random oversampling");
    result.fell_back_to_oversampling = true;
    for (std::size_t k = 0; k < needed; ++k) {
      std::size_t base = s.minority[rng.Below(s.minority.size())];
      result.features.rows.push_back(features.rows[base]);
      result.labels.push_back(s.minority_label);
      result.synthetic.push_back({base, base, 0.0});
    }
    return result;
  }

  const std::size_t k = std::min<std::size_t>(k_neighbors, s.minority.size() - 1);
  result.k_used = static_cast<int>(k);
  if (needed == 0) return result;
  std::vector<std::vector<std::size_t>> neighbors(s.minority.size());
  for (std::size_t m = 0; m < s.minority.size(); ++m) {
    neighbors[m] = NearestNeighbors(features, s.minority[m], s.minority, k);
  }
  for (std::size_t n = 0; n < needed; ++n) {
    std::size_t m = rng.Below(s.minority.size());
    std::size_t base = s.minority[m];
    std::size_t nn = neighbors[m][rng.Below(neighbors[m].size())];
    double lambda = rng.Uniform();
    result.features.rows.push_back(
        Interpolate(features.rows[base], features.rows[nn], lambda));
    result.labels.push_back(s.minority_label);
    result.synthetic.push_back({base, nn, lambda});
  }
  return result;
}

BalancedSet ApplyBalance(const SparseMatrix& features, std::span<const Label> labels,
                         const BalanceStrategy& strategy) {
  BalancedSet out;
  out.features.cols = features.cols;
  auto select = [&](const std::vector<std::size_t>& rows) {
    for (std::size_t i : rows) {
      out.features.rows.push_back(features.rows[i]);
      out.labels.push_back(labels[i]);
      out.origin.push_back(i);
    }
  };
  switch (strategy.kind) {
    case BalanceKind::kNone: {
      std::vector<std::size_t> all(labels.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      select(all);
      break;
    }
    case BalanceKind::kRandomOver:
      select(RandomOversample(labels, strategy.seed));
      break;
    case BalanceKind::kRandomUnder:
      select(RandomUndersample(labels, strategy.seed));
      break;
    case BalanceKind::kSmote: {
      SmoteResult r = Smote(features, labels, strategy.k_neighbors, strategy.seed,
                            strategy.smote_variant);
      out.features = std::move(r.features);
      out.labels = std::move(r.labels);
      out.origin = r.kept;
      for (const auto& s : r.synthetic) out.origin.push_back(s.base);
      break;
    }
  }
  return out;
}

}  // namespace civility
