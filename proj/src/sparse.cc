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

#include "civility/sparse.h"

#include <algorithm>

namespace civility {

double SparseVector::At(uint32_t index) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[it - indices.begin()];
}

SparseVector SparseVector::FromPairs(
    std::vector<std::pair<uint32_t, double>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector v;
  for (std::size_t i = 0; i < pairs.size();) {
    uint32_t index = pairs[i].first;
    double sum = 0.0;
    for (; i < pairs.size() && pairs[i].first == index; ++i) sum += pairs[i].second;
    if (sum != 0.0) {
      v.indices.push_back(index);
      v.values.push_back(sum);
    }
  }
  return v;
}

SparseVector SparseVector::FromDense(std::span<const double> dense) {
  SparseVector v;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      v.indices.push_back(static_cast<uint32_t>(i));
      v.values.push_back(dense[i]);
    }
  }
  return v;
}

double Dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.nnz() && j < b.nnz()) {
    if (a.indices[i] < b.indices[j]) {
      ++i;
    } else if (a.indices[i] > b.indices[j]) {
      ++j;
    } else {
      sum += a.values[i++] * b.values[j++];
    }
  }
  return sum;
}

double Dot(const SparseVector& a, std::span<const double> dense) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.nnz(); ++i) {
    if (a.indices[i] < dense.size()) sum += a.values[i] * dense[a.indices[i]];
  }
  return sum;
}

double SquaredNorm(const SparseVector& a) {
  double sum = 0.0;
  for (double v : a.values) sum += v * v;
  return sum;
}

double SquaredDistance(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.nnz() || j < b.nnz()) {
    double d;
    if (j == b.nnz() || (i < a.nnz() && a.indices[i] < b.indices[j])) {
      d = a.values[i++];
    } else if (i == a.nnz() || b.indices[j] < a.indices[i]) {
      d = b.values[j++];
    } else {
      d = a.values[i++] - b.values[j++];
    }
    sum += d * d;
  }
  return sum;
}

SparseVector Interpolate(const SparseVector& a, const SparseVector& b,
                         double scale) {
  SparseVector out;
  std::size_t i = 0, j = 0;
  auto emit = [&out](uint32_t index, double value) {
    if (value != 0.0) {
      out.indices.push_back(index);
      out.values.push_back(value);
    }
  };
  while (i < a.nnz() || j < b.nnz()) {
    if (j == b.nnz() || (i < a.nnz() && a.indices[i] < b.indices[j])) {
      emit(a.indices[i], a.values[i] - scale * a.values[i]);
      ++i;
    } else if (i == a.nnz() || b.indices[j] < a.indices[i]) {
      emit(b.indices[j], scale * b.values[j]);
      ++j;
    } else {
      emit(a.indices[i], a.values[i] + scale * (b.values[j] - a.values[i]));
      ++i;
      ++j;
    }
  }
  return out;
}

SparseVector Concatenate(const SparseVector& head, std::span<const double> tail,
                         uint32_t offset) {
  SparseVector out = head;
  for (std::size_t k = 0; k < tail.size(); ++k) {
    if (tail[k] != 0.0) {
      out.indices.push_back(offset + static_cast<uint32_t>(k));
      out.values.push_back(tail[k]);
    }
  }
  return out;
}

std::vector<double> ToDense(const SparseVector& v, std::size_t dim) {
  std::vector<double> dense(dim, 0.0);
  for (std::size_t i = 0; i < v.nnz(); ++i) {
    if (v.indices[i] < dim) dense[v.indices[i]] = v.values[i];
  }
  return dense;
}

}  // namespace civility
