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

#ifndef CIVILITY_SPARSE_H_
#define CIVILITY_SPARSE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace civility {

// Sparse real vector with strictly increasing indices and no explicit zeros.
struct SparseVector {
  std::vector<uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }

  // Value at `index`, 0 when absent.
  double At(uint32_t index) const;

  // Builds a vector from unsorted (index, value) pairs; duplicate indices are
  // summed and zeros dropped.
  static SparseVector FromPairs(std::vector<std::pair<uint32_t, double>> pairs);
  static SparseVector FromDense(std::span<const double> dense);

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

struct SparseMatrix {
  std::vector<SparseVector> rows;
  std::size_t cols = 0;

  std::size_t size() const { return rows.size(); }
};

double Dot(const SparseVector& a, const SparseVector& b);
double Dot(const SparseVector& a, std::span<const double> dense);
double SquaredNorm(const SparseVector& a);
double SquaredDistance(const SparseVector& a, const SparseVector& b);

// a + scale * (b - a), the interpolation used by SMOTE.
SparseVector Interpolate(const SparseVector& a, const SparseVector& b,
                         double scale);

// Concatenates `tail` after `head`, shifting tail indices by `offset`.
SparseVector Concatenate(const SparseVector& head, std::span<const double> tail,
                         uint32_t offset);

std::vector<double> ToDense(const SparseVector& v, std::size_t dim);

}  // namespace civility

#endif  // CIVILITY_SPARSE_H_
