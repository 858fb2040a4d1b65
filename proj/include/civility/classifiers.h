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

// The six classical binary classifiers: CART, k-nearest neighbors, L2
// logistic regression, multinomial Naive Bayes, random forest and SVM
// (linear or RBF kernel). All train on sparse rows with labels in {0, 1}.

#ifndef CIVILITY_CLASSIFIERS_H_
#define CIVILITY_CLASSIFIERS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "civility/balance.h"
#include "civility/sparse.h"
#include "json.hpp"

namespace civility {

enum class ClassifierKind { kCart, kKnn, kLogisticRegression, kMultinomialNb, kRandomForest, kSvm };

// "cart", "knn", "lr", "nb", "rf", "svm".
std::string_view ToString(ClassifierKind k);
ClassifierKind ParseClassifierKind(std::string_view s);
const std::vector<ClassifierKind>& AllClassifierKinds();

// A JSON object of hyperparameter name -> value. Keys are kept sorted, so
// dump() is a canonical form usable for equality and counting.
using HyperParams = nlohmann::json;

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kLogisticRegression;
  HyperParams hyperparams = HyperParams::object();
  uint64_t seed = 0;

  // Throws ContractError if a key is not declared for the kind.
  void Validate() const;
};

// Hyperparameter names a kind accepts.
const std::vector<std::string>& GridKeys(ClassifierKind kind);

// Documented default search spaces:
//   cart: max_depth {4, 8, 16, none}, min_samples_split {2, 5}
//   knn:  k {1, 3, 5, 11}, weights {uniform, distance}
//   lr:   C {0.01, 0.1, 1, 10}, penalty {l2}
//   nb:   alpha {0.1, 0.5, 1.0}
//   rf:   n_estimators {100, 300}, max_depth {8, 16, none}
//   svm:  C {0.1, 1, 10}, kernel {linear, rbf}
std::vector<HyperParams> DefaultGrid(ClassifierKind kind);

// Fitted model internals. Implementations are immutable after training.
class Model {
 public:
  virtual ~Model() = default;
  // Larger means more confidently positive; Predict() thresholds it.
  virtual double Score(const SparseVector& x) const = 0;
  virtual Label Predict(const SparseVector& x) const = 0;
  virtual nlohmann::json ToJson() const = 0;
};

class TrainedModel {
 public:
  TrainedModel(ClassifierSpec spec, std::size_t dimension, std::shared_ptr<const Model> impl);

  ClassifierKind kind() const { return spec_.kind; }
  const ClassifierSpec& spec() const { return spec_; }
  std::size_t dimension() const { return dimension_; }
  const Model& impl() const { return *impl_; }

  // Throws ContractError when x.cols differs from the training dimension.
  std::vector<Label> Predict(const SparseMatrix& x) const;
  std::vector<double> Scores(const SparseMatrix& x) const;

  nlohmann::json ToJson() const;
  static TrainedModel FromJson(const nlohmann::json& j);

 private:
  ClassifierSpec spec_;
  std::size_t dimension_;
  std::shared_ptr<const Model> impl_;
};

// Throws ContractError when rows and labels differ, fewer than 2 rows are
// given, only one class is present or a feature is not finite.
TrainedModel Train(const ClassifierSpec& spec, const SparseMatrix& x, std::span<const Label> y);

inline std::vector<Label> Predict(const TrainedModel& model, const SparseMatrix& x) {
  return model.Predict(x);
}

// Exposed for tests that inspect individual trees.
class RandomForestModel : public Model {
 public:
  virtual std::vector<Label> TreeVotes(const SparseVector& x) const = 0;
  virtual std::size_t tree_count() const = 0;
};

}  // namespace civility

#endif  // CIVILITY_CLASSIFIERS_H_
