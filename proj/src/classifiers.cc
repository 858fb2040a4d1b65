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

#include "civility/classifiers.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>

#include "civility/errors.h"
#include "civility/rng.h"
#include "tree.h"

namespace civility {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Hyperparameter access.

double GetDouble(const HyperParams& h, const char* key, double fallback) {
  auto it = h.find(key);
  return it == h.end() || it->is_null() ? fallback : it->get<double>();
}

int GetInt(const HyperParams& h, const char* key, int fallback) {
  auto it = h.find(key);
  return it == h.end() || it->is_null() ? fallback : it->get<int>();
}

std::string GetString(const HyperParams& h, const char* key, const char* fallback) {
  auto it = h.find(key);
  return it == h.end() || it->is_null() ? fallback : it->get<std::string>();
}

// max_depth: absent or null means unlimited (-1).
int GetDepth(const HyperParams& h) { return GetInt(h, "max_depth", -1); }

std::vector<double> SignedLabels(std::span<const Label> y) {
  std::vector<double> s(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) s[i] = y[i] == 1 ? 1.0 : -1.0;
  return s;
}

// ---------------------------------------------------------------------------
// Multinomial Naive Bayes.

class NaiveBayes : public Model {
 public:
  NaiveBayes(std::vector<double> log_prior, std::vector<std::vector<double>> log_prob)
      : log_prior_(std::move(log_prior)), log_prob_(std::move(log_prob)) {}

  static std::shared_ptr<NaiveBayes> Fit(const SparseMatrix& x, std::span<const Label> y,
                                         double alpha) {
    if (alpha < 0) throw ContractError("Naive Bayes alpha must be >= 0");
    const std::size_t d = x.cols;
    std::vector<std::vector<double>> counts(2, std::vector<double>(d, 0.0));
    std::vector<double> class_rows(2, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const SparseVector& row = x.rows[i];
      class_rows[y[i]] += 1;
      for (std::size_t k = 0; k < row.nnz(); ++k) {
        if (row.values[k] < 0) {
          throw ContractError("multinomial Naive Bayes requires non-negative features");
        }
        counts[y[i]][row.indices[k]] += row.values[k];
      }
    }
    std::vector<double> log_prior(2);
    std::vector<std::vector<double>> log_prob(2, std::vector<double>(d));
    for (int c = 0; c < 2; ++c) {
      log_prior[c] = std::log(class_rows[c] / static_cast<double>(x.size()));
      double total = std::accumulate(counts[c].begin(), counts[c].end(), 0.0);
      double denom = std::log(total + alpha * static_cast<double>(d));
      for (std::size_t f = 0; f < d; ++f) log_prob[c][f] = std::log(counts[c][f] + alpha) - denom;
    }
    return std::make_shared<NaiveBayes>(std::move(log_prior), std::move(log_prob));
  }

  double ClassScore(const SparseVector& x, int c) const {
    double s = log_prior_[c];
    for (std::size_t k = 0; k < x.nnz(); ++k) s += x.values[k] * log_prob_[c][x.indices[k]];
    return s;
  }

  double Score(const SparseVector& x) const override { return ClassScore(x, 1) - ClassScore(x, 0); }
  Label Predict(const SparseVector& x) const override { return Score(x) > 0 ? 1 : 0; }

  json ToJson() const override { return {{"log_prior", log_prior_}, {"log_prob", log_prob_}}; }
  static std::shared_ptr<NaiveBayes> FromJson(const json& j) {
    return std::make_shared<NaiveBayes>(j.at("log_prior").get<std::vector<double>>(),
                                        j.at("log_prob").get<std::vector<std::vector<double>>>());
  }

 private:
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> log_prob_;
};

// ---------------------------------------------------------------------------
// Linear models share a weight vector and bias.

class LinearModel : public Model {
 public:
  LinearModel(std::vector<double> w, double b) : w_(std::move(w)), b_(b) {}
  double Score(const SparseVector& x) const override { return Dot(x, w_) + b_; }
  Label Predict(const SparseVector& x) const override { return Score(x) > 0 ? 1 : 0; }
  json ToJson() const override { return {{"weights", w_}, {"bias", b_}}; }
  static std::shared_ptr<LinearModel> FromJson(const json& j) {
    return std::make_shared<LinearModel>(j.at("weights").get<std::vector<double>>(),
                                         j.at("bias").get<double>());
  }

 private:
  std::vector<double> w_;
  double b_;
};

// L2-regularized logistic regression,
//   min_w,b  0.5 |w|^2 + C sum_i log(1 + exp(-y_i (w.x_i + b))),
// solved with L-BFGS and Armijo backtracking. The bias is not penalized.
class LogisticRegressionSolver {
 public:
  LogisticRegressionSolver(const SparseMatrix& x, std::span<const Label> y, double c)
      : x_(x), y_(SignedLabels(y)), c_(c), dim_(x.cols + 1) {}

  std::shared_ptr<LinearModel> Solve(int max_iter = 200, double tol = 1e-5) {
    std::vector<double> w(dim_, 0.0), g(dim_), w_new(dim_), g_new(dim_), d(dim_);
    double f = Evaluate(w, g);
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    constexpr std::size_t kMemory = 10;

    for (int iter = 0; iter < max_iter; ++iter) {
      double gmax = 0;
      for (double v : g) gmax = std::max(gmax, std::abs(v));
      if (gmax < tol) break;

      // Two-loop recursion.
      d = g;
      std::vector<double> alpha(s_hist.size());
      for (std::size_t k = s_hist.size(); k-- > 0;) {
        alpha[k] = rho_hist[k] * InnerProduct(s_hist[k], d);
        Axpy(-alpha[k], y_hist[k], d);
      }
      if (!s_hist.empty()) {
        double gamma = InnerProduct(s_hist.back(), y_hist.back()) /
                       InnerProduct(y_hist.back(), y_hist.back());
        for (double& v : d) v *= gamma;
      } else {
        double gnorm = std::sqrt(InnerProduct(g, g));
        for (double& v : d) v /= std::max(1.0, gnorm);
      }
      for (std::size_t k = 0; k < s_hist.size(); ++k) {
        double beta = rho_hist[k] * InnerProduct(y_hist[k], d);
        Axpy(alpha[k] - beta, s_hist[k], d);
      }
      for (double& v : d) v = -v;
      double slope = InnerProduct(g, d);
      if (slope >= 0) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        for (std::size_t i = 0; i < dim_; ++i) d[i] = -g[i];
        slope = InnerProduct(g, d);
      }

      double step = 1.0, f_new = f;
      bool accepted = false;
      for (int tries = 0; tries < 50; ++tries) {
        for (std::size_t i = 0; i < dim_; ++i) w_new[i] = w[i] + step * d[i];
        f_new = Evaluate(w_new, g_new);
        if (f_new <= f + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;

      std::vector<double> s(dim_), yv(dim_);
      for (std::size_t i = 0; i < dim_; ++i) {
        s[i] = w_new[i] - w[i];
        yv[i] = g_new[i] - g[i];
      }
      double sy = InnerProduct(s, yv);
      if (sy > 1e-12) {
        s_hist.push_back(std::move(s));
        y_hist.push_back(std::move(yv));
        rho_hist.push_back(1.0 / sy);
        if (s_hist.size() > kMemory) {
          s_hist.pop_front();
          y_hist.pop_front();
          rho_hist.pop_front();
        }
      }
      bool converged = std::abs(f - f_new) <= 1e-10 * std::max(1.0, std::abs(f));
      std::swap(w, w_new);
      std::swap(g, g_new);
      f = f_new;
      if (converged) break;
    }
    double b = w.back();
    w.pop_back();
    return std::make_shared<LinearModel>(std::move(w), b);
  }

 private:
  static double InnerProduct(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  static void Axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
  }

  // Objective value; writes the gradient into `grad`.
  double Evaluate(const std::vector<double>& w, std::vector<double>& grad) const {
    const std::size_t d = dim_ - 1;
    double f = 0;
    for (std::size_t i = 0; i < d; ++i) {
      f += 0.5 * w[i] * w[i];
      grad[i] = w[i];
    }
    grad[d] = 0;
    std::span<const double> weights(w.data(), d);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const SparseVector& row = x_.rows[i];
      double margin = y_[i] * (Dot(row, weights) + w[d]);
      // log(1 + exp(-margin)), stable for both signs.
      f += c_ * (margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin)));
      double sigma = 1.0 / (1.0 + std::exp(margin));  // sigmoid(-margin)
      double coef = -c_ * y_[i] * sigma;
      for (std::size_t k = 0; k < row.nnz(); ++k) grad[row.indices[k]] += coef * row.values[k];
      grad[d] += coef;
    }
    return f;
  }

  const SparseMatrix& x_;
  std::vector<double> y_;
  double c_;
  std::size_t dim_;
};

// Linear SVM (hinge loss) by dual coordinate descent; the bias is an
// appended constant feature.
std::shared_ptr<LinearModel> FitLinearSvm(const SparseMatrix& x, std::span<const Label> y,
                                          double c, uint64_t seed) {
  const std::size_t n = x.size(), d = x.cols;
  std::vector<double> ys = SignedLabels(y);
  std::vector<double> w(d + 1, 0.0), alpha(n, 0.0), q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = SquaredNorm(x.rows[i]) + 1.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::span<const double> weights(w.data(), d);
  for (int epoch = 0; epoch < 1000; ++epoch) {
    rng.Shuffle(order);
    double max_pg = -HUGE_VAL, min_pg = HUGE_VAL;
    for (std::size_t i : order) {
      const SparseVector& row = x.rows[i];
      double grad = ys[i] * (Dot(row, weights) + w[d]) - 1.0;
      double pg = grad;
      if (alpha[i] == 0.0) {
        pg = std::min(grad, 0.0);
      } else if (alpha[i] == c) {
        pg = std::max(grad, 0.0);
      }
      max_pg = std::max(max_pg, pg);
      min_pg = std::min(min_pg, pg);
      if (std::abs(pg) > 1e-12) {
        double old = alpha[i];
        alpha[i] = std::clamp(alpha[i] - grad / q[i], 0.0, c);
        double delta = (alpha[i] - old) * ys[i];
        for (std::size_t k = 0; k < row.nnz(); ++k) w[row.indices[k]] += delta * row.values[k];
        w[d] += delta;
      }
    }
    if (max_pg - min_pg < 0.1) break;
  }
  double b = w.back();
  w.pop_back();
  return std::make_shared<LinearModel>(std::move(w), b);
}

// ---------------------------------------------------------------------------
// RBF-kernel SVM by dual coordinate descent on K + 1 (bias absorbed).

class KernelSvm : public Model {
 public:
  KernelSvm(double gamma, std::vector<SparseVector> support, std::vector<double> coef)
      : gamma_(gamma), support_(std::move(support)), coef_(std::move(coef)) {
    for (const auto& s : support_) norms_.push_back(SquaredNorm(s));
  }

  static std::shared_ptr<KernelSvm> Fit(const SparseMatrix& x, std::span<const Label> y,
                                        double c, uint64_t seed) {
    const std::size_t n = x.size();
    double gamma = ScaleGamma(x);
    std::vector<double> ys = SignedLabels(y), norms(n);
    for (std::size_t i = 0; i < n; ++i) norms[i] = SquaredNorm(x.rows[i]);
    auto kernel = [&](std::size_t i, std::size_t j) {
      double d2 = std::max(0.0, norms[i] + norms[j] - 2.0 * Dot(x.rows[i], x.rows[j]));
      return std::exp(-gamma * d2) + 1.0;
    };
    constexpr std::size_t kCacheLimit = 6000;
    std::vector<float> cache;
    if (n <= kCacheLimit) {
      cache.resize(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
          cache[i * n + j] = cache[j * n + i] = static_cast<float>(kernel(i, j));
        }
      }
    }
    auto k_at = [&](std::size_t i, std::size_t j) -> double {
      return cache.empty() ? kernel(i, j) : cache[i * n + j];
    };

    std::vector<double> alpha(n, 0.0), grad(n, -1.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (int epoch = 0; epoch < 200; ++epoch) {
      rng.Shuffle(order);
      double max_pg = -HUGE_VAL, min_pg = HUGE_VAL;
      for (std::size_t i : order) {
        double g = grad[i], pg = g;
        if (alpha[i] == 0.0) {
          pg = std::min(g, 0.0);
        } else if (alpha[i] == c) {
          pg = std::max(g, 0.0);
        }
        max_pg = std::max(max_pg, pg);
        min_pg = std::min(min_pg, pg);
        if (std::abs(pg) <= 1e-12) continue;
        double old = alpha[i];
        alpha[i] = std::clamp(alpha[i] - g / k_at(i, i), 0.0, c);
        double delta = alpha[i] - old;
        if (delta == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) grad[j] += delta * ys[i] * ys[j] * k_at(i, j);
      }
      if (max_pg - min_pg < 1e-3) break;
    }
    std::vector<SparseVector> support;
    std::vector<double> coef;
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[i] > 0) {
        support.push_back(x.rows[i]);
        coef.push_back(alpha[i] * ys[i]);
      }
    }
    return std::make_shared<KernelSvm>(gamma, std::move(support), std::move(coef));
  }

  double Score(const SparseVector& x) const override {
    double norm = SquaredNorm(x), s = 0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      double d2 = std::max(0.0, norm + norms_[i] - 2.0 * Dot(x, support_[i]));
      s += coef_[i] * (std::exp(-gamma_ * d2) + 1.0);
    }
    return s;
  }
  Label Predict(const SparseVector& x) const override { return Score(x) > 0 ? 1 : 0; }

  json ToJson() const override {
    json sv = json::array();
    for (const auto& s : support_) sv.push_back({{"i", s.indices}, {"v", s.values}});
    return {{"gamma", gamma_}, {"support", sv}, {"coef", coef_}};
  }
  static std::shared_ptr<KernelSvm> FromJson(const json& j) {
    std::vector<SparseVector> support;
    for (const auto& s : j.at("support")) {
      support.push_back({s.at("i").get<std::vector<uint32_t>>(), s.at("v").get<std::vector<double>>()});
    }
    return std::make_shared<KernelSvm>(j.at("gamma").get<double>(), std::move(support),
                                       j.at("coef").get<std::vector<double>>());
  }

  // 1 / (n_features * Var(X)) over all entries, zeros included.
  static double ScaleGamma(const SparseMatrix& x) {
    double total = static_cast<double>(x.size()) * static_cast<double>(std::max<std::size_t>(1, x.cols));
    double sum = 0, sum_sq = 0;
    for (const auto& row : x.rows) {
      for (double v : row.values) {
        sum += v;
        sum_sq += v * v;
      }
    }
    double mean = sum / total;
    double var = sum_sq / total - mean * mean;
    if (var <= 0) return 1.0;
    return 1.0 / (static_cast<double>(std::max<std::size_t>(1, x.cols)) * var);
  }

 private:
  double gamma_;
  std::vector<SparseVector> support_;
  std::vector<double> coef_;
  std::vector<double> norms_;
};

// ---------------------------------------------------------------------------
// k-nearest neighbors (Euclidean).

class Knn : public Model {
 public:
  Knn(int k, bool distance_weighted, std::vector<SparseVector> rows, std::vector<Label> labels)
      : k_(k), distance_weighted_(distance_weighted), rows_(std::move(rows)),
        labels_(std::move(labels)) {
    for (const auto& r : rows_) norms_.push_back(SquaredNorm(r));
  }

  // Weighted vote share of the positive class minus one half.
  double Score(const SparseVector& x) const override {
    Tally t = Votes(x);
    double total = t.votes[0] + t.votes[1];
    return total > 0 ? t.votes[1] / total - 0.5 : 0.0;
  }

  Label Predict(const SparseVector& x) const override {
    Tally t = Votes(x);
    if (t.votes[0] != t.votes[1]) return t.votes[1] > t.votes[0] ? 1 : 0;
    return t.nearest;
  }

  json ToJson() const override {
    json rows = json::array();
    for (const auto& r : rows_) rows.push_back({{"i", r.indices}, {"v", r.values}});
    return {{"k", k_}, {"distance_weighted", distance_weighted_}, {"rows", rows}, {"labels", labels_}};
  }
  static std::shared_ptr<Knn> FromJson(const json& j) {
    std::vector<SparseVector> rows;
    for (const auto& r : j.at("rows")) {
      rows.push_back({r.at("i").get<std::vector<uint32_t>>(), r.at("v").get<std::vector<double>>()});
    }
    return std::make_shared<Knn>(j.at("k").get<int>(), j.at("distance_weighted").get<bool>(),
                                 std::move(rows), j.at("labels").get<std::vector<Label>>());
  }

 private:
  struct Tally {
    std::array<double, 2> votes{0.0, 0.0};
    Label nearest = 0;  // label of the single nearest neighbor, for tie-breaks
  };

  Tally Votes(const SparseVector& x) const {
    double norm = SquaredNorm(x);
    std::vector<std::pair<double, std::size_t>> dist(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      dist[i] = {std::max(0.0, norm + norms_[i] - 2.0 * Dot(x, rows_[i])), i};
    }
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    Tally t;
    t.nearest = labels_[dist[0].second];
    bool exact = distance_weighted_ && dist[0].first == 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double w = 1.0;
      if (distance_weighted_) {
        if (exact) {
          w = dist[i].first == 0.0 ? 1.0 : 0.0;
        } else {
          w = 1.0 / std::sqrt(dist[i].first);
        }
      }
      t.votes[labels_[dist[i].second]] += w;
    }
    return t;
  }

  int k_;
  bool distance_weighted_;
  std::vector<SparseVector> rows_;
  std::vector<Label> labels_;
  std::vector<double> norms_;
};

// ---------------------------------------------------------------------------
// Trees.

class CartModel : public Model {
 public:
  explicit CartModel(internal::DecisionTree tree) : tree_(std::move(tree)) {}
  double Score(const SparseVector& x) const override { return tree_.PositiveProbability(x) - 0.5; }
  Label Predict(const SparseVector& x) const override { return tree_.Predict(x); }
  json ToJson() const override { return {{"tree", tree_.ToJson()}}; }
  static std::shared_ptr<CartModel> FromJson(const json& j) {
    return std::make_shared<CartModel>(internal::DecisionTree::FromJson(j.at("tree")));
  }

 private:
  internal::DecisionTree tree_;
};

class RandomForest : public RandomForestModel {
 public:
  explicit RandomForest(std::vector<internal::DecisionTree> trees) : trees_(std::move(trees)) {}

  static std::shared_ptr<RandomForest> Fit(const SparseMatrix& x, std::span<const Label> y,
                                           int n_estimators, int max_depth, uint64_t seed) {
    if (n_estimators < 1) throw ContractError("n_estimators must be >= 1");
    internal::TreeOptions options;
    options.max_depth = max_depth;
    options.max_features = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(x.cols)))));
    std::vector<internal::DecisionTree> trees;
    trees.reserve(static_cast<std::size_t>(n_estimators));
    for (int t = 0; t < n_estimators; ++t) {
      Rng rng(DeriveSeed(seed, "rf_tree", {static_cast<uint64_t>(t)}));
      std::vector<std::size_t> samples(x.size());
      for (auto& s : samples) s = rng.Below(x.size());
      trees.push_back(internal::DecisionTree::Fit(x, y, std::move(samples), options, &rng));
    }
    return std::make_shared<RandomForest>(std::move(trees));
  }

  // Mean positive probability across trees, centered at zero.
  double Score(const SparseVector& x) const override {
    double s = 0;
    for (const auto& t : trees_) s += t.PositiveProbability(x);
    return s / static_cast<double>(trees_.size()) - 0.5;
  }

  // Majority vote; ties fall back to the summed probability, then label 0.
  Label Predict(const SparseVector& x) const override {
    std::size_t positive = 0;
    for (const auto& t : trees_) positive += t.Predict(x) == 1 ? 1 : 0;
    std::size_t negative = trees_.size() - positive;
    if (positive != negative) return positive > negative ? 1 : 0;
    return Score(x) > 0 ? 1 : 0;
  }

  std::vector<Label> TreeVotes(const SparseVector& x) const override {
    std::vector<Label> votes;
    for (const auto& t : trees_) votes.push_back(t.Predict(x));
    return votes;
  }
  std::size_t tree_count() const override { return trees_.size(); }

  json ToJson() const override {
    json trees = json::array();
    for (const auto& t : trees_) trees.push_back(t.ToJson());
    return {{"trees", trees}};
  }
  static std::shared_ptr<RandomForest> FromJson(const json& j) {
    std::vector<internal::DecisionTree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(internal::DecisionTree::FromJson(t));
    return std::make_shared<RandomForest>(std::move(trees));
  }

 private:
  std::vector<internal::DecisionTree> trees_;
};

std::shared_ptr<const Model> ModelFromJson(ClassifierKind kind, const HyperParams& h,
                                           const json& j) {
  switch (kind) {
    case ClassifierKind::kCart: return CartModel::FromJson(j);
    case ClassifierKind::kKnn: return Knn::FromJson(j);
    case ClassifierKind::kLogisticRegression: return LinearModel::FromJson(j);
    case ClassifierKind::kMultinomialNb: return NaiveBayes::FromJson(j);
    case ClassifierKind::kRandomForest: return RandomForest::FromJson(j);
    case ClassifierKind::kSvm:
      if (GetString(h, "kernel", "linear") == "rbf") return KernelSvm::FromJson(j);
      return LinearModel::FromJson(j);
  }
  throw ContractError("unknown classifier kind");
}

json ProductGrid(const std::vector<std::pair<std::string, json>>& axes) {
  json grid = json::array({json::object()});
  for (const auto& [key, values] : axes) {
    json next = json::array();
    for (const auto& partial : grid) {
      for (const auto& v : values) {
        json h = partial;
        h[key] = v;
        next.push_back(h);
      }
    }
    grid = std::move(next);
  }
  return grid;
}

}  // namespace

std::string_view ToString(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::kCart: return "cart";
    case ClassifierKind::kKnn: return "knn";
    case ClassifierKind::kLogisticRegression: return "lr";
    case ClassifierKind::kMultinomialNb: return "nb";
    case ClassifierKind::kRandomForest: return "rf";
    case ClassifierKind::kSvm: return "svm";
  }
  return "unknown";
}

ClassifierKind ParseClassifierKind(std::string_view s) {
  for (ClassifierKind k : AllClassifierKinds()) {
    if (ToString(k) == s) return k;
  }
  throw ContractError("unknown classifier: " + std::string(s));
}

const std::vector<ClassifierKind>& AllClassifierKinds() {
  static const std::vector<ClassifierKind> kinds = {
      ClassifierKind::kCart,          ClassifierKind::kKnn,
      ClassifierKind::kLogisticRegression, ClassifierKind::kMultinomialNb,
      ClassifierKind::kRandomForest,  ClassifierKind::kSvm};
  return kinds;
}

const std::vector<std::string>& GridKeys(ClassifierKind kind) {
  static const std::vector<std::string> cart = {"max_depth", "min_samples_split"};
  static const std::vector<std::string> knn = {"k", "weights"};
  static const std::vector<std::string> lr = {"C", "penalty"};
  static const std::vector<std::string> nb = {"alpha"};
  static const std::vector<std::string> rf = {"max_depth", "n_estimators"};
  static const std::vector<std::string> svm = {"C", "kernel"};
  switch (kind) {
    case ClassifierKind::kCart: return cart;
    case ClassifierKind::kKnn: return knn;
    case ClassifierKind::kLogisticRegression: return lr;
    case ClassifierKind::kMultinomialNb: return nb;
    case ClassifierKind::kRandomForest: return rf;
    case ClassifierKind::kSvm: return svm;
  }
  return nb;
}

void ClassifierSpec::Validate() const {
  if (!hyperparams.is_object()) throw ContractError("hyperparameters must be an object");
  const auto& keys = GridKeys(kind);
  for (const auto& [key, value] : hyperparams.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ContractError("unknown hyperparameter '" + key + "' for " +
                          std::string(ToString(kind)));
    }
  }
  auto positive_number = [&](const char* key) {
    auto it = hyperparams.find(key);
    if (it != hyperparams.end() && !it->is_null() && (!it->is_number() || it->get<double>() <= 0)) {
      throw ContractError(std::string(key) + " must be a positive number");
    }
  };
  switch (kind) {
    case ClassifierKind::kCart:
    case ClassifierKind::kRandomForest:
      positive_number("max_depth");
      positive_number("min_samples_split");
      positive_number("n_estimators");
      break;
    case ClassifierKind::kKnn: {
      positive_number("k");
      std::string w = GetString(hyperparams, "weights", "uniform");
      if (w != "uniform" && w != "distance") throw ContractError("weights must be uniform or distance");
      break;
    }
    case ClassifierKind::kLogisticRegression:
      positive_number("C");
      if (GetString(hyperparams, "penalty", "l2") != "l2") throw ContractError("only the l2 penalty is supported");
      break;
    case ClassifierKind::kMultinomialNb: {
      auto it = hyperparams.find("alpha");
      if (it != hyperparams.end() && (!it->is_number() || it->get<double>() < 0)) {
        throw ContractError("alpha must be >= 0");
      }
      break;
    }
    case ClassifierKind::kSvm: {
      positive_number("C");
      std::string k = GetString(hyperparams, "kernel", "linear");
      if (k != "linear" && k != "rbf") throw ContractError("kernel must be linear or rbf");
      break;
    }
  }
}

std::vector<HyperParams> DefaultGrid(ClassifierKind kind) {
  json grid;
  switch (kind) {
    case ClassifierKind::kCart:
      grid = ProductGrid({{"max_depth", {4, 8, 16, nullptr}}, {"min_samples_split", {2, 5}}});
      break;
    case ClassifierKind::kKnn:
      grid = ProductGrid({{"k", {1, 3, 5, 11}}, {"weights", {"uniform", "distance"}}});
      break;
    case ClassifierKind::kLogisticRegression:
      grid = ProductGrid({{"C", {0.01, 0.1, 1.0, 10.0}}, {"penalty", {"l2"}}});
      break;
    case ClassifierKind::kMultinomialNb:
      grid = ProductGrid({{"alpha", {0.1, 0.5, 1.0}}});
      break;
    case ClassifierKind::kRandomForest:
      grid = ProductGrid({{"n_estimators", {100, 300}}, {"max_depth", {8, 16, nullptr}}});
      break;
    case ClassifierKind::kSvm:
      grid = ProductGrid({{"C", {0.1, 1.0, 10.0}}, {"kernel", {"linear", "rbf"}}});
      break;
  }
  return grid.get<std::vector<HyperParams>>();
}

TrainedModel::TrainedModel(ClassifierSpec spec, std::size_t dimension,
                           std::shared_ptr<const Model> impl)
    : spec_(std::move(spec)), dimension_(dimension), impl_(std::move(impl)) {}

std::vector<Label> TrainedModel::Predict(const SparseMatrix& x) const {
  if (x.cols != dimension_) {
    throw ContractError("feature dimension " + std::to_string(x.cols) + " differs from training " +
                        std::to_string(dimension_));
  }
  std::vector<Label> out;
  out.reserve(x.size());
  for (const auto& row : x.rows) out.push_back(impl_->Predict(row));
  return out;
}

std::vector<double> TrainedModel::Scores(const SparseMatrix& x) const {
  if (x.cols != dimension_) throw ContractError("feature dimension differs from training");
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& row : x.rows) out.push_back(impl_->Score(row));
  return out;
}

nlohmann::json TrainedModel::ToJson() const {
  return {{"kind", ToString(spec_.kind)},
          {"hyperparams", spec_.hyperparams},
          {"seed", spec_.seed},
          {"dimension", dimension_},
          {"model", impl_->ToJson()}};
}

TrainedModel TrainedModel::FromJson(const nlohmann::json& j) {
  ClassifierSpec spec;
  spec.kind = ParseClassifierKind(j.at("kind").get<std::string>());
  spec.hyperparams = j.at("hyperparams");
  spec.seed = j.at("seed").get<uint64_t>();
  return TrainedModel(spec, j.at("dimension").get<std::size_t>(),
                      ModelFromJson(spec.kind, spec.hyperparams, j.at("model")));
}

TrainedModel Train(const ClassifierSpec& spec, const SparseMatrix& x, std::span<const Label> y) {
  spec.Validate();
  if (x.size() != y.size()) throw ContractError("feature rows and labels differ in count");
  if (x.size() < 2) throw ContractError("training requires at least 2 rows");
  bool seen[2] = {false, false};
  for (Label l : y) {
    if (l != 0 && l != 1) throw ContractError("labels must be 0 or 1");
    seen[l] = true;
  }
  if (!seen[0] || !seen[1]) throw ContractError("training data contains a single class");
  for (const auto& row : x.rows) {
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      if (!std::isfinite(row.values[k])) throw ContractError("non-finite feature value");
      if (row.indices[k] >= x.cols) throw ContractError("feature index out of range");
    }
  }

  const HyperParams& h = spec.hyperparams;
  std::shared_ptr<const Model> impl;
  switch (spec.kind) {
    case ClassifierKind::kCart: {
      internal::TreeOptions options;
      options.max_depth = GetDepth(h);
      options.min_samples_split = GetInt(h, "min_samples_split", 2);
      std::vector<std::size_t> samples(x.size());
      std::iota(samples.begin(), samples.end(), 0);
      impl = std::make_shared<CartModel>(
          internal::DecisionTree::Fit(x, y, std::move(samples), options, nullptr));
      break;
    }
    case ClassifierKind::kKnn:
      impl = std::make_shared<Knn>(GetInt(h, "k", 5), GetString(h, "weights", "uniform") == "distance",
                                   x.rows, std::vector<Label>(y.begin(), y.end()));
      break;
    case ClassifierKind::kLogisticRegression:
      impl = LogisticRegressionSolver(x, y, GetDouble(h, "C", 1.0)).Solve();
      break;
    case ClassifierKind::kMultinomialNb:
      impl = NaiveBayes::Fit(x, y, GetDouble(h, "alpha", 1.0));
      break;
    case ClassifierKind::kRandomForest:
      impl = RandomForest::Fit(x, y, GetInt(h, "n_estimators", 100), GetDepth(h), spec.seed);
      break;
    case ClassifierKind::kSvm:
      if (GetString(h, "kernel", "linear") == "rbf") {
        impl = KernelSvm::Fit(x, y, GetDouble(h, "C", 1.0), spec.seed);
      } else {
        impl = FitLinearSvm(x, y, GetDouble(h, "C", 1.0), spec.seed);
      }
      break;
  }
  return TrainedModel(spec, x.cols, std::move(impl));
}

}  // namespace civility
