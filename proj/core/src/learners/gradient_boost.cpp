#include "majvote/learners/gradient_boost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "majvote/error.hpp"
#include "majvote/random.hpp"

namespace majvote {

double BoostedTreesModel::raw_score(const SparseVector& x) const {
  double f = base_score;
  for (const DecisionTree& t : trees) f += eta * t.value(x);
  return f;
}

namespace {

double sigmoid(double f) {
  if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
  const double e = std::exp(f);
  return e / (1.0 + e);
}

}  // namespace

LogisticDerivatives logistic_derivatives(double raw_score, int y) {
  const double p = sigmoid(raw_score);
  return {p - static_cast<double>(y), p * (1.0 - p)};
}

double logistic_log_loss(double raw_score, int y) {
  // -ln sigmoid(F) = ln(1 + e^-F); -ln(1 - sigmoid(F)) = ln(1 + e^F)
  const double z = y == 1 ? -raw_score : raw_score;
  return z > 30.0 ? z : std::log1p(std::exp(z));
}

BoostedTreesModel fit_gradient_boost(const FeatureMatrix& train,
                                     const GradientBoostParams& params, BoostingTrace* trace) {
  if (params.n_rounds < 1) throw ConfigError("n_rounds must be >= 1");
  if (params.depth < 1) throw ConfigError("depth must be >= 1");
  if (!(params.eta > 0.0 && params.eta <= 1.0)) throw ConfigError("eta must lie in (0,1]");
  if (params.lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (!(params.colsample > 0.0 && params.colsample <= 1.0)) {
    throw ConfigError("colsample must lie in (0,1]");
  }

  const std::size_t n = train.rows.size();
  const ColumnIndex columns(train);
  double positives = 0.0;
  for (int y : train.labels) positives += y == 1 ? 1.0 : 0.0;
  const double base_rate = positives / static_cast<double>(n);

  BoostedTreesModel model;
  model.eta = params.eta;
  model.base_score = std::log(base_rate / (1.0 - base_rate));

  std::vector<double> f(n, model.base_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  auto mean_loss = [&] {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += logistic_log_loss(f[i], train.labels[i]);
    return total / static_cast<double>(n);
  };
  if (trace != nullptr) trace->loss.push_back(mean_loss());

  std::vector<FeatureIndex> all_features(train.width);
  std::iota(all_features.begin(), all_features.end(), FeatureIndex{0});
  const auto n_cols = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(params.colsample * static_cast<double>(train.width))));
  SplitMix64 rng(params.seed);

  RegressionTreeParams tree_params;
  tree_params.max_depth = params.depth;
  tree_params.lambda = params.lambda;
  tree_params.min_child_weight = params.min_child_weight;

  for (int round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const LogisticDerivatives d = logistic_derivatives(f[i], train.labels[i]);
      grad[i] = d.grad;
      hess[i] = d.hess;
    }
    if (n_cols < train.width) {
      fisher_yates(std::span<FeatureIndex>(all_features), rng);
      tree_params.features.assign(all_features.begin(),
                                  all_features.begin() + static_cast<std::ptrdiff_t>(n_cols));
      std::sort(all_features.begin(), all_features.end());
    } else {
      tree_params.features.clear();
    }
    DecisionTree tree = grow_regression_tree(train, grad, hess, tree_params, &columns);
    for (std::size_t i = 0; i < n; ++i) f[i] += params.eta * tree.value(train.rows[i]);
    model.trees.push_back(std::move(tree));
    if (trace != nullptr) trace->loss.push_back(mean_loss());
  }
  return model;
}

}  // namespace majvote
