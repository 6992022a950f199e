#pragma once

#include <cstdint>
#include <vector>

#include "majvote/learners/tree.hpp"

namespace majvote {

struct GradientBoostParams {
  int n_rounds = 150;
  int depth = 6;
  double eta = 0.3;
  double lambda = 1.0;
  /// Fraction of features offered to each round's tree.
  double colsample = 0.8;
  double min_child_weight = 1.0;
  std::uint64_t seed = 42;
};

/// Newton-boosted regression trees on the logistic loss.
struct BoostedTreesModel {
  double base_score = 0.0;  // log-odds of the training base rate
  double eta = 0.3;
  std::vector<DecisionTree> trees;

  /// F(x) = base_score + sum_m eta * tree_m(x)
  double raw_score(const SparseVector& x) const;

  bool operator==(const BoostedTreesModel&) const = default;
};

struct LogisticDerivatives {
  double grad;
  double hess;
};

/// g = sigmoid(F) - y, h = sigmoid(F) (1 - sigmoid(F)) for y in {0,1}.
LogisticDerivatives logistic_derivatives(double raw_score, int y);
/// -[y ln sigmoid(F) + (1 - y) ln(1 - sigmoid(F))]
double logistic_log_loss(double raw_score, int y);

struct BoostingTrace {
  /// Mean training log-loss; entry 0 is the initial model, entry m is after
  /// round m.
  std::vector<double> loss;
};

BoostedTreesModel fit_gradient_boost(const FeatureMatrix& train,
                                     const GradientBoostParams& params,
                                     BoostingTrace* trace = nullptr);

}  // namespace majvote
