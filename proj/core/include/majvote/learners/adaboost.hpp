#pragma once

#include <cstdint>
#include <vector>

#include "majvote/learners/tree.hpp"

namespace majvote {

struct AdaBoostParams {
  int n_rounds = 100;
  std::uint64_t seed = 42;
};

/// Stage weight used when a stump classifies the weighted sample perfectly:
/// 1/2 ln((1 - eps) / eps) with eps = 1e-10.
inline constexpr double kAdaBoostErrorFloor = 1e-10;

/// Discrete AdaBoost over depth-1 trees; score(x) = sum_m alpha_m h_m(x) with
/// h_m in {-1, +1}.
struct AdaBoostModel {
  std::vector<DecisionTree> stumps;
  std::vector<double> alphas;

  static int stump_vote(const DecisionTree& stump, const SparseVector& x) {
    return stump.value(x) > 0.5 ? 1 : -1;
  }
  double score(const SparseVector& x) const;

  bool operator==(const AdaBoostModel&) const = default;
};

struct AdaBoostRound {
  double weighted_error = 0.0;
  double alpha = 0.0;
  /// Example weights after the update and renormalization.
  std::vector<double> weights_after;
};

/// 1/2 ln((1 - e) / e)
double adaboost_stage_weight(double weighted_error);

AdaBoostModel fit_adaboost(const FeatureMatrix& train, const AdaBoostParams& params,
                           std::vector<AdaBoostRound>* trace = nullptr);

}  // namespace majvote
