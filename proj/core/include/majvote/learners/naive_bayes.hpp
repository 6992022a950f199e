#pragma once

#include <array>
#include <vector>

#include "majvote/vectorize.hpp"

namespace majvote {

/// Multinomial naive Bayes over term counts.
///   P(c)   = n_c / n
///   P(t|c) = (count(t,c) + alpha) / (total(c) + alpha V)
struct NaiveBayesModel {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> log_likelihood;  // [class][term]
  double alpha = 1.0;

  /// log P(c) + sum_t f_t log P(t|c)
  double joint_log_likelihood(const SparseVector& x, int cls) const;
  /// log P(1|x) - log P(0|x). Zero when both classes are impossible.
  double log_odds(const SparseVector& x) const;

  bool operator==(const NaiveBayesModel&) const = default;
};

/// Rejects negative feature values with DataError.
NaiveBayesModel fit_naive_bayes(const FeatureMatrix& train, double alpha = 1.0);

}  // namespace majvote
