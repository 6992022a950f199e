#pragma once

// Independent reference computations used by unit and acceptance tests.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "majvote/learners/linear.hpp"
#include "majvote/learners/tree.hpp"
#include "majvote/vectorize.hpp"

namespace majvote::testkit {

/// Fraction of (positive, negative) pairs ranked correctly, ties counted half.
inline double auc_pair_oracle(std::span<const int> y, std::span<const double> s) {
  double good = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      if (s[i] > s[j]) good += 1.0;
      else if (s[i] == s[j]) good += 0.5;
    }
  }
  return good / static_cast<double>(pairs);
}

/// Most frequent value by counting each candidate; -1 when 0 and 1 are tied.
inline int brute_force_mode(std::span<const int> votes) {
  std::size_t count[2] = {0, 0};
  for (int v : votes) {
    for (int c = 0; c < 2; ++c) {
      if (v == c) ++count[c];
    }
  }
  if (count[0] == count[1]) return -1;
  return count[1] > count[0] ? 1 : 0;
}

/// log P(1|x) - log P(0|x) from products of the smoothed estimates, computed
/// directly from the counts.
double naive_bayes_log_odds_oracle(const FeatureMatrix& m, const SparseVector& x, double alpha);

struct OracleSplit {
  double gain = -1.0;
  bool found = false;
};

/// Weighted impurity decrease of one candidate split; `valid` reports whether
/// both sides hold at least `min_leaf` rows.
double split_gain(const FeatureMatrix& m, const std::vector<std::uint32_t>& rows,
                  const std::vector<double>& w, Criterion c, FeatureIndex f, double threshold,
                  int min_leaf, bool* valid);

/// Best gain over every (feature, midpoint between consecutive distinct
/// values) candidate.
OracleSplit brute_force_split(const FeatureMatrix& m, const std::vector<std::uint32_t>& rows,
                              const std::vector<double>& w, Criterion c, int min_leaf);

double relative_error(double a, double b);

/// Largest relative error between example_gradient and central differences
/// of example_objective at a random point drawn from `seed`.
double linear_gradient_error(LinearLoss loss, std::uint64_t seed);

}  // namespace majvote::testkit
