#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "majvote/learners/tree.hpp"

namespace majvote {

enum class ForestMode : std::uint8_t { kRandomForest = 0, kExtraTrees = 1 };

struct ForestParams {
  int n_trees = 100;
  ForestMode mode = ForestMode::kRandomForest;
  Criterion criterion = Criterion::kGini;
  int max_depth = 40;
  int min_leaf = 2;
  /// Features per node; 0 selects floor(sqrt(V)).
  std::size_t max_features = 0;
  /// Overrides the mode's default (bootstrap for random forests, full sample
  /// for extra trees).
  std::optional<bool> bootstrap;
  std::uint64_t seed = 42;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Bagged trees combined by hard majority vote.
struct ForestModel {
  std::vector<DecisionTree> trees;

  /// Share of trees voting class 1.
  double vote_fraction(const SparseVector& x) const;

  bool operator==(const ForestModel&) const = default;
};

ForestModel fit_forest(const FeatureMatrix& train, const ForestParams& params);

}  // namespace majvote
