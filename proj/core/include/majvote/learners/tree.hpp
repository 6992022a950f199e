#pragma once

// CART-style decision trees over sparse rows. Absent entries are value 0 and
// route left whenever 0 <= threshold.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "majvote/vectorize.hpp"

namespace majvote {

enum class Criterion : std::uint8_t { kGini = 0, kEntropy = 1 };
enum class ThresholdMode : std::uint8_t { kExhaustive = 0, kRandom = 1 };

/// Gini index or entropy (bits) of a two-class weight distribution.
double impurity(Criterion criterion, double weight0, double weight1);

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double weight0 = 0.0;  // class weight reaching the node
  double weight1 = 0.0;
  std::uint32_t n_samples = 0;
  /// Leaf output: class-1 probability for classification trees, the Newton
  /// step for regression trees.
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(const SparseVector& x) const;
  double value(const SparseVector& x) const { return leaf_for(x).value; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

  bool operator==(const DecisionTree&) const = default;
};

struct TreeParams {
  Criterion criterion = Criterion::kEntropy;
  int max_depth = 60;
  int min_leaf = 2;
  /// Features examined per node; 0 means every feature.
  std::size_t max_features = 0;
  ThresholdMode threshold_mode = ThresholdMode::kExhaustive;
  std::uint64_t seed = 42;
};

/// Column-major copy of a feature matrix: per feature, the (row, value)
/// entries sorted by value then row. Shared by every tree grown on the same
/// matrix.
class ColumnIndex {
 public:
  struct Entry {
    std::uint32_t row;
    double value;
  };

  explicit ColumnIndex(const FeatureMatrix& matrix);

  std::span<const Entry> column(FeatureIndex f) const {
    return {entries_.data() + offsets_[f], entries_.data() + offsets_[f + 1]};
  }
  std::size_t width() const { return offsets_.size() - 1; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

/// Per-row sample description for tree growth. `weight[r]` drives the
/// impurity computation, `multiplicity[r]` counts towards min_leaf (bootstrap
/// duplicates). Rows with multiplicity 0 are not part of the sample.
struct RowSample {
  std::vector<double> weight;
  std::vector<std::uint32_t> multiplicity;

  static RowSample uniform(std::size_t n_rows);
};

/// Grows a classification tree. `columns` may be null, in which case one is
/// built internally.
DecisionTree grow_classification_tree(const FeatureMatrix& train, const RowSample& sample,
                                      const TreeParams& params,
                                      const ColumnIndex* columns = nullptr);

struct SplitCandidate {
  FeatureIndex feature = 0;
  double threshold = 0.0;
  /// Impurity decrease normalized by the node weight (information gain in bits
  /// for the entropy criterion).
  double gain = 0.0;
};

/// Best exhaustive split of `rows` over all features, or nullopt when no split
/// leaves min_leaf samples on both sides.
std::optional<SplitCandidate> best_classification_split(const FeatureMatrix& train,
                                                        std::span<const std::uint32_t> rows,
                                                        std::span<const double> weights,
                                                        Criterion criterion, int min_leaf);

/// Regression tree for Newton boosting: split gain
/// 1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l)], leaf value -G/(H+l).
struct RegressionTreeParams {
  int max_depth = 6;
  double lambda = 1.0;
  double min_child_weight = 1.0;
  /// Candidate features; empty means all.
  std::vector<FeatureIndex> features;
};

DecisionTree grow_regression_tree(const FeatureMatrix& train, std::span<const double> grad,
                                  std::span<const double> hess,
                                  const RegressionTreeParams& params,
                                  const ColumnIndex* columns = nullptr);

}  // namespace majvote
