#include "majvote/learners/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "majvote/error.hpp"
#include "majvote/random.hpp"

namespace majvote {

double impurity(Criterion criterion, double weight0, double weight1) {
  const double total = weight0 + weight1;
  if (total <= 0.0) return 0.0;
  const double p0 = weight0 / total;
  const double p1 = weight1 / total;
  if (criterion == Criterion::kGini) return 1.0 - p0 * p0 - p1 * p1;
  double h = 0.0;
  if (p0 > 0.0) h -= p0 * std::log2(p0);
  if (p1 > 0.0) h -= p1 * std::log2(p1);
  return h;
}

const TreeNode& DecisionTree::leaf_for(const SparseVector& x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    const double v = x.at(static_cast<FeatureIndex>(n.feature));
    i = static_cast<std::size_t>(v <= n.threshold ? n.left : n.right);
  }
  return nodes[i];
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[i].right), d + 1);
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

ColumnIndex::ColumnIndex(const FeatureMatrix& matrix) {
  offsets_.assign(matrix.width + 1, 0);
  for (const SparseVector& row : matrix.rows) {
    for (FeatureIndex f : row.indices) ++offsets_[f + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  entries_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
    const SparseVector& row = matrix.rows[r];
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      entries_[cursor[row.indices[k]]++] = {static_cast<std::uint32_t>(r), row.values[k]};
    }
  }
  for (std::size_t f = 0; f + 1 < offsets_.size(); ++f) {
    std::sort(entries_.begin() + static_cast<std::ptrdiff_t>(offsets_[f]),
              entries_.begin() + static_cast<std::ptrdiff_t>(offsets_[f + 1]),
              [](const Entry& a, const Entry& b) {
                return a.value != b.value ? a.value < b.value : a.row < b.row;
              });
  }
}

RowSample RowSample::uniform(std::size_t n_rows) {
  RowSample s;
  s.weight.assign(n_rows, 1.0);
  s.multiplicity.assign(n_rows, 1);
  return s;
}

namespace {

using Entry = ColumnIndex::Entry;

struct ClassStats {
  double w0 = 0.0;
  double w1 = 0.0;
  std::uint64_t n = 0;

  ClassStats& operator+=(const ClassStats& o) {
    w0 += o.w0;
    w1 += o.w1;
    n += o.n;
    return *this;
  }
  ClassStats operator-(const ClassStats& o) const { return {w0 - o.w0, w1 - o.w1, n - o.n}; }
};

class ClassPolicy {
 public:
  using Stats = ClassStats;

  ClassPolicy(const FeatureMatrix& m, const RowSample& sample, Criterion criterion,
              int min_leaf)
      : m_(m), sample_(sample), criterion_(criterion),
        min_leaf_(static_cast<std::uint64_t>(min_leaf)) {}

  Stats row(std::uint32_t r) const {
    const double w = sample_.weight[r];
    return m_.labels[r] == 1 ? Stats{0.0, w, sample_.multiplicity[r]}
                             : Stats{w, 0.0, sample_.multiplicity[r]};
  }
  double quality(const Stats& s) const {
    return -(s.w0 + s.w1) * impurity(criterion_, s.w0, s.w1);
  }
  bool valid_child(const Stats& s) const { return s.n >= min_leaf_; }
  bool accept(double gain) const { return gain >= -1e-12; }
  bool is_terminal(const Stats& s) const {
    return s.w0 <= 0.0 || s.w1 <= 0.0 || s.n < 2 * min_leaf_;
  }
  double normalize(double raw_gain, const Stats& node) const {
    const double w = node.w0 + node.w1;
    return w > 0.0 ? raw_gain / w : 0.0;
  }
  void fill(TreeNode& node, const Stats& s) const {
    node.weight0 = s.w0;
    node.weight1 = s.w1;
    node.n_samples = static_cast<std::uint32_t>(s.n);
    const double w = s.w0 + s.w1;
    node.value = w > 0.0 ? s.w1 / w : 0.0;
  }

 private:
  const FeatureMatrix& m_;
  const RowSample& sample_;
  Criterion criterion_;
  std::uint64_t min_leaf_;
};

struct GradStats {
  double g = 0.0;
  double h = 0.0;
  std::uint64_t n = 0;

  GradStats& operator+=(const GradStats& o) {
    g += o.g;
    h += o.h;
    n += o.n;
    return *this;
  }
  GradStats operator-(const GradStats& o) const { return {g - o.g, h - o.h, n - o.n}; }
};

class GradPolicy {
 public:
  using Stats = GradStats;

  GradPolicy(std::span<const double> grad, std::span<const double> hess, double lambda,
             double min_child_weight)
      : grad_(grad), hess_(hess), lambda_(lambda), min_child_weight_(min_child_weight) {}

  Stats row(std::uint32_t r) const { return {grad_[r], hess_[r], 1}; }
  double quality(const Stats& s) const { return 0.5 * s.g * s.g / (s.h + lambda_); }
  bool valid_child(const Stats& s) const { return s.n >= 1 && s.h >= min_child_weight_; }
  bool accept(double gain) const { return gain > 0.0; }
  bool is_terminal(const Stats& s) const { return s.n < 2; }
  double normalize(double raw_gain, const Stats&) const { return raw_gain; }
  void fill(TreeNode& node, const Stats& s) const {
    node.n_samples = static_cast<std::uint32_t>(s.n);
    node.value = -s.g / (s.h + lambda_);
  }

 private:
  std::span<const double> grad_;
  std::span<const double> hess_;
  double lambda_;
  double min_child_weight_;
};

struct Split {
  FeatureIndex feature = 0;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
  bool found = false;
};

template <class Policy>
class Grower {
 public:
  using Stats = typename Policy::Stats;

  Grower(const FeatureMatrix& m, const ColumnIndex& columns, Policy policy, int max_depth,
         std::size_t max_features, ThresholdMode mode, std::uint64_t seed,
         std::span<const FeatureIndex> universe)
      : m_(m),
        columns_(columns),
        policy_(std::move(policy)),
        max_depth_(max_depth),
        max_features_(max_features),
        mode_(mode),
        rng_(seed),
        mark_(m.rows.size(), 0),
        count_(m.width, 0),
        cand_mark_(m.width, 0) {
    if (universe.empty()) {
      all_features_ = true;
      universe_.resize(m.width);
      std::iota(universe_.begin(), universe_.end(), FeatureIndex{0});
    } else {
      universe_.assign(universe.begin(), universe.end());
      std::sort(universe_.begin(), universe_.end());
      all_features_ = universe_.size() == m.width;
    }
    perm_ = universe_;
  }

  DecisionTree grow(std::vector<std::uint32_t> rows) {
    tree_.nodes.clear();
    build(std::move(rows), 0);
    return std::move(tree_);
  }

  // Best split over `rows` ignoring depth limits; used by the split oracle.
  std::optional<SplitCandidate> best_split(std::span<const std::uint32_t> rows) {
    const Stats total = sum(rows);
    mark(rows);
    const Split s = find_split(rows, total);
    if (!s.found) return std::nullopt;
    return SplitCandidate{s.feature, s.threshold, policy_.normalize(s.gain, total)};
  }

 private:
  Stats sum(std::span<const std::uint32_t> rows) const {
    Stats total{};
    for (std::uint32_t r : rows) total += policy_.row(r);
    return total;
  }

  void mark(std::span<const std::uint32_t> rows) {
    ++epoch_;
    for (std::uint32_t r : rows) mark_[r] = epoch_;
  }

  std::int32_t build(std::vector<std::uint32_t> rows, int depth) {
    const Stats total = sum(rows);
    const auto index = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    policy_.fill(tree_.nodes.back(), total);
    if (depth >= max_depth_ || policy_.is_terminal(total)) return index;

    mark(rows);
    const Split split = find_split(rows, total);
    if (!split.found) return index;

    std::vector<std::uint32_t> left;
    std::vector<std::uint32_t> right;
    for (std::uint32_t r : rows) {
      (m_.rows[r].at(split.feature) <= split.threshold ? left : right).push_back(r);
    }
    if (left.empty() || right.empty()) return index;
    std::vector<std::uint32_t>().swap(rows);

    tree_.nodes[static_cast<std::size_t>(index)].feature =
        static_cast<std::int32_t>(split.feature);
    tree_.nodes[static_cast<std::size_t>(index)].threshold = split.threshold;
    const std::int32_t l = build(std::move(left), depth + 1);
    tree_.nodes[static_cast<std::size_t>(index)].left = l;
    const std::int32_t r = build(std::move(right), depth + 1);
    tree_.nodes[static_cast<std::size_t>(index)].right = r;
    return index;
  }

  Split find_split(std::span<const std::uint32_t> rows, const Stats& total) {
    Split best;
    const std::size_t n_universe = universe_.size();
    if (max_features_ == 0 || max_features_ >= n_universe) {
      gather(rows, universe_, all_features_);
      evaluate_gathered(total, best);
      return best;
    }
    // Draw batches of max_features without replacement until one of them
    // contains a usable split.
    std::size_t drawn = 0;
    std::vector<FeatureIndex> batch;
    while (drawn < n_universe && !best.found) {
      const std::size_t take = std::min(max_features_, n_universe - drawn);
      for (std::size_t i = drawn; i < drawn + take; ++i) {
        const std::size_t j = i + rng_.below(n_universe - i);
        std::swap(perm_[i], perm_[j]);
      }
      batch.assign(perm_.begin() + static_cast<std::ptrdiff_t>(drawn),
                   perm_.begin() + static_cast<std::ptrdiff_t>(drawn + take));
      std::sort(batch.begin(), batch.end());
      drawn += take;
      gather(rows, batch, false);
      evaluate_gathered(total, best);
    }
    return best;
  }

  // Collects, for each candidate feature with at least one non-zero among
  // `rows`, the entries sorted by (value, row).
  void gather(std::span<const std::uint32_t> rows, std::span<const FeatureIndex> candidates,
              bool all) {
    gathered_.clear();
    features_.clear();
    begins_.clear();

    std::size_t row_cost = 0;
    for (std::uint32_t r : rows) row_cost += m_.rows[r].nnz();
    std::size_t col_cost = 0;
    for (FeatureIndex f : candidates) col_cost += columns_.column(f).size();

    if (col_cost <= 3 * row_cost) {
      for (FeatureIndex f : candidates) {
        const std::size_t start = gathered_.size();
        for (const Entry& e : columns_.column(f)) {
          if (mark_[e.row] == epoch_) gathered_.push_back(e);
        }
        if (gathered_.size() > start) {
          features_.push_back(f);
          begins_.push_back(start);
        }
      }
      begins_.push_back(gathered_.size());
      return;
    }

    if (!all) {
      ++cand_epoch_;
      for (FeatureIndex f : candidates) cand_mark_[f] = cand_epoch_;
    }
    for (std::uint32_t r : rows) {
      for (FeatureIndex f : m_.rows[r].indices) {
        if (!all && cand_mark_[f] != cand_epoch_) continue;
        if (count_[f]++ == 0) features_.push_back(f);
      }
    }
    std::sort(features_.begin(), features_.end());
    std::size_t offset = 0;
    for (FeatureIndex f : features_) {
      begins_.push_back(offset);
      const std::size_t c = count_[f];
      count_[f] = static_cast<std::uint32_t>(offset);  // reuse as write cursor
      offset += c;
    }
    begins_.push_back(offset);
    gathered_.resize(offset);
    for (std::uint32_t r : rows) {
      const SparseVector& row = m_.rows[r];
      for (std::size_t k = 0; k < row.nnz(); ++k) {
        const FeatureIndex f = row.indices[k];
        if (!all && cand_mark_[f] != cand_epoch_) continue;
        gathered_[count_[f]++] = {r, row.values[k]};
      }
    }
    for (std::size_t i = 0; i < features_.size(); ++i) {
      count_[features_[i]] = 0;
      std::sort(gathered_.begin() + static_cast<std::ptrdiff_t>(begins_[i]),
                gathered_.begin() + static_cast<std::ptrdiff_t>(begins_[i + 1]),
                [](const Entry& a, const Entry& b) {
                  return a.value != b.value ? a.value < b.value : a.row < b.row;
                });
    }
  }

  void evaluate_gathered(const Stats& total, Split& best) {
    for (std::size_t i = 0; i < features_.size(); ++i) {
      const std::span<const Entry> entries(gathered_.data() + begins_[i],
                                           gathered_.data() + begins_[i + 1]);
      if (mode_ == ThresholdMode::kExhaustive) {
        evaluate_exhaustive(features_[i], entries, total, best);
      } else {
        evaluate_random(features_[i], entries, total, best);
      }
    }
  }

  void consider(FeatureIndex f, double threshold, const Stats& left, const Stats& total,
                double parent_quality, Split& best) const {
    const Stats right = total - left;
    if (!policy_.valid_child(left) || !policy_.valid_child(right)) return;
    const double gain = policy_.quality(left) + policy_.quality(right) - parent_quality;
    if (!policy_.accept(gain)) return;
    if (gain > best.gain) {
      best = {f, threshold, gain, true};
    }
  }

  void evaluate_exhaustive(FeatureIndex f, std::span<const Entry> entries, const Stats& total,
                           Split& best) const {
    Stats nonzero{};
    for (const Entry& e : entries) nonzero += policy_.row(e.row);
    const Stats zero = total - nonzero;
    bool zero_pending = zero.n > 0;
    const double parent_quality = policy_.quality(total);

    Stats left{};
    bool have_prev = false;
    double prev = 0.0;
    std::size_t i = 0;
    while (i < entries.size() || zero_pending) {
      double v;
      Stats group{};
      if (zero_pending && (i == entries.size() || entries[i].value > 0.0)) {
        v = 0.0;
        group = zero;
        zero_pending = false;
      } else {
        v = entries[i].value;
        while (i < entries.size() && entries[i].value == v) group += policy_.row(entries[i++].row);
      }
      if (have_prev) {
        double threshold = prev + (v - prev) / 2.0;
        if (threshold >= v) threshold = prev;
        consider(f, threshold, left, total, parent_quality, best);
      }
      left += group;
      prev = v;
      have_prev = true;
    }
  }

  void evaluate_random(FeatureIndex f, std::span<const Entry> entries, const Stats& total,
                       Split& best) {
    Stats nonzero{};
    for (const Entry& e : entries) nonzero += policy_.row(e.row);
    const Stats zero = total - nonzero;
    const bool has_zero = zero.n > 0;
    double lo = entries.front().value;
    double hi = entries.back().value;
    if (has_zero) {
      lo = std::min(lo, 0.0);
      hi = std::max(hi, 0.0);
    }
    if (!(lo < hi)) return;
    const double threshold = rng_.uniform(lo, hi);
    Stats left{};
    if (has_zero && 0.0 <= threshold) left = zero;
    for (const Entry& e : entries) {
      if (e.value > threshold) break;
      left += policy_.row(e.row);
    }
    consider(f, threshold, left, total, policy_.quality(total), best);
  }

  const FeatureMatrix& m_;
  const ColumnIndex& columns_;
  Policy policy_;
  int max_depth_;
  std::size_t max_features_;
  ThresholdMode mode_;
  SplitMix64 rng_;

  bool all_features_ = false;
  std::vector<FeatureIndex> universe_;
  std::vector<FeatureIndex> perm_;

  std::vector<std::uint32_t> mark_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint32_t> cand_mark_;
  std::uint32_t cand_epoch_ = 0;

  std::vector<Entry> gathered_;
  std::vector<FeatureIndex> features_;
  std::vector<std::size_t> begins_;

  DecisionTree tree_;
};

void check_binary_labels(const FeatureMatrix& m) {
  for (int y : m.labels) {
    if (y != 0 && y != 1) {
      throw DataError("training labels must be 0 or 1");
    }
  }
}

}  // namespace

DecisionTree grow_classification_tree(const FeatureMatrix& train, const RowSample& sample,
                                      const TreeParams& params, const ColumnIndex* columns) {
  if (params.max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (params.min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
  check_binary_labels(train);
  std::optional<ColumnIndex> owned;
  if (columns == nullptr) columns = &owned.emplace(train);

  std::vector<std::uint32_t> rows;
  for (std::size_t r = 0; r < train.rows.size(); ++r) {
    if (sample.multiplicity[r] > 0) rows.push_back(static_cast<std::uint32_t>(r));
  }
  Grower<ClassPolicy> grower(train, *columns,
                             ClassPolicy(train, sample, params.criterion, params.min_leaf),
                             params.max_depth, params.max_features, params.threshold_mode,
                             params.seed, {});
  return grower.grow(std::move(rows));
}

std::optional<SplitCandidate> best_classification_split(const FeatureMatrix& train,
                                                        std::span<const std::uint32_t> rows,
                                                        std::span<const double> weights,
                                                        Criterion criterion, int min_leaf) {
  check_binary_labels(train);
  RowSample sample;
  sample.weight.assign(weights.begin(), weights.end());
  sample.multiplicity.assign(train.rows.size(), 0);
  for (std::uint32_t r : rows) sample.multiplicity[r] = 1;
  const ColumnIndex columns(train);
  Grower<ClassPolicy> grower(train, columns, ClassPolicy(train, sample, criterion, min_leaf),
                             1, 0, ThresholdMode::kExhaustive, 0, {});
  return grower.best_split(rows);
}

DecisionTree grow_regression_tree(const FeatureMatrix& train, std::span<const double> grad,
                                  std::span<const double> hess,
                                  const RegressionTreeParams& params,
                                  const ColumnIndex* columns) {
  if (params.max_depth < 1) throw ConfigError("depth must be >= 1");
  std::optional<ColumnIndex> owned;
  if (columns == nullptr) columns = &owned.emplace(train);
  std::vector<std::uint32_t> rows(train.rows.size());
  std::iota(rows.begin(), rows.end(), 0u);
  Grower<GradPolicy> grower(train, *columns,
                            GradPolicy(grad, hess, params.lambda, params.min_child_weight),
                            params.max_depth, 0, ThresholdMode::kExhaustive, 0,
                            params.features);
  return grower.grow(std::move(rows));
}

}  // namespace majvote
