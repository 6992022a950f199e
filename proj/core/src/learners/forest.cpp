#include "majvote/learners/forest.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "majvote/error.hpp"
#include "majvote/random.hpp"

namespace majvote {

double ForestModel::vote_fraction(const SparseVector& x) const {
  if (trees.empty()) return 0.0;
  std::size_t ones = 0;
  for (const DecisionTree& t : trees) {
    if (t.value(x) > 0.5) ++ones;
  }
  return static_cast<double>(ones) / static_cast<double>(trees.size());
}

namespace {

DecisionTree fit_one_tree(const FeatureMatrix& train, const ColumnIndex& columns,
                          const ForestParams& params, bool bootstrap, std::size_t max_features,
                          std::size_t tree_index) {
  const std::uint64_t tree_seed = derive_seed(params.seed, tree_index);
  const std::size_t n = train.rows.size();
  RowSample sample;
  if (bootstrap) {
    sample.weight.assign(n, 0.0);
    sample.multiplicity.assign(n, 0);
    SplitMix64 rng(tree_seed);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = rng.below(n);
      sample.weight[r] += 1.0;
      ++sample.multiplicity[r];
    }
  } else {
    sample = RowSample::uniform(n);
  }
  TreeParams tp;
  tp.criterion = params.criterion;
  tp.max_depth = params.max_depth;
  tp.min_leaf = params.min_leaf;
  tp.max_features = max_features;
  tp.threshold_mode = params.mode == ForestMode::kExtraTrees ? ThresholdMode::kRandom
                                                             : ThresholdMode::kExhaustive;
  tp.seed = derive_seed(tree_seed, 1);
  return grow_classification_tree(train, sample, tp, &columns);
}

}  // namespace

ForestModel fit_forest(const FeatureMatrix& train, const ForestParams& params) {
  if (params.n_trees < 1) throw ConfigError("n_trees must be >= 1");
  const bool bootstrap = params.bootstrap.value_or(params.mode == ForestMode::kRandomForest);
  const std::size_t max_features =
      params.max_features != 0
          ? params.max_features
          : std::max<std::size_t>(
                1, static_cast<std::size_t>(std::sqrt(static_cast<double>(train.width))));
  const ColumnIndex columns(train);

  ForestModel model;
  model.trees.resize(static_cast<std::size_t>(params.n_trees));
  unsigned threads = params.threads != 0 ? params.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(params.n_trees)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= model.trees.size()) return;
      try {
        model.trees[t] = fit_one_tree(train, columns, params, bootstrap, max_features, t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return model;
}

}  // namespace majvote
