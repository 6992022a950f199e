#include "majvote/learners/adaboost.hpp"

#include <cmath>

#include "majvote/error.hpp"

namespace majvote {

double AdaBoostModel::score(const SparseVector& x) const {
  double s = 0.0;
  for (std::size_t m = 0; m < stumps.size(); ++m) {
    s += alphas[m] * static_cast<double>(stump_vote(stumps[m], x));
  }
  return s;
}

double adaboost_stage_weight(double weighted_error) {
  return 0.5 * std::log((1.0 - weighted_error) / weighted_error);
}

AdaBoostModel fit_adaboost(const FeatureMatrix& train, const AdaBoostParams& params,
                           std::vector<AdaBoostRound>* trace) {
  if (params.n_rounds < 1) throw ConfigError("n_rounds must be >= 1");
  const std::size_t n = train.rows.size();
  const ColumnIndex columns(train);

  RowSample sample = RowSample::uniform(n);
  for (double& w : sample.weight) w = 1.0 / static_cast<double>(n);

  TreeParams stump;
  stump.criterion = Criterion::kGini;
  stump.max_depth = 1;
  stump.min_leaf = 1;
  stump.seed = params.seed;

  AdaBoostModel model;
  std::vector<int> h(n);
  for (int round = 0; round < params.n_rounds; ++round) {
    DecisionTree tree = grow_classification_tree(train, sample, stump, &columns);
    double error = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = AdaBoostModel::stump_vote(tree, train.rows[i]);
      const int y = train.labels[i] == 1 ? 1 : -1;
      if (h[i] != y) error += sample.weight[i];
    }

    if (error >= 0.5) {
      // No weak learner better than chance remains.
      if (model.stumps.empty()) {
        model.stumps.push_back(std::move(tree));
        model.alphas.push_back(0.0);
      }
      break;
    }
    if (error <= 0.0) {
      const double alpha = adaboost_stage_weight(kAdaBoostErrorFloor);
      model.stumps.push_back(std::move(tree));
      model.alphas.push_back(alpha);
      if (trace != nullptr) trace->push_back({0.0, alpha, sample.weight});
      break;
    }

    const double alpha = adaboost_stage_weight(error);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int y = train.labels[i] == 1 ? 1 : -1;
      sample.weight[i] *= std::exp(-alpha * static_cast<double>(y * h[i]));
      total += sample.weight[i];
    }
    for (double& w : sample.weight) w /= total;

    model.stumps.push_back(std::move(tree));
    model.alphas.push_back(alpha);
    if (trace != nullptr) trace->push_back({error, alpha, sample.weight});
  }
  return model;
}

}  // namespace majvote
