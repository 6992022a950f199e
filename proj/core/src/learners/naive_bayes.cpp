#include "majvote/learners/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "majvote/error.hpp"

namespace majvote {

double NaiveBayesModel::joint_log_likelihood(const SparseVector& x, int cls) const {
  const auto& ll = log_likelihood[static_cast<std::size_t>(cls)];
  std::vector<double> terms(x.nnz());
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const double term = ll[x.indices[k]];
    if (std::isinf(term)) return -std::numeric_limits<double>::infinity();
    terms[k] = x.values[k] * term;
  }
  std::sort(terms.begin(), terms.end());
  double sum = log_prior[static_cast<std::size_t>(cls)];
  for (double t : terms) sum += t;
  return sum;
}

double NaiveBayesModel::log_odds(const SparseVector& x) const {
  const double l1 = joint_log_likelihood(x, 1);
  const double l0 = joint_log_likelihood(x, 0);
  if (std::isinf(l1) && std::isinf(l0)) return 0.0;
  return l1 - l0;
}

NaiveBayesModel fit_naive_bayes(const FeatureMatrix& train, double alpha) {
  if (alpha < 0.0) throw ConfigError("naive_bayes alpha must be >= 0");
  const std::size_t v = train.width;
  std::array<std::vector<double>, 2> counts{std::vector<double>(v, 0.0),
                                            std::vector<double>(v, 0.0)};
  std::array<double, 2> totals{0.0, 0.0};
  std::array<double, 2> n_class{0.0, 0.0};
  for (std::size_t i = 0; i < train.rows.size(); ++i) {
    const int y = train.labels[i];
    if (y != 0 && y != 1) throw DataError("training labels must be 0 or 1");
    const SparseVector& row = train.rows[i];
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      if (row.values[k] < 0.0) {
        throw DataError("naive Bayes requires non-negative feature values (row " +
                        std::to_string(i) + ")");
      }
      counts[static_cast<std::size_t>(y)][row.indices[k]] += row.values[k];
      totals[static_cast<std::size_t>(y)] += row.values[k];
    }
    n_class[static_cast<std::size_t>(y)] += 1.0;
  }

  NaiveBayesModel model;
  model.alpha = alpha;
  const double n = n_class[0] + n_class[1];
  for (std::size_t c = 0; c < 2; ++c) {
    model.log_prior[c] = std::log(n_class[c] / n);
    const double denom = totals[c] + alpha * static_cast<double>(v);
    auto& ll = model.log_likelihood[c];
    ll.resize(v);
    for (std::size_t t = 0; t < v; ++t) {
      // log(0) = -inf marks a term impossible under this class (alpha = 0).
      ll[t] = denom > 0.0 ? std::log((counts[c][t] + alpha) / denom)
                          : -std::numeric_limits<double>::infinity();
    }
  }
  return model;
}

}  // namespace majvote
