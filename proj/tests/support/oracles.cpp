#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "majvote/random.hpp"

namespace majvote::testkit {

double naive_bayes_log_odds_oracle(const FeatureMatrix& m, const SparseVector& x, double alpha) {
  double posterior[2];
  for (int c = 0; c < 2; ++c) {
    double n_c = 0;
    std::vector<double> count(m.width, 0.0);
    double total = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m.labels[i] != c) continue;
      n_c += 1;
      for (std::size_t k = 0; k < m.rows[i].nnz(); ++k) {
        count[m.rows[i].indices[k]] += m.rows[i].values[k];
        total += m.rows[i].values[k];
      }
    }
    double p = n_c / static_cast<double>(m.size());
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      const double pt = (count[x.indices[k]] + alpha) / (total + alpha * static_cast<double>(m.width));
      p *= std::pow(pt, x.values[k]);
    }
    posterior[c] = p;
  }
  return std::log(posterior[1]) - std::log(posterior[0]);
}

double split_gain(const FeatureMatrix& m, const std::vector<std::uint32_t>& rows,
                  const std::vector<double>& w, Criterion c, FeatureIndex f, double threshold,
                  int min_leaf, bool* valid) {
  double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
  int nl = 0, nr = 0;
  for (std::uint32_t r : rows) {
    const bool left = m.rows[r].at(f) <= threshold;
    const bool pos = m.labels[r] == 1;
    if (left) {
      (pos ? l1 : l0) += w[r];
      ++nl;
    } else {
      (pos ? r1 : r0) += w[r];
      ++nr;
    }
  }
  *valid = nl >= min_leaf && nr >= min_leaf;
  const double total = l0 + l1 + r0 + r1;
  return impurity(c, l0 + r0, l1 + r1) - (l0 + l1) / total * impurity(c, l0, l1) -
         (r0 + r1) / total * impurity(c, r0, r1);
}

OracleSplit brute_force_split(const FeatureMatrix& m, const std::vector<std::uint32_t>& rows,
                              const std::vector<double>& w, Criterion c, int min_leaf) {
  OracleSplit best;
  for (FeatureIndex f = 0; f < m.width; ++f) {
    std::set<double> values;
    for (std::uint32_t r : rows) values.insert(m.rows[r].at(f));
    for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
      const double t = (*it + *std::next(it)) / 2.0;
      bool valid = false;
      const double g = split_gain(m, rows, w, c, f, t, min_leaf, &valid);
      if (valid && g > best.gain) {
        best.gain = g;
        best.found = true;
      }
    }
  }
  return best;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double linear_gradient_error(LinearLoss loss, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const std::size_t width = 6;
  std::vector<double> w(width);
  for (double& v : w) v = rng.uniform(-1.0, 1.0);
  double b = rng.uniform(-1.0, 1.0);
  std::vector<std::pair<FeatureIndex, double>> pairs;
  for (std::size_t f = 0; f < width; ++f) {
    if (rng.uniform() < 0.6) pairs.emplace_back(static_cast<FeatureIndex>(f), rng.uniform(-2.0, 2.0));
  }
  const SparseVector x = SparseVector::from_pairs(pairs);
  const int y = rng.below(2) ? 1 : -1;
  const double lambda = 0.01 + rng.uniform();
  if (loss == LinearLoss::kHinge) {
    // Stay away from the kink at margin 1.
    const double m = y * (x.dot(w) + b);
    if (std::abs(m - 1.0) < 1e-3) b += 0.1;
  }
  std::vector<double> gw(width);
  double gb = 0.0;
  example_gradient(loss, w, b, x, y, lambda, gw, gb);
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t f = 0; f < width; ++f) {
    std::vector<double> wp = w;
    std::vector<double> wm = w;
    wp[f] += h;
    wm[f] -= h;
    const double fd = (example_objective(loss, wp, b, x, y, lambda) -
                       example_objective(loss, wm, b, x, y, lambda)) / (2 * h);
    worst = std::max(worst, relative_error(gw[f], fd));
  }
  const double fd_b = (example_objective(loss, w, b + h, x, y, lambda) -
                       example_objective(loss, w, b - h, x, y, lambda)) / (2 * h);
  return std::max(worst, relative_error(gb, fd_b));
}

}  // namespace majvote::testkit
