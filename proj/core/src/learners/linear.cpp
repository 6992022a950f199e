#include "majvote/learners/linear.hpp"

#include <cmath>
#include <numeric>

#include "majvote/error.hpp"
#include "majvote/random.hpp"

namespace majvote {

double LinearModel::probability(const SparseVector& x) const {
  const double m = margin(x);
  return 1.0 / (1.0 + std::exp(-m));
}

double linear_loss(LinearLoss loss, double margin) {
  if (loss == LinearLoss::kHinge) return std::max(0.0, 1.0 - margin);
  // ln(1 + e^-m) without overflow for large negative margins.
  return margin > -30.0 ? std::log1p(std::exp(-margin)) : -margin;
}

double linear_loss_derivative(LinearLoss loss, double margin) {
  if (loss == LinearLoss::kHinge) return margin < 1.0 ? -1.0 : 0.0;
  return -1.0 / (1.0 + std::exp(margin));
}

double example_objective(LinearLoss loss, std::span<const double> w, double b,
                         const SparseVector& x, int y, double lambda) {
  const double m = static_cast<double>(y) * (x.dot(w) + b);
  double norm2 = 0.0;
  for (double wi : w) norm2 += wi * wi;
  return linear_loss(loss, m) + 0.5 * lambda * norm2;
}

void example_gradient(LinearLoss loss, std::span<const double> w, double b,
                      const SparseVector& x, int y, double lambda, std::span<double> grad_w,
                      double& grad_b) {
  const double m = static_cast<double>(y) * (x.dot(w) + b);
  const double d = linear_loss_derivative(loss, m) * static_cast<double>(y);
  for (std::size_t i = 0; i < w.size(); ++i) grad_w[i] = lambda * w[i];
  for (std::size_t k = 0; k < x.nnz(); ++k) grad_w[x.indices[k]] += d * x.values[k];
  grad_b = d;
}

LinearModel fit_linear_sgd(const FeatureMatrix& train, const LinearParams& params,
                           LinearTrainingInfo* info) {
  if (params.lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (params.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(params.eta0 > 0.0)) throw ConfigError("eta0 must be > 0");

  const std::size_t n = train.rows.size();
  // w = scale * v keeps the L2 shrinkage O(1) per step on sparse rows.
  std::vector<double> v(train.width, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(params.seed);
  std::uint64_t t = 0;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    fisher_yates(std::span<std::size_t>(order), rng);
    for (std::size_t i : order) {
      const SparseVector& x = train.rows[i];
      const double y = train.labels[i] == 1 ? 1.0 : -1.0;
      const double eta =
          params.eta0 / (1.0 + params.eta0 * params.lambda * static_cast<double>(t));
      ++t;
      const double m = y * (scale * x.dot(v) + bias);
      const double d = linear_loss_derivative(params.loss, m);

      const double shrink = 1.0 - eta * params.lambda;
      if (shrink > 0.0) {
        scale *= shrink;
      } else {
        std::fill(v.begin(), v.end(), 0.0);
        scale = 1.0;
      }
      if (d != 0.0) {
        const double step = -eta * d * y / scale;
        for (std::size_t k = 0; k < x.nnz(); ++k) v[x.indices[k]] += step * x.values[k];
        bias -= eta * d * y;
      }
      if (scale < 1e-9) {
        for (double& vi : v) vi *= scale;
        scale = 1.0;
      }
    }
  }

  LinearModel model;
  model.loss = params.loss;
  model.weights.resize(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) model.weights[j] = v[j] * scale;
  model.bias = bias;

  if (info != nullptr) {
    info->epochs_run = params.epochs;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = train.labels[i] == 1 ? 1.0 : -1.0;
      total += linear_loss(params.loss, y * model.margin(train.rows[i]));
    }
    double norm2 = 0.0;
    for (double w : model.weights) norm2 += w * w;
    info->final_loss = (n > 0 ? total / static_cast<double>(n) : 0.0) +
                       0.5 * params.lambda * norm2;
  }
  return model;
}

}  // namespace majvote
