#pragma once

// Linear classifiers trained by per-example SGD on an L2-regularized
// logistic or hinge objective.

#include <cstdint>
#include <span>
#include <vector>

#include "majvote/vectorize.hpp"

namespace majvote {

enum class LinearLoss : std::uint8_t { kLogistic = 0, kHinge = 1 };

struct LinearParams {
  LinearLoss loss = LinearLoss::kLogistic;
  double lambda = 1e-5;
  int epochs = 30;
  double eta0 = 0.1;
  std::uint64_t seed = 42;
};

struct LinearModel {
  LinearLoss loss = LinearLoss::kLogistic;
  std::vector<double> weights;
  double bias = 0.0;

  /// w.x + b
  double margin(const SparseVector& x) const { return x.dot(weights) + bias; }
  /// sigmoid(w.x + b); meaningful for the logistic loss.
  double probability(const SparseVector& x) const;

  bool operator==(const LinearModel&) const = default;
};

/// loss(m) for margin m = y (w.x + b): ln(1 + e^-m) or max(0, 1 - m).
double linear_loss(LinearLoss loss, double margin);
/// d loss / d m (the hinge subgradient at m = 1 is taken as 0).
double linear_loss_derivative(LinearLoss loss, double margin);

/// Single-example objective loss(y (w.x + b)) + lambda/2 |w|^2 with y in
/// {-1,+1}.
double example_objective(LinearLoss loss, std::span<const double> w, double b,
                         const SparseVector& x, int y, double lambda);

/// Gradient of example_objective with respect to (w, b). `grad_w` is dense
/// and sized like `w`.
void example_gradient(LinearLoss loss, std::span<const double> w, double b,
                      const SparseVector& x, int y, double lambda, std::span<double> grad_w,
                      double& grad_b);

struct LinearTrainingInfo {
  int epochs_run = 0;
  double final_loss = 0.0;  // regularized mean training objective
};

/// Minimizes (1/n) sum loss(y (w.x+b)) + lambda/2 |w|^2 with step
/// eta_t = eta0 / (1 + eta0 lambda t), one seeded shuffle per epoch.
LinearModel fit_linear_sgd(const FeatureMatrix& train, const LinearParams& params,
                           LinearTrainingInfo* info = nullptr);

}  // namespace majvote
