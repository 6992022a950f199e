#pragma once

// Uniform train / predict / score contract over the nine classifier families.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "majvote/learners/adaboost.hpp"
#include "majvote/learners/forest.hpp"
#include "majvote/learners/gradient_boost.hpp"
#include "majvote/learners/linear.hpp"
#include "majvote/learners/naive_bayes.hpp"
#include "majvote/learners/tree.hpp"
#include "majvote/vectorize.hpp"

namespace majvote {

enum class Family : std::uint8_t {
  kDecisionTree = 0,
  kLogisticRegression = 1,
  kGradientBoost = 2,
  kRandomForest = 3,
  kExtraTrees = 4,
  kAdaBoost = 5,
  kLinearSvm = 6,
  kSgdLinear = 7,
  kNaiveBayes = 8,
};

/// Families in reporting order.
inline constexpr std::array<Family, 9> kAllFamilies = {
    Family::kDecisionTree, Family::kLogisticRegression, Family::kGradientBoost,
    Family::kRandomForest, Family::kAdaBoost,           Family::kLinearSvm,
    Family::kExtraTrees,   Family::kSgdLinear,          Family::kNaiveBayes,
};

/// Config key, e.g. "random_forest".
std::string_view to_string(Family family);
/// Short report label, e.g. "RF".
std::string_view display_name(Family family);
/// Throws ConfigError for unknown names.
Family parse_family(std::string_view name);

/// Decision threshold on score(): predict(x) = score(x) > threshold.
/// 0 for margin / log-odds families, 0.5 for probability / vote-fraction
/// families.
double decision_threshold(Family family);

/// Feature kind a family consumes by default (counts for naive Bayes, TF-IDF
/// for everything else).
FeatureKind default_feature_kind(Family family);

using Hyperparameters = std::map<std::string, std::string>;

struct LearnerSpec {
  Family family = Family::kDecisionTree;
  Hyperparameters hyperparameters;
  std::uint64_t seed = 42;
};

/// Hyperparameter keys accepted for a family, with their default values.
const Hyperparameters& default_hyperparameters(Family family);

/// Throws ConfigError on unknown keys or out-of-range values.
void validate(const LearnerSpec& spec);

struct TrainingInfo {
  std::size_t rounds_run = 0;  // epochs, trees or boosting rounds
  double final_loss = 0.0;     // family-specific training objective (0 if none)

  bool operator==(const TrainingInfo&) const = default;
};

using FittedModel = std::variant<DecisionTree, LinearModel, BoostedTreesModel, ForestModel,
                                 AdaBoostModel, NaiveBayesModel>;

struct TrainedLearner {
  Family family = Family::kDecisionTree;
  std::size_t feature_width = 0;
  TrainingInfo info;
  FittedModel model;

  bool operator==(const TrainedLearner&) const = default;
};

/// Validates the spec, checks the training set (non-empty, both classes,
/// consistent widths) and dispatches to the family's fitter.
TrainedLearner fit(const LearnerSpec& spec, const FeatureMatrix& train);

/// Larger means more likely class 1. Throws DataError on a width mismatch.
double score(const TrainedLearner& model, const SparseVector& x);
int predict(const TrainedLearner& model, const SparseVector& x);

/// Class-1 probability for the logistic-regression family.
double probability(const TrainedLearner& model, const SparseVector& x);

}  // namespace majvote
