#include "majvote/learners.hpp"

#include <charconv>
#include <cmath>

#include "majvote/error.hpp"

namespace majvote {
namespace {

struct FamilyInfo {
  Family family;
  std::string_view name;
  std::string_view display;
};

constexpr std::array<FamilyInfo, 9> kFamilyInfo = {{
    {Family::kDecisionTree, "decision_tree", "DT"},
    {Family::kLogisticRegression, "logistic_regression", "LR"},
    {Family::kGradientBoost, "gradient_boost", "XGBoost"},
    {Family::kRandomForest, "random_forest", "RF"},
    {Family::kExtraTrees, "extra_trees", "ET"},
    {Family::kAdaBoost, "adaboost", "AdaBoost"},
    {Family::kLinearSvm, "linear_svm", "SVM"},
    {Family::kSgdLinear, "sgd_linear", "SGD"},
    {Family::kNaiveBayes, "naive_bayes", "NB"},
}};

const FamilyInfo& info_of(Family family) {
  return kFamilyInfo[static_cast<std::size_t>(family)];
}

// Typed access to a hyperparameter map already merged with defaults.
class ParamReader {
 public:
  ParamReader(const LearnerSpec& spec) : family_(to_string(spec.family)) {
    values_ = default_hyperparameters(spec.family);
    for (const auto& [key, value] : spec.hyperparameters) {
      if (!values_.contains(key)) {
        throw ConfigError("unknown hyperparameter '" + key + "' for " + std::string(family_));
      }
      values_[key] = value;
    }
  }

  const std::string& raw(const std::string& key) const { return values_.at(key); }

  double real(const std::string& key, double lo, double hi, bool lo_open = false) const {
    const std::string& text = raw(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
      fail(key, "'" + text + "' is not a number");
    }
    if (v < lo || v > hi || (lo_open && v == lo)) {
      fail(key, "value " + text + " out of range");
    }
    return v;
  }

  int integer(const std::string& key, int lo, int hi) const {
    const std::string& text = raw(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      fail(key, "'" + text + "' is not an integer");
    }
    if (v < lo || v > hi) fail(key, "value " + text + " out of range");
    return v;
  }

  bool boolean(const std::string& key) const {
    const std::string& text = raw(key);
    if (text == "true" || text == "1" || text == "on") return true;
    if (text == "false" || text == "0" || text == "off") return false;
    fail(key, "'" + text + "' is not a boolean");
  }

  Criterion criterion() const {
    const std::string& text = raw("criterion");
    if (text == "gini") return Criterion::kGini;
    if (text == "entropy") return Criterion::kEntropy;
    fail("criterion", "expected gini or entropy");
  }

  LinearLoss loss() const {
    const std::string& text = raw("loss");
    if (text == "logistic") return LinearLoss::kLogistic;
    if (text == "hinge") return LinearLoss::kHinge;
    fail("loss", "expected logistic or hinge");
  }

  // "all", "sqrt", an integer count, or a fraction in (0,1).
  std::size_t max_features(std::size_t width, std::size_t sqrt_default_marker) const {
    const std::string& text = raw("max_features");
    if (text == "all") return 0;
    if (text == "sqrt") return sqrt_default_marker;
    if (text.find('.') != std::string::npos) {
      const double frac = real("max_features", 0.0, 1.0, true);
      return std::max<std::size_t>(
          1, static_cast<std::size_t>(frac * static_cast<double>(width)));
    }
    return static_cast<std::size_t>(integer("max_features", 1, 1 << 30));
  }

  ThresholdMode threshold_mode() const {
    const std::string& text = raw("threshold_mode");
    if (text == "exhaustive") return ThresholdMode::kExhaustive;
    if (text == "random") return ThresholdMode::kRandom;
    fail("threshold_mode", "expected exhaustive or random");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(std::string(family_) + "." + key + ": " + what);
  }

 private:
  std::string_view family_;
  Hyperparameters values_;
};

constexpr int kIntMax = 1 << 30;

TreeParams tree_params(const ParamReader& p, std::size_t width, std::uint64_t seed) {
  TreeParams t;
  t.criterion = p.criterion();
  t.max_depth = p.integer("max_depth", 1, kIntMax);
  t.min_leaf = p.integer("min_leaf", 1, kIntMax);
  const auto sqrt_v = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::sqrt(static_cast<double>(width))));
  t.max_features = p.max_features(width, sqrt_v);
  t.threshold_mode = p.threshold_mode();
  t.seed = seed;
  return t;
}

LinearParams linear_params(const ParamReader& p, std::uint64_t seed) {
  LinearParams l;
  l.loss = p.loss();
  l.lambda = p.real("lambda", 0.0, 1e6);
  l.epochs = p.integer("epochs", 1, kIntMax);
  l.eta0 = p.real("eta0", 0.0, 1e6, true);
  l.seed = seed;
  return l;
}

ForestParams forest_params(const ParamReader& p, Family family, std::size_t width,
                           std::uint64_t seed) {
  ForestParams f;
  f.mode = family == Family::kExtraTrees ? ForestMode::kExtraTrees : ForestMode::kRandomForest;
  f.n_trees = p.integer("n_trees", 1, kIntMax);
  f.criterion = p.criterion();
  f.max_depth = p.integer("max_depth", 1, kIntMax);
  f.min_leaf = p.integer("min_leaf", 1, kIntMax);
  f.max_features = p.max_features(width, 0);
  f.bootstrap = p.boolean("bootstrap");
  f.threads = static_cast<unsigned>(p.integer("threads", 0, 1024));
  f.seed = seed;
  return f;
}

GradientBoostParams boost_params(const ParamReader& p, std::uint64_t seed) {
  GradientBoostParams g;
  g.n_rounds = p.integer("n_rounds", 1, kIntMax);
  g.depth = p.integer("depth", 1, 64);
  g.eta = p.real("eta", 0.0, 1.0, true);
  g.lambda = p.real("lambda", 0.0, 1e9);
  g.colsample = p.real("colsample", 0.0, 1.0, true);
  g.min_child_weight = p.real("min_child_weight", 0.0, 1e9);
  g.seed = seed;
  return g;
}

void check_training_set(const FeatureMatrix& train) {
  if (train.rows.empty()) throw DataError("training set is empty");
  train.check();
  bool seen[2] = {false, false};
  for (int y : train.labels) {
    if (y != 0 && y != 1) throw DataError("training labels must be 0 or 1");
    seen[y] = true;
  }
  if (!seen[0] || !seen[1]) {
    throw DataError("training set contains a single class; both 0 and 1 are required");
  }
}

void check_width(const TrainedLearner& model, const SparseVector& x) {
  if (!x.indices.empty() && x.indices.back() >= model.feature_width) {
    throw DataError("input feature index " + std::to_string(x.indices.back()) +
                    " exceeds the model width " + std::to_string(model.feature_width));
  }
}

}  // namespace

std::string_view to_string(Family family) { return info_of(family).name; }

std::string_view display_name(Family family) { return info_of(family).display; }

Family parse_family(std::string_view name) {
  for (const FamilyInfo& info : kFamilyInfo) {
    if (info.name == name) return info.family;
  }
  throw ConfigError("unknown learner family '" + std::string(name) + "'");
}

double decision_threshold(Family family) {
  switch (family) {
    case Family::kDecisionTree:
    case Family::kRandomForest:
    case Family::kExtraTrees:
      return 0.5;
    default:
      return 0.0;
  }
}

FeatureKind default_feature_kind(Family family) {
  return family == Family::kNaiveBayes ? FeatureKind::kCount : FeatureKind::kTfidf;
}

const Hyperparameters& default_hyperparameters(Family family) {
  static const std::array<Hyperparameters, 9> defaults = {{
      // decision_tree
      {{"criterion", "entropy"},
       {"max_depth", "60"},
       {"min_leaf", "2"},
       {"max_features", "all"},
       {"threshold_mode", "exhaustive"}},
      // logistic_regression
      {{"loss", "logistic"}, {"lambda", "1e-5"}, {"epochs", "30"}, {"eta0", "0.1"}},
      // gradient_boost
      {{"n_rounds", "150"},
       {"depth", "6"},
       {"eta", "0.3"},
       {"lambda", "1.0"},
       {"colsample", "0.8"},
       {"min_child_weight", "1.0"}},
      // random_forest
      {{"n_trees", "100"},
       {"criterion", "gini"},
       {"max_depth", "40"},
       {"min_leaf", "2"},
       {"max_features", "sqrt"},
       {"bootstrap", "true"},
       {"threads", "0"}},
      // extra_trees
      {{"n_trees", "100"},
       {"criterion", "gini"},
       {"max_depth", "40"},
       {"min_leaf", "2"},
       {"max_features", "sqrt"},
       {"bootstrap", "false"},
       {"threads", "0"}},
      // adaboost
      {{"n_rounds", "100"}},
      // linear_svm
      {{"loss", "hinge"}, {"lambda", "1e-4"}, {"epochs", "30"}, {"eta0", "0.1"}},
      // sgd_linear
      {{"loss", "hinge"}, {"lambda", "1e-4"}, {"epochs", "10"}, {"eta0", "0.05"}},
      // naive_bayes
      {{"alpha", "1"}},
  }};
  return defaults[static_cast<std::size_t>(family)];
}

void validate(const LearnerSpec& spec) {
  const ParamReader p(spec);
  switch (spec.family) {
    case Family::kDecisionTree:
      tree_params(p, 1, spec.seed);
      break;
    case Family::kLogisticRegression:
    case Family::kLinearSvm:
    case Family::kSgdLinear:
      linear_params(p, spec.seed);
      break;
    case Family::kGradientBoost:
      boost_params(p, spec.seed);
      break;
    case Family::kRandomForest:
    case Family::kExtraTrees:
      forest_params(p, spec.family, 1, spec.seed);
      break;
    case Family::kAdaBoost:
      p.integer("n_rounds", 1, kIntMax);
      break;
    case Family::kNaiveBayes:
      p.real("alpha", 0.0, 1e9);
      break;
  }
}

TrainedLearner fit(const LearnerSpec& spec, const FeatureMatrix& train) {
  validate(spec);
  check_training_set(train);
  const ParamReader p(spec);

  TrainedLearner out;
  out.family = spec.family;
  out.feature_width = train.width;
  switch (spec.family) {
    case Family::kDecisionTree: {
      const TreeParams params = tree_params(p, train.width, spec.seed);
      DecisionTree tree =
          grow_classification_tree(train, RowSample::uniform(train.rows.size()), params);
      out.info.rounds_run = 1;
      out.model = std::move(tree);
      break;
    }
    case Family::kLogisticRegression:
    case Family::kLinearSvm:
    case Family::kSgdLinear: {
      LinearTrainingInfo info;
      out.model = fit_linear_sgd(train, linear_params(p, spec.seed), &info);
      out.info.rounds_run = static_cast<std::size_t>(info.epochs_run);
      out.info.final_loss = info.final_loss;
      break;
    }
    case Family::kGradientBoost: {
      BoostingTrace trace;
      BoostedTreesModel model = fit_gradient_boost(train, boost_params(p, spec.seed), &trace);
      out.info.rounds_run = model.trees.size();
      out.info.final_loss = trace.loss.back();
      out.model = std::move(model);
      break;
    }
    case Family::kRandomForest:
    case Family::kExtraTrees: {
      ForestModel model = fit_forest(train, forest_params(p, spec.family, train.width, spec.seed));
      out.info.rounds_run = model.trees.size();
      out.model = std::move(model);
      break;
    }
    case Family::kAdaBoost: {
      AdaBoostParams params;
      params.n_rounds = p.integer("n_rounds", 1, kIntMax);
      params.seed = spec.seed;
      AdaBoostModel model = fit_adaboost(train, params);
      out.info.rounds_run = model.stumps.size();
      out.model = std::move(model);
      break;
    }
    case Family::kNaiveBayes: {
      out.model = fit_naive_bayes(train, p.real("alpha", 0.0, 1e9));
      out.info.rounds_run = 1;
      break;
    }
  }
  return out;
}

double score(const TrainedLearner& model, const SparseVector& x) {
  check_width(model, x);
  return std::visit(
      [&x](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DecisionTree>) {
          return m.value(x);
        } else if constexpr (std::is_same_v<M, LinearModel>) {
          return m.margin(x);
        } else if constexpr (std::is_same_v<M, BoostedTreesModel>) {
          return m.raw_score(x);
        } else if constexpr (std::is_same_v<M, ForestModel>) {
          return m.vote_fraction(x);
        } else if constexpr (std::is_same_v<M, AdaBoostModel>) {
          return m.score(x);
        } else {
          return m.log_odds(x);
        }
      },
      model.model);
}

int predict(const TrainedLearner& model, const SparseVector& x) {
  return score(model, x) > decision_threshold(model.family) ? 1 : 0;
}

double probability(const TrainedLearner& model, const SparseVector& x) {
  check_width(model, x);
  const auto* linear = std::get_if<LinearModel>(&model.model);
  if (linear == nullptr || linear->loss != LinearLoss::kLogistic) {
    throw ConfigError("probability() is only defined for logistic models");
  }
  return linear->probability(x);
}

}  // namespace majvote
