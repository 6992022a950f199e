#pragma once

// Confusion matrices, accuracy / precision / recall / F1, ROC curves and the
// comparative report across all models.

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "majvote/ensemble.hpp"

namespace majvote {

/// Class 1 (fake) is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::array<ClassMetrics, 2> per_class;  // index = class label
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
};

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (FPR, TPR), from (0,0) to (1,1)
  std::vector<double> thresholds;                 // score cut per point; +inf first
  double auc = 0.0;
};

/// Throws DataError on length mismatch, empty input or labels outside {0,1}.
ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred);

/// Zero denominators yield 0. Throws DataError on an empty matrix.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Threshold sweep over distinct scores (descending); tied scores move
/// together. AUC by the trapezoidal rule. Throws DataError unless both
/// classes occur.
RocCurve roc_curve(std::span<const int> y_true, std::span<const double> scores);

struct ModelEvaluation {
  std::string name;
  ConfusionMatrix confusion;
  MetricsReport metrics;
  RocCurve roc;
  std::size_t ties_broken = 0;  // ensemble row only
};

struct EvaluationTable {
  std::vector<ModelEvaluation> rows;  // members in order, then the ensemble
  std::size_t n_examples = 0;
};

inline constexpr std::string_view kEnsembleRowName = "MajorityVote";

/// One row per model in `models` plus one for `ensemble` (scored by vote
/// fraction).
EvaluationTable evaluate_all(std::span<const EnsembleMember> models, const Ensemble& ensemble,
                             std::span<const DocumentFeatures> test,
                             std::span<const int> labels);

/// Plain-text table: Classifier, Accuracy (%), Precision (%), Recall (%),
/// F1-score (%), two decimals, macro averages.
std::string format_table(const EvaluationTable& table);

/// Machine-readable report (JSON); the schema is documented in
/// docs/report_format.md.
std::string format_json_report(const EvaluationTable& table);

/// Writes report.json, report.txt and, when `roc_files` is set, one
/// roc_<name>.tsv per model into `dir` (created if needed).
void write_reports(const EvaluationTable& table, const std::filesystem::path& dir,
                   bool roc_files);

}  // namespace majvote
