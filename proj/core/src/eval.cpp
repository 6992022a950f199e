#include "majvote/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "majvote/error.hpp"
#include "majvote/file_util.hpp"

namespace majvote {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

void check_labels(std::span<const int> y) {
  for (int v : y) {
    if (v != 0 && v != 1) throw DataError("labels must be 0 or 1");
  }
}

// Rounded to 4 decimals for serialization.
double r4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw DataError("confusion: label and prediction lengths differ");
  }
  if (y_true.empty()) throw DataError("confusion: empty input");
  check_labels(y_true);
  check_labels(y_pred);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1) {
      (y_pred[i] == 1 ? cm.tp : cm.fn)++;
    } else {
      (y_pred[i] == 1 ? cm.fp : cm.tn)++;
    }
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw DataError("metrics: empty confusion matrix");
  MetricsReport r;
  r.accuracy = ratio(cm.tp + cm.tn, total);

  ClassMetrics& pos = r.per_class[1];
  pos.precision = ratio(cm.tp, cm.tp + cm.fp);
  pos.recall = ratio(cm.tp, cm.tp + cm.fn);
  pos.f1 = harmonic(pos.precision, pos.recall);
  pos.support = cm.tp + cm.fn;

  // Class 0 seen as the positive class: tn plays tp, fn plays fp.
  ClassMetrics& neg = r.per_class[0];
  neg.precision = ratio(cm.tn, cm.tn + cm.fn);
  neg.recall = ratio(cm.tn, cm.tn + cm.fp);
  neg.f1 = harmonic(neg.precision, neg.recall);
  neg.support = cm.tn + cm.fp;

  r.macro_precision = (pos.precision + neg.precision) / 2.0;
  r.macro_recall = (pos.recall + neg.recall) / 2.0;
  r.macro_f1 = (pos.f1 + neg.f1) / 2.0;

  const double w1 = ratio(pos.support, total);
  const double w0 = ratio(neg.support, total);
  r.weighted_precision = w0 * neg.precision + w1 * pos.precision;
  r.weighted_recall = w0 * neg.recall + w1 * pos.recall;
  r.weighted_f1 = w0 * neg.f1 + w1 * pos.f1;
  return r;
}

RocCurve roc_curve(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) {
    throw DataError("roc_curve: label and score lengths differ");
  }
  check_labels(y_true);
  const auto positives = static_cast<std::size_t>(std::count(y_true.begin(), y_true.end(), 1));
  const std::size_t negatives = y_true.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw DataError("roc_curve: both classes are required (AUC undefined)");
  }
  std::vector<std::size_t> order(y_true.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.emplace_back(0.0, 0.0);
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (y_true[order[i]] == 1 ? tp : fp)++;
      ++i;
    }
    roc.points.emplace_back(ratio(fp, negatives), ratio(tp, positives));
    roc.thresholds.push_back(s);
  }
  for (std::size_t k = 1; k < roc.points.size(); ++k) {
    const auto [x0, y0] = roc.points[k - 1];
    const auto [x1, y1] = roc.points[k];
    roc.auc += (x1 - x0) * (y0 + y1) / 2.0;
  }
  return roc;
}

EvaluationTable evaluate_all(std::span<const EnsembleMember> models, const Ensemble& ensemble,
                             std::span<const DocumentFeatures> test,
                             std::span<const int> labels) {
  if (test.size() != labels.size()) {
    throw DataError("evaluate_all: feature and label counts differ");
  }
  ensemble.check();
  const std::size_t n = test.size();
  EvaluationTable table;
  table.n_examples = n;

  std::vector<int> pred(n);
  std::vector<double> s(n);
  for (const EnsembleMember& m : models) {
    if (m.learner->feature_width != ensemble.feature_width()) {
      throw DataError("model '" + m.name + "' does not match the test feature width");
    }
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = score(*m.learner, test[i].get(m.kind));
      pred[i] = s[i] > decision_threshold(m.learner->family) ? 1 : 0;
    }
    ModelEvaluation row;
    row.name = m.name;
    row.confusion = confusion(labels, pred);
    row.metrics = metrics(row.confusion);
    row.roc = roc_curve(labels, s);
    table.rows.push_back(std::move(row));
  }

  ModelEvaluation row;
  row.name = std::string(kEnsembleRowName);
  for (std::size_t i = 0; i < n; ++i) {
    const VotedPrediction vp = ensemble_predict(ensemble, test[i]);
    pred[i] = vp.label;
    s[i] = vp.vote_fraction;
    row.ties_broken += vp.tie_broken ? 1 : 0;
  }
  row.confusion = confusion(labels, pred);
  row.metrics = metrics(row.confusion);
  row.roc = roc_curve(labels, s);
  table.rows.push_back(std::move(row));
  return table;
}

std::string format_table(const EvaluationTable& table) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "Classifier" << std::right << std::setw(14)
      << "Accuracy (%)" << std::setw(15) << "Precision (%)" << std::setw(12) << "Recall (%)"
      << std::setw(14) << "F1-score (%)" << std::setw(8) << "AUC" << '\n';
  out << std::fixed << std::setprecision(2);
  for (const ModelEvaluation& row : table.rows) {
    out << std::left << std::setw(16) << row.name << std::right << std::setw(14)
        << row.metrics.accuracy * 100.0 << std::setw(15) << row.metrics.macro_precision * 100.0
        << std::setw(12) << row.metrics.macro_recall * 100.0 << std::setw(14)
        << row.metrics.macro_f1 * 100.0 << std::setw(8) << row.roc.auc << '\n';
  }
  return out.str();
}

std::string format_json_report(const EvaluationTable& table) {
  using nlohmann::json;
  json models = json::array();
  for (const ModelEvaluation& row : table.rows) {
    const MetricsReport& m = row.metrics;
    json per_class = json::object();
    for (int c = 0; c < 2; ++c) {
      const ClassMetrics& cm = m.per_class[static_cast<std::size_t>(c)];
      per_class[std::to_string(c)] = {{"precision", r4(cm.precision)},
                                      {"recall", r4(cm.recall)},
                                      {"f1", r4(cm.f1)},
                                      {"support", cm.support}};
    }
    json points = json::array();
    for (std::size_t k = 0; k < row.roc.points.size(); ++k) {
      const double t = row.roc.thresholds[k];
      points.push_back({{"fpr", row.roc.points[k].first},
                        {"tpr", row.roc.points[k].second},
                        {"threshold", std::isinf(t) ? json("inf") : json(t)}});
    }
    models.push_back({
        {"name", row.name},
        {"confusion", {{"tp", row.confusion.tp},
                       {"tn", row.confusion.tn},
                       {"fp", row.confusion.fp},
                       {"fn", row.confusion.fn}}},
        {"accuracy", r4(m.accuracy)},
        {"per_class", per_class},
        {"macro", {{"precision", r4(m.macro_precision)},
                   {"recall", r4(m.macro_recall)},
                   {"f1", r4(m.macro_f1)}}},
        {"weighted", {{"precision", r4(m.weighted_precision)},
                      {"recall", r4(m.weighted_recall)},
                      {"f1", r4(m.weighted_f1)}}},
        {"auc", r4(row.roc.auc)},
        {"ties_broken", row.ties_broken},
        {"roc", points},
    });
  }
  json report = {{"format", "majvote-report"},
                 {"version", 1},
                 {"positive_class", 1},
                 {"n_examples", table.n_examples},
                 {"models", models}};
  return report.dump(2) + "\n";
}

void write_reports(const EvaluationTable& table, const std::filesystem::path& dir,
                   bool roc_files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string());
  write_file_atomic(dir / "report.json", format_json_report(table));
  write_file_atomic(dir / "report.txt", format_table(table));
  if (!roc_files) return;
  for (const ModelEvaluation& row : table.rows) {
    std::ostringstream out;
    out << "fpr\ttpr\n" << std::setprecision(17);
    for (const auto& [fpr, tpr] : row.roc.points) out << fpr << '\t' << tpr << '\n';
    write_file_atomic(dir / ("roc_" + row.name + ".tsv"), out.str());
  }
}

}  // namespace majvote
