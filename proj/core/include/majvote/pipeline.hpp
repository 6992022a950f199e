#pragma once

// End-to-end commands: train, evaluate, predict, inspect.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "majvote/bundle.hpp"
#include "majvote/config.hpp"
#include "majvote/eval.hpp"
#include "majvote/ingest.hpp"

namespace majvote {

inline constexpr std::string_view kBundleFileName = "model.bundle";

struct LearnerTrainingReport {
  std::string name;
  double seconds = 0.0;
  double train_accuracy = 0.0;
  TrainingInfo info;
};

struct TrainingSummary {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t vocabulary_size = 0;
  std::vector<LearnerTrainingReport> learners;
  double ensemble_train_accuracy = 0.0;
};

/// ingest -> split -> preprocess -> vocabulary / IDF on the training side ->
/// transform -> fit every enabled learner. Errors name the failing stage.
/// `log`, when given, receives one progress line per stage and learner.
ModelBundle train_pipeline(const PipelineConfig& config, const Corpus& corpus,
                           TrainingSummary* summary = nullptr, std::ostream* log = nullptr);

/// Loads config.data_path, trains and writes <output_dir>/model.bundle.
ModelBundle cmd_train(const PipelineConfig& config, std::ostream& log,
                      TrainingSummary* summary = nullptr);

/// Both encodings of one preprocessed document under the bundle vocabulary.
DocumentFeatures encode(const ModelBundle& bundle, const TokenizedDocument& doc);
std::vector<DocumentFeatures> encode_all(const ModelBundle& bundle,
                                         const std::vector<Document>& docs);

/// Evaluates every learner plus the ensemble on `docs`, which must be
/// labeled.
EvaluationTable evaluate_documents(const ModelBundle& bundle, const std::vector<Document>& docs);

/// The bundle's held-out documents: the split is re-derived from the stored
/// seed and ratio and checked against the indices recorded at training time.
std::vector<Document> held_out_documents(const ModelBundle& bundle, const Corpus& corpus,
                                         std::ostream* log = nullptr);

struct EvaluateOptions {
  /// External labeled CSV; when absent the held-out split of the training
  /// corpus is used.
  std::optional<std::filesystem::path> dataset;
  /// Training corpus location override for the held-out mode.
  std::optional<std::filesystem::path> corpus;
  std::filesystem::path output_dir = "out";
  bool roc_files = true;
};

EvaluationTable cmd_evaluate(const ModelBundle& bundle, const EvaluateOptions& options,
                             std::ostream& log);

std::vector<VotedPrediction> predict_documents(const ModelBundle& bundle,
                                               const std::vector<Document>& docs);

/// "<label>\t<vote_fraction>\t<NAME>=<vote>,..." per document, input order.
std::string format_prediction(const ModelBundle& bundle, const VotedPrediction& p);

/// Reads texts to classify: a CSV with a text column (labels optional), or
/// otherwise one text per line.
std::vector<Document> read_prediction_inputs(const std::filesystem::path& path,
                                             const CsvSchema& schema);

void cmd_predict(const ModelBundle& bundle, const std::vector<Document>& docs,
                 std::ostream& out);

/// Human-readable bundle metadata.
std::string describe_bundle(const ModelBundle& bundle);

}  // namespace majvote
