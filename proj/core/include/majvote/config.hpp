#pragma once

// Pipeline configuration read from a sectioned INI file.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "majvote/ingest.hpp"
#include "majvote/learners.hpp"
#include "majvote/preprocess.hpp"
#include "majvote/vectorize.hpp"

namespace majvote {

struct LearnerConfig {
  LearnerSpec spec;
  FeatureKind features = FeatureKind::kTfidf;
};

struct PipelineConfig {
  std::filesystem::path data_path;
  CsvSchema schema;

  double split_ratio = kDefaultSplitRatio;
  std::uint64_t seed = kDefaultSplitSeed;

  PreprocessConfig preprocess;
  std::optional<std::filesystem::path> stopwords_file;

  std::size_t max_features = kDefaultMaxFeatures;
  std::uint32_t min_df = kDefaultMinDf;

  /// Enabled learners in reporting order.
  std::vector<LearnerConfig> learners;
  /// Names of ensemble members; each must be an enabled learner.
  std::vector<Family> ensemble;

  std::filesystem::path output_dir = "out";
  bool roc_files = true;

  /// All nine learners with their default hyperparameters, all of them voting.
  static PipelineConfig defaults();

  const LearnerConfig* learner(Family family) const;
  /// Sets the split seed and every learner seed.
  void set_seed(std::uint64_t seed);
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses INI text. Unknown sections or keys are errors. Relative paths are
/// resolved against `base_dir`. The stopword file, when named, is loaded
/// unless `read_stopwords_file` is false.
PipelineConfig parse_config(std::string_view text,
                            const std::filesystem::path& base_dir = {},
                            bool read_stopwords_file = true);

PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical INI rendering; parse_config(format_config(c)) reproduces c.
std::string format_config(const PipelineConfig& config);

}  // namespace majvote
