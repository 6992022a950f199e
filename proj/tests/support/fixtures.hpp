#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "majvote/config.hpp"
#include "majvote/ensemble.hpp"
#include "majvote/ingest.hpp"
#include "majvote/random.hpp"
#include "majvote/vectorize.hpp"

namespace majvote::testkit {

/// 100 rows, 50 per class. Feature 0 is 1 everywhere, feature 1 is 1 exactly
/// on class-1 rows.
FeatureMatrix separable_fixture();

/// Feature matrix with `n` rows over `width` columns, about `density` of the
/// entries non-zero, drawn from {0.5, 1, 1.5, 2, ...}. Labels depend weakly on
/// the first columns, so both classes occur but data is not separable.
FeatureMatrix random_matrix(std::size_t n, std::size_t width, double density,
                            std::uint64_t seed, bool integer_values = false);

/// Both encodings set to the same row.
std::vector<DocumentFeatures> as_document_features(const FeatureMatrix& m);

/// Random news-like documents. Each class draws most words from a shared
/// vocabulary and some from its own, so a bag-of-words model can learn the
/// task but not trivially.
std::vector<Document> synthetic_documents(std::size_t n, std::uint64_t seed,
                                          double class1_share = 0.5);

Corpus synthetic_corpus(std::size_t n, std::uint64_t seed);

/// Default pipeline with smaller ensembles of trees and min_df 1, sized for
/// corpora of a few hundred documents.
PipelineConfig fast_config();

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

/// Accuracy of predict() over a matrix.
double training_accuracy(const TrainedLearner& model, const FeatureMatrix& m);

}  // namespace majvote::testkit
