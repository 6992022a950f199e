#pragma once

// Vocabulary fitting plus count, relative term frequency and TF-IDF encoding
// into index-sorted sparse rows.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "majvote/preprocess.hpp"

namespace majvote {

using FeatureIndex = std::uint32_t;

/// Sparse row with strictly increasing indices and no stored zeros.
struct SparseVector {
  std::vector<FeatureIndex> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  /// Value at `index` (0 when absent). Binary search.
  double at(FeatureIndex index) const;
  double dot(std::span<const double> dense) const;

  /// Builds from unordered (index, value) pairs: sorts, sums duplicates and
  /// drops zeros.
  static SparseVector from_pairs(std::vector<std::pair<FeatureIndex, double>> pairs);
  /// Throws DataError when the invariants do not hold for `width`.
  void check(std::size_t width) const;

  bool operator==(const SparseVector&) const = default;
};

struct Vocabulary {
  std::vector<std::string> terms;        // terms[i] has index i
  std::vector<std::uint32_t> doc_freq;   // aligned with terms
  std::size_t n_docs = 0;

  std::size_t size() const { return terms.size(); }
  std::optional<FeatureIndex> index_of(std::string_view term) const;

  /// Rebuilds the lookup table; call after filling terms directly.
  void reindex();

 private:
  std::unordered_map<std::string, FeatureIndex> lookup_;
};

struct IdfTable {
  std::vector<double> idf;  // aligned with Vocabulary indices
};

enum class FeatureKind : std::uint8_t { kCount = 0, kTfidf = 1 };

std::string_view to_string(FeatureKind kind);
/// Accepts "count" and "tfidf"; throws ConfigError otherwise.
FeatureKind parse_feature_kind(std::string_view text);

struct FeatureMatrix {
  std::vector<SparseVector> rows;
  std::vector<int> labels;
  std::size_t width = 0;
  FeatureKind kind = FeatureKind::kTfidf;

  std::size_t size() const { return rows.size(); }
  /// Throws DataError on label/row count mismatch or rows exceeding width.
  void check() const;
};

inline constexpr std::size_t kDefaultMaxFeatures = 50'000;
inline constexpr std::uint32_t kDefaultMinDf = 2;

/// Keeps terms with doc_freq >= min_df; when more than max_features remain,
/// the most frequent win (ties broken lexicographically). Indices follow the
/// lexicographic order of the kept terms.
Vocabulary build_vocabulary(std::span<const TokenizedDocument> train_docs,
                            std::size_t max_features = kDefaultMaxFeatures,
                            std::uint32_t min_df = kDefaultMinDf);

/// Raw in-vocabulary occurrence counts.
SparseVector count_vector(const TokenizedDocument& doc, const Vocabulary& vocab);

/// f(t,d) / (number of tokens in d). The denominator includes
/// out-of-vocabulary tokens.
SparseVector tf_vector(const TokenizedDocument& doc, const Vocabulary& vocab);

/// idf(t) = ln(N / df(t)), unsmoothed.
IdfTable fit_idf(const Vocabulary& vocab);

/// tf(t,d) * idf(t); zero products are not stored.
SparseVector tfidf_vector(const TokenizedDocument& doc, const Vocabulary& vocab,
                          const IdfTable& idf);

/// Encodes every document. `idf` is required for FeatureKind::kTfidf.
FeatureMatrix transform_corpus(std::span<const TokenizedDocument> docs,
                               const Vocabulary& vocab, const IdfTable* idf,
                               FeatureKind kind);

}  // namespace majvote
