#include "majvote/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "majvote/error.hpp"

namespace majvote {

double SparseVector::at(FeatureIndex index) const {
  const auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    sum += values[i] * dense[indices[i]];
  }
  return sum;
}

SparseVector SparseVector::from_pairs(std::vector<std::pair<FeatureIndex, double>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector v;
  for (std::size_t i = 0; i < pairs.size();) {
    double sum = 0.0;
    const FeatureIndex index = pairs[i].first;
    for (; i < pairs.size() && pairs[i].first == index; ++i) sum += pairs[i].second;
    if (sum != 0.0) {
      v.indices.push_back(index);
      v.values.push_back(sum);
    }
  }
  return v;
}

void SparseVector::check(std::size_t width) const {
  if (indices.size() != values.size()) {
    throw DataError("sparse vector has mismatched index/value lengths");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= width) {
      throw DataError("feature index " + std::to_string(indices[i]) +
                      " exceeds width " + std::to_string(width));
    }
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw DataError("sparse vector indices are not strictly increasing");
    }
    if (values[i] == 0.0) {
      throw DataError("sparse vector stores an explicit zero");
    }
  }
}

std::optional<FeatureIndex> Vocabulary::index_of(std::string_view term) const {
  const auto it = lookup_.find(std::string(term));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::reindex() {
  lookup_.clear();
  lookup_.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    lookup_.emplace(terms[i], static_cast<FeatureIndex>(i));
  }
}

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::kCount ? "count" : "tfidf";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "count") return FeatureKind::kCount;
  if (text == "tfidf") return FeatureKind::kTfidf;
  throw ConfigError("unknown feature kind '" + std::string(text) +
                    "' (expected count or tfidf)");
}

void FeatureMatrix::check() const {
  if (labels.size() != rows.size()) {
    throw DataError("feature matrix has " + std::to_string(rows.size()) + " rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  for (const SparseVector& row : rows) row.check(width);
}

Vocabulary build_vocabulary(std::span<const TokenizedDocument> train_docs,
                            std::size_t max_features, std::uint32_t min_df) {
  if (train_docs.empty()) {
    throw DataError("cannot build a vocabulary from an empty corpus");
  }
  if (max_features < 1) {
    throw ConfigError("vectorize.max_features must be >= 1");
  }
  std::unordered_map<std::string, std::uint32_t> df;
  std::vector<std::string_view> seen;
  for (const TokenizedDocument& doc : train_docs) {
    seen.assign(doc.tokens.begin(), doc.tokens.end());
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (std::string_view t : seen) ++df[std::string(t)];
  }

  std::vector<std::pair<std::string, std::uint32_t>> kept;
  kept.reserve(df.size());
  for (auto& [term, count] : df) {
    if (count >= min_df) kept.emplace_back(term, count);
  }
  if (kept.size() > max_features) {
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    kept.resize(max_features);
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  Vocabulary vocab;
  vocab.n_docs = train_docs.size();
  vocab.terms.reserve(kept.size());
  vocab.doc_freq.reserve(kept.size());
  for (auto& [term, count] : kept) {
    vocab.terms.push_back(std::move(term));
    vocab.doc_freq.push_back(count);
  }
  vocab.reindex();
  return vocab;
}

namespace {

// Sorted (index, occurrences) pairs for the in-vocabulary tokens of `doc`.
std::vector<std::pair<FeatureIndex, double>> term_counts(const TokenizedDocument& doc,
                                                         const Vocabulary& vocab) {
  std::vector<std::pair<FeatureIndex, double>> pairs;
  pairs.reserve(doc.tokens.size());
  for (const std::string& token : doc.tokens) {
    if (auto index = vocab.index_of(token)) pairs.emplace_back(*index, 1.0);
  }
  return pairs;
}

}  // namespace

SparseVector count_vector(const TokenizedDocument& doc, const Vocabulary& vocab) {
  return SparseVector::from_pairs(term_counts(doc, vocab));
}

SparseVector tf_vector(const TokenizedDocument& doc, const Vocabulary& vocab) {
  SparseVector v = count_vector(doc, vocab);
  const auto total = static_cast<double>(doc.tokens.size());
  for (double& value : v.values) value /= total;
  return v;
}

IdfTable fit_idf(const Vocabulary& vocab) {
  if (vocab.n_docs < 1) {
    throw DataError("cannot fit IDF on a vocabulary built from zero documents");
  }
  IdfTable table;
  table.idf.resize(vocab.size());
  const auto n = static_cast<double>(vocab.n_docs);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    table.idf[i] = std::log(n / static_cast<double>(vocab.doc_freq[i]));
  }
  return table;
}

SparseVector tfidf_vector(const TokenizedDocument& doc, const Vocabulary& vocab,
                          const IdfTable& idf) {
  const SparseVector tf = tf_vector(doc, vocab);
  SparseVector out;
  out.indices.reserve(tf.nnz());
  out.values.reserve(tf.nnz());
  for (std::size_t i = 0; i < tf.nnz(); ++i) {
    const double value = tf.values[i] * idf.idf[tf.indices[i]];
    if (value == 0.0) continue;
    out.indices.push_back(tf.indices[i]);
    out.values.push_back(value);
  }
  return out;
}

FeatureMatrix transform_corpus(std::span<const TokenizedDocument> docs,
                               const Vocabulary& vocab, const IdfTable* idf,
                               FeatureKind kind) {
  if (kind == FeatureKind::kTfidf) {
    if (idf == nullptr) {
      throw DataError("tfidf transform requires a fitted IDF table");
    }
    if (idf->idf.size() != vocab.size()) {
      throw DataError("IDF table does not match the vocabulary");
    }
  }
  FeatureMatrix m;
  m.width = vocab.size();
  m.kind = kind;
  m.rows.reserve(docs.size());
  m.labels.reserve(docs.size());
  for (const TokenizedDocument& doc : docs) {
    m.rows.push_back(kind == FeatureKind::kCount ? count_vector(doc, vocab)
                                                 : tfidf_vector(doc, vocab, *idf));
    m.labels.push_back(doc.label.value_or(-1));
  }
  return m;
}

}  // namespace majvote
