#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "majvote/error.hpp"
#include "majvote/vectorize.hpp"

using namespace majvote;

namespace {

TokenizedDocument doc(std::vector<std::string> tokens, std::optional<int> label = std::nullopt) {
  TokenizedDocument d;
  d.tokens = std::move(tokens);
  d.label = label;
  return d;
}

std::vector<TokenizedDocument> two_docs() { return {doc({"a", "b"}, 0), doc({"a", "c"}, 1)}; }

std::vector<TokenizedDocument> random_corpus(SplitMix64& rng, std::size_t max_docs,
                                             std::size_t terms) {
  std::vector<TokenizedDocument> docs(1 + rng.below(max_docs));
  for (auto& d : docs) {
    const std::size_t len = rng.below(12);
    for (std::size_t k = 0; k < len; ++k) d.tokens.push_back("t" + std::to_string(rng.below(terms)));
  }
  return docs;
}

}  // namespace

TEST(Vocabulary, CountsDocumentFrequency) {
  const Vocabulary v = build_vocabulary(two_docs(), 10, 1);
  EXPECT_EQ(v.terms, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(v.doc_freq, (std::vector<std::uint32_t>{2, 1, 1}));
  EXPECT_EQ(v.n_docs, 2u);
  EXPECT_EQ(v.index_of("c"), 2u);
  EXPECT_FALSE(v.index_of("z").has_value());
}

TEST(Vocabulary, MinDfThreshold) {
  EXPECT_EQ(build_vocabulary(two_docs(), 10, 2).terms, (std::vector<std::string>{"a"}));
}

TEST(Vocabulary, MaxFeaturesLexicographicTieBreak) {
  EXPECT_EQ(build_vocabulary(two_docs(), 2, 1).terms, (std::vector<std::string>{"a", "b"}));
}

TEST(Vocabulary, RepeatedTokensCountOncePerDocument) {
  const Vocabulary v = build_vocabulary(std::vector{doc({"x", "x", "x"})}, 10, 1);
  EXPECT_EQ(v.doc_freq, (std::vector<std::uint32_t>{1}));
}

TEST(Vocabulary, Errors) {
  EXPECT_THROW(build_vocabulary(std::vector<TokenizedDocument>{}, 10, 1), DataError);
  EXPECT_THROW(build_vocabulary(two_docs(), 0, 1), ConfigError);
}

TEST(Vocabulary, IndicesAreDenseAndFrequenciesBounded) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto docs = random_corpus(rng, 20, 30);
    const Vocabulary v = build_vocabulary(docs, 1 + rng.below(30), 1 + static_cast<std::uint32_t>(rng.below(3)));
    ASSERT_TRUE(std::is_sorted(v.terms.begin(), v.terms.end()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      ASSERT_EQ(v.index_of(v.terms[i]), i);
      ASSERT_GE(v.doc_freq[i], 1u);
      ASSERT_LE(v.doc_freq[i], v.n_docs);
    }
  }
}

TEST(CountVector, Examples) {
  const Vocabulary v = build_vocabulary(two_docs(), 10, 1);
  const SparseVector x = count_vector(doc({"a", "b", "a"}), v);
  EXPECT_EQ(x.indices, (std::vector<FeatureIndex>{0, 1}));
  EXPECT_EQ(x.values, (std::vector<double>{2, 1}));
  EXPECT_TRUE(count_vector(doc({"z"}), v).empty());
  EXPECT_TRUE(count_vector(doc({}), v).empty());
}

TEST(TfVector, Examples) {
  const Vocabulary v = build_vocabulary(two_docs(), 10, 1);
  const SparseVector ab = tf_vector(doc({"a", "b"}), v);
  EXPECT_DOUBLE_EQ(ab.at(0), 0.5);
  EXPECT_DOUBLE_EQ(ab.at(1), 0.5);
  EXPECT_DOUBLE_EQ(tf_vector(doc({"a", "a", "a"}), v).at(0), 1.0);
  const SparseVector az = tf_vector(doc({"a", "z"}), v);
  EXPECT_DOUBLE_EQ(az.at(0), 0.5);
  EXPECT_EQ(az.nnz(), 1u);
  EXPECT_TRUE(tf_vector(doc({}), v).empty());
}

TEST(Idf, Examples) {
  const Vocabulary v = build_vocabulary(two_docs(), 10, 1);
  const IdfTable idf = fit_idf(v);
  EXPECT_EQ(idf.idf[0], 0.0);
  EXPECT_NEAR(idf.idf[1], std::log(2.0), 1e-12);
  EXPECT_NEAR(idf.idf[2], std::log(2.0), 1e-12);

  Vocabulary big;
  big.terms = {"t"};
  big.doc_freq = {10};
  big.n_docs = 1000;
  big.reindex();
  EXPECT_NEAR(fit_idf(big).idf[0], std::log(100.0), 1e-12);
  EXPECT_NEAR(fit_idf(big).idf[0], 4.6052, 1e-4);
}

TEST(Tfidf, AnalyticTwoDocumentCorpus) {
  const auto docs = two_docs();
  const Vocabulary v = build_vocabulary(docs, 10, 1);
  const IdfTable idf = fit_idf(v);
  const SparseVector d1 = tfidf_vector(docs[0], v, idf);
  EXPECT_EQ(d1.indices, (std::vector<FeatureIndex>{1}));  // "a" has idf 0 and is not stored
  EXPECT_NEAR(d1.values[0], 0.5 * std::log(2.0), 1e-12);
  EXPECT_NEAR(d1.values[0], 0.3466, 1e-4);
  EXPECT_TRUE(tfidf_vector(doc({}), v, idf).empty());
  const SparseVector unseen = tfidf_vector(doc({"b", "b"}), v, idf);
  EXPECT_NEAR(unseen.at(1), std::log(2.0), 1e-12);
}

TEST(TransformCorpus, CountAndTfidf) {
  const auto docs = two_docs();
  const Vocabulary v = build_vocabulary(docs, 10, 1);
  const IdfTable idf = fit_idf(v);
  const FeatureMatrix counts = transform_corpus(docs, v, nullptr, FeatureKind::kCount);
  EXPECT_EQ(counts.width, 3u);
  EXPECT_EQ(counts.labels, (std::vector<int>{0, 1}));
  EXPECT_EQ(counts.rows[0].indices, (std::vector<FeatureIndex>{0, 1}));
  EXPECT_EQ(counts.rows[1].indices, (std::vector<FeatureIndex>{0, 2}));
  const FeatureMatrix w = transform_corpus(docs, v, &idf, FeatureKind::kTfidf);
  EXPECT_EQ(w.rows[0].indices, (std::vector<FeatureIndex>{1}));
  EXPECT_EQ(w.rows[1].indices, (std::vector<FeatureIndex>{2}));
  EXPECT_NEAR(w.rows[1].values[0], 0.3466, 1e-4);
  EXPECT_THROW(transform_corpus(docs, v, nullptr, FeatureKind::kTfidf), DataError);
}

TEST(TransformCorpus, UnlabeledDocumentsGetMinusOne) {
  const Vocabulary v = build_vocabulary(two_docs(), 10, 1);
  const FeatureMatrix m = transform_corpus(std::vector{doc({"a"})}, v, nullptr, FeatureKind::kCount);
  EXPECT_EQ(m.labels, (std::vector<int>{-1}));
}

TEST(Idf, MonotoneInDocumentFrequency) {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Vocabulary v = build_vocabulary(random_corpus(rng, 30, 15), 100, 1);
    const IdfTable idf = fit_idf(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      ASSERT_GE(idf.idf[i], 0.0);
      ASSERT_EQ(idf.idf[i] == 0.0, v.doc_freq[i] == v.n_docs);
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v.doc_freq[i] < v.doc_freq[j]) ASSERT_GT(idf.idf[i], idf.idf[j]);
      }
    }
  }
}

TEST(TfVector, SumsToAtMostOne) {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto train = random_corpus(rng, 10, 12);
    const Vocabulary v = build_vocabulary(train, 100, 1);
    const auto test = random_corpus(rng, 5, 16);
    for (const TokenizedDocument& d : test) {
      const SparseVector tf = tf_vector(d, v);
      double sum = 0.0;
      for (double x : tf.values) sum += x;
      bool has_oov = false;
      for (const std::string& t : d.tokens) has_oov |= !v.index_of(t).has_value();
      if (d.tokens.empty()) {
        ASSERT_TRUE(tf.empty());
      } else if (has_oov) {
        ASSERT_LT(sum, 1.0 - 1e-12);
      } else {
        ASSERT_NEAR(sum, 1.0, 1e-12);
      }
    }
  }
}

TEST(Tfidf, EqualsTfTimesIdfByBruteForce) {
  SplitMix64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const auto train = random_corpus(rng, 8, 10);
    const Vocabulary v = build_vocabulary(train, 100, 1);
    const IdfTable idf = fit_idf(v);
    for (const TokenizedDocument& d : random_corpus(rng, 4, 12)) {
      std::map<std::string, double> f;
      for (const std::string& t : d.tokens) f[t] += 1.0;
      const SparseVector x = tfidf_vector(d, v, idf);
      x.check(v.size());
      std::size_t expected_nnz = 0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto it = f.find(v.terms[i]);
        const double tf = it == f.end() ? 0.0 : it->second / static_cast<double>(d.tokens.size());
        const double expected = tf * std::log(static_cast<double>(v.n_docs) / v.doc_freq[i]);
        ASSERT_NEAR(x.at(static_cast<FeatureIndex>(i)), expected, 1e-12);
        expected_nnz += expected != 0.0;
      }
      ASSERT_EQ(x.nnz(), expected_nnz);
    }
  }
}

TEST(TransformCorpus, DoesNotMutateFittedState) {
  const auto train = two_docs();
  const Vocabulary v = build_vocabulary(train, 10, 1);
  const IdfTable idf = fit_idf(v);
  const Vocabulary v_before = v;
  const IdfTable idf_before = idf;
  transform_corpus(std::vector{doc({"new", "terms", "a"})}, v, &idf, FeatureKind::kTfidf);
  EXPECT_EQ(v.terms, v_before.terms);
  EXPECT_EQ(v.doc_freq, v_before.doc_freq);
  EXPECT_EQ(idf.idf, idf_before.idf);
}

TEST(SparseVector, FromPairsSortsMergesAndDropsZeros) {
  const SparseVector x = SparseVector::from_pairs({{5, 1.0}, {2, 2.0}, {5, -1.0}, {3, 0.0}, {2, 1.0}});
  EXPECT_EQ(x.indices, (std::vector<FeatureIndex>{2}));
  EXPECT_EQ(x.values, (std::vector<double>{3.0}));
  const std::vector<double> dense = {1, 1, 2, 0, 0, 0};
  EXPECT_EQ(x.dot(dense), 6.0);
}

TEST(SparseVector, CheckRejectsBrokenInvariants) {
  SparseVector x;
  x.indices = {1, 1};
  x.values = {1, 2};
  EXPECT_THROW(x.check(5), DataError);
  x.indices = {1, 6};
  EXPECT_THROW(x.check(5), DataError);
  x.indices = {1, 2};
  x.values = {1, 0};
  EXPECT_THROW(x.check(5), DataError);
  x.values = {1};
  EXPECT_THROW(x.check(5), DataError);
}

TEST(FeatureKind, ParseAndPrint) {
  EXPECT_EQ(parse_feature_kind("count"), FeatureKind::kCount);
  EXPECT_EQ(parse_feature_kind("tfidf"), FeatureKind::kTfidf);
  EXPECT_EQ(to_string(FeatureKind::kTfidf), "tfidf");
  EXPECT_THROW(parse_feature_kind("bm25"), ConfigError);
}
