#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "majvote/error.hpp"
#include "majvote/file_util.hpp"
#include "majvote/ingest.hpp"

using namespace majvote;

namespace {

Corpus labeled_corpus(std::size_t n0, std::size_t n1) {
  Corpus c;
  for (std::size_t i = 0; i < n0 + n1; ++i) {
    Document d;
    d.id = static_cast<std::int64_t>(i);
    d.body = "x";
    d.label = i < n0 ? 0 : 1;
    c.documents.push_back(d);
  }
  c.class_counts = {{0, n0}, {1, n1}};
  return c;
}

}  // namespace

TEST(LoadCsv, HeaderOnlyGivesEmptyCorpus) {
  const Corpus c = parse_csv("id,title,author,text,label\n");
  EXPECT_EQ(c.size(), 0u);
  EXPECT_TRUE(c.class_counts.empty());
}

TEST(LoadCsv, QuotedEmbeddedNewlineIsPreserved) {
  const std::string text =
      "id,title,author,text,label\n"
      "0,First,Ann,plain body,0\n"
      "1,Second,\"Bob, Jr.\",\"line one\nline two\",1\n"
      "2,Third,,\"say \"\"hi\"\"\",0\n";
  const Corpus c = parse_csv(text);
  ASSERT_EQ(c.size(), 3u);
  const std::vector<Document> expected = {
      {0, "First", "Ann", "plain body", 0},
      {1, "Second", "Bob, Jr.", "line one\nline two", 1},
      {2, "Third", "", "say \"hi\"", 0},
  };
  EXPECT_EQ(c.documents, expected);
  EXPECT_EQ(c.class_counts.at(0), 2u);
  EXPECT_EQ(c.class_counts.at(1), 1u);
}

TEST(LoadCsv, AcceptsCrlfAndColumnOrder) {
  const Corpus c = parse_csv("label,text,id,author,title\r\n1,body,7,me,t\r\n");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.documents[0], (Document{7, "t", "me", "body", 1}));
}

TEST(LoadCsv, CustomSchema) {
  CsvSchema s;
  s.text = "content";
  s.label = "is_fake";
  const Corpus c = parse_csv("id,title,author,content,is_fake\n3,a,b,c,1\n", s);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.documents[0].body, "c");
}

TEST(LoadCsv, MissingFileIsDataError) {
  EXPECT_THROW(load_csv("/nonexistent/train.csv"), DataError);
}

TEST(LoadCsv, MissingColumnIsDataError) {
  EXPECT_THROW(parse_csv("id,title,text,label\n1,a,b,0\n"), DataError);
}

TEST(LoadCsv, MissingLabelColumnAllowedWhenNotRequired) {
  CsvSchema s;
  s.require_label = false;
  const Corpus c = parse_csv("id,title,author,text\n1,a,b,c\n", s);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_FALSE(c.documents[0].label.has_value());
  EXPECT_FALSE(c.fully_labeled());
}

TEST(LoadCsv, MalformedQuotingReportsRecord) {
  try {
    parse_csv("id,title,author,text,label\n0,a,b,c,0\n1,a,b,\"unterminated,1\n");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_csv("id,title,author,text,label\n0,a,b,\"c\"x,0\n"), DataError);
}

TEST(LoadCsv, LabelOutsideBinaryIsDataError) {
  EXPECT_THROW(parse_csv("id,title,author,text,label\n0,a,b,c,2\n"), DataError);
  EXPECT_THROW(parse_csv("id,title,author,text,label\n0,a,b,c,yes\n"), DataError);
}

TEST(LoadCsv, EmptyLabelCellIsUnlabeled) {
  const Corpus c = parse_csv("id,title,author,text,label\n0,a,b,c,\n");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_FALSE(c.documents[0].label.has_value());
}

TEST(LoadCsv, AllEmptyRowsAreDroppedAndCounted) {
  const Corpus c = parse_csv("id,title,author,text,label\n0,,,,1\n1,a,,,0\n2,,,,0\n");
  EXPECT_EQ(c.size(), 1u);
  EXPECT_EQ(c.dropped_empty_rows, 2u);
  EXPECT_EQ(c.documents[0].id, 1);
}

TEST(LoadCsv, InvalidUtf8IsReplacedAndCounted) {
  std::string text = "id,title,author,text,label\n0,a,b,caf\xC3\xA9 \xFF ok,1\n";
  const Corpus c = parse_csv(text);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.documents[0].body, "caf\xC3\xA9 \xEF\xBF\xBD ok");
  EXPECT_EQ(c.replaced_invalid_utf8, 1u);
}

TEST(SanitizeUtf8, HandlesTruncatedAndOverlongSequences) {
  std::string s = "\xE2\x82";  // truncated 3-byte sequence
  EXPECT_EQ(sanitize_utf8(s), 1u);
  EXPECT_EQ(s, "\xEF\xBF\xBD");
  std::string overlong = "\xC0\xAF";
  EXPECT_GE(sanitize_utf8(overlong), 1u);
  std::string ok = "plain \xE2\x82\xAC";
  EXPECT_EQ(sanitize_utf8(ok), 0u);
  EXPECT_EQ(ok, "plain \xE2\x82\xAC");
}

TEST(LoadCsv, WriteThenLoadRoundTrips) {
  const auto dir = testkit::temp_dir("ingest_roundtrip");
  std::vector<Document> docs = testkit::synthetic_documents(50, 3);
  docs[4].body = "quote \" comma , newline \n and \r\n crlf";
  docs[5].title = "";
  docs[6].label.reset();
  write_csv(dir / "c.csv", docs);
  CsvSchema s;
  const Corpus c = load_csv(dir / "c.csv", s);
  EXPECT_EQ(c.documents, docs);
  EXPECT_EQ(c.source_path, (dir / "c.csv").string());
}

TEST(Fingerprint, MatchesFnv1aReferenceValues) {
  const auto dir = testkit::temp_dir("fingerprint");
  write_file_atomic(dir / "empty", "");
  write_file_atomic(dir / "a", "a");
  write_file_atomic(dir / "foobar", "foobar");
  EXPECT_EQ(file_fingerprint(dir / "empty"), 0xcbf29ce484222325ULL);
  EXPECT_EQ(file_fingerprint(dir / "a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(file_fingerprint(dir / "foobar"), 0x85944171f73967e8ULL);
}

TEST(StratifiedSplit, KaggleSizedCounts) {
  const Corpus c = labeled_corpus(10'387, 10'413);
  const SplitPlan p = stratified_split(c, 0.8, 42);
  EXPECT_EQ(p.train_indices.size(), 16'640u);
  EXPECT_EQ(p.test_indices.size(), 4'160u);
  const auto test_fake = std::count_if(p.test_indices.begin(), p.test_indices.end(),
                                       [&](std::size_t i) { return *c.documents[i].label == 1; });
  EXPECT_EQ(test_fake, 2083);
}

TEST(StratifiedSplit, SingleClassCorpus) {
  const Corpus c = labeled_corpus(0, 10);
  const SplitPlan p = stratified_split(c, 0.8, 1);
  EXPECT_EQ(p.train_indices.size(), 8u);
  EXPECT_EQ(p.test_indices.size(), 2u);
}

TEST(StratifiedSplit, DeterministicPerSeed) {
  const Corpus c = labeled_corpus(37, 41);
  const SplitPlan a = stratified_split(c, 0.8, 7);
  const SplitPlan b = stratified_split(c, 0.8, 7);
  EXPECT_EQ(a.train_indices, b.train_indices);
  EXPECT_EQ(a.test_indices, b.test_indices);
  const SplitPlan other = stratified_split(c, 0.8, 8);
  EXPECT_NE(a.test_indices, other.test_indices);
}

TEST(StratifiedSplit, PartitionAndStratificationProperties) {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n0 = rng.below(60);
    const std::size_t n1 = rng.below(60) + (n0 == 0 ? 1 : 0);
    const double ratio = 0.05 + 0.9 * rng.uniform();
    const Corpus c = labeled_corpus(n0, n1);
    const SplitPlan p = stratified_split(c, ratio, rng.next());
    ASSERT_TRUE(std::is_sorted(p.train_indices.begin(), p.train_indices.end()));
    ASSERT_TRUE(std::is_sorted(p.test_indices.begin(), p.test_indices.end()));
    std::vector<std::size_t> all = p.train_indices;
    all.insert(all.end(), p.test_indices.begin(), p.test_indices.end());
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), n0 + n1);
    for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);
    for (int cls = 0; cls < 2; ++cls) {
      const std::size_t nc = cls == 0 ? n0 : n1;
      const auto tc = static_cast<std::size_t>(
          std::count_if(p.test_indices.begin(), p.test_indices.end(),
                        [&](std::size_t i) { return *c.documents[i].label == cls; }));
      const double exact = (1.0 - ratio) * static_cast<double>(nc);
      EXPECT_GE(static_cast<double>(tc), std::floor(exact) - 1e-9);
      EXPECT_LE(static_cast<double>(tc), std::ceil(exact) + 1e-9);
    }
  }
}

TEST(StratifiedSplit, RejectsBadRatioAndUnlabeledDocuments) {
  Corpus c = labeled_corpus(5, 5);
  EXPECT_THROW(stratified_split(c, 0.0, 1), ConfigError);
  EXPECT_THROW(stratified_split(c, 1.0, 1), ConfigError);
  EXPECT_THROW(stratified_split(c, 1.5, 1), ConfigError);
  EXPECT_THROW(stratified_split(c, std::nan(""), 1), ConfigError);
  c.documents[3].label.reset();
  EXPECT_THROW(stratified_split(c, 0.8, 1), DataError);
}
