#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "majvote/error.hpp"
#include "majvote/eval.hpp"
#include "oracles.hpp"

using namespace majvote;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConfusionMatrix random_confusion(SplitMix64& rng, std::vector<int>& y, std::vector<int>& p) {
  const std::size_t n = 1 + rng.below(60);
  y.assign(n, 0);
  p.assign(n, 0);
  const double bias = rng.uniform();
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.uniform() < bias ? 1 : 0;
    p[i] = rng.uniform() < 0.7 ? y[i] : 1 - y[i];
  }
  return confusion(y, p);
}

}  // namespace

TEST(Confusion, Examples) {
  EXPECT_EQ(confusion(std::vector<int>{1, 1, 0, 0}, std::vector<int>{1, 0, 0, 1}),
            (ConfusionMatrix{1, 1, 1, 1}));
  const std::vector<int> y = {1, 0, 1, 1, 0};
  const ConfusionMatrix perfect = confusion(y, y);
  EXPECT_EQ(perfect.fp + perfect.fn, 0u);
  std::vector<int> wrong = y;
  for (int& v : wrong) v = 1 - v;
  const ConfusionMatrix inverted = confusion(y, wrong);
  EXPECT_EQ(inverted.tp + inverted.tn, 0u);
}

TEST(Confusion, Errors) {
  EXPECT_THROW(confusion(std::vector<int>{1}, std::vector<int>{1, 0}), DataError);
  EXPECT_THROW(confusion(std::vector<int>{}, std::vector<int>{}), DataError);
  EXPECT_THROW(confusion(std::vector<int>{2}, std::vector<int>{1}), DataError);
}

TEST(Metrics, WorkedExample) {
  const MetricsReport r = metrics(ConfusionMatrix{8, 6, 2, 4});
  EXPECT_NEAR(r.accuracy, 0.70, 1e-12);
  EXPECT_NEAR(r.per_class[1].precision, 0.80, 1e-12);
  EXPECT_NEAR(r.per_class[1].recall, 8.0 / 12.0, 1e-12);
  EXPECT_NEAR(r.per_class[1].f1, 16.0 / 22.0, 1e-12);
  EXPECT_NEAR(r.per_class[1].f1, 0.7273, 5e-5);
  EXPECT_EQ(r.per_class[1].support, 12u);
  EXPECT_EQ(r.per_class[0].support, 8u);
}

TEST(Metrics, PerfectAndZeroDenominators) {
  const MetricsReport p = metrics(ConfusionMatrix{5, 5, 0, 0});
  EXPECT_EQ(p.accuracy, 1.0);
  EXPECT_EQ(p.macro_f1, 1.0);
  EXPECT_EQ(p.weighted_precision, 1.0);
  const MetricsReport z = metrics(ConfusionMatrix{0, 5, 0, 3});
  EXPECT_EQ(z.per_class[1].precision, 0.0);
  EXPECT_EQ(z.per_class[1].f1, 0.0);
  EXPECT_THROW(metrics(ConfusionMatrix{}), DataError);
}

TEST(Metrics, IdentitiesOnRandomVectors) {
  SplitMix64 rng(12);
  std::vector<int> y;
  std::vector<int> p;
  for (int trial = 0; trial < 1000; ++trial) {
    const ConfusionMatrix cm = random_confusion(rng, y, p);
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      tp += y[i] == 1 && p[i] == 1;
      tn += y[i] == 0 && p[i] == 0;
      fp += y[i] == 0 && p[i] == 1;
      fn += y[i] == 1 && p[i] == 0;
    }
    ASSERT_EQ(cm, (ConfusionMatrix{tp, tn, fp, fn}));
    const MetricsReport r = metrics(cm);
    const auto ratio = [](std::size_t a, std::size_t b) {
      return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
    };
    ASSERT_NEAR(r.accuracy, ratio(tp + tn, y.size()), 1e-12);
    const double prec = ratio(tp, tp + fp);
    const double rec = ratio(tp, tp + fn);
    ASSERT_NEAR(r.per_class[1].precision, prec, 1e-12);
    ASSERT_NEAR(r.per_class[1].recall, rec, 1e-12);
    ASSERT_NEAR(r.per_class[1].f1, prec + rec == 0 ? 0.0 : 2 * prec * rec / (prec + rec), 1e-12);
    ASSERT_NEAR(r.per_class[0].precision, ratio(tn, tn + fn), 1e-12);
    ASSERT_NEAR(r.per_class[0].recall, ratio(tn, tn + fp), 1e-12);
    ASSERT_NEAR(r.macro_precision, (r.per_class[0].precision + r.per_class[1].precision) / 2, 1e-12);
    const double w1 = ratio(tp + fn, y.size());
    ASSERT_NEAR(r.weighted_recall, (1 - w1) * r.per_class[0].recall + w1 * r.per_class[1].recall,
                1e-12);
    for (const ClassMetrics& c : r.per_class) {
      ASSERT_GE(c.f1, 0.0);
      ASSERT_LE(c.f1, 1.0);
      if (c.precision > 0 && c.recall > 0) {
        ASSERT_LE(c.f1, std::max(c.precision, c.recall) + 1e-15);
        ASSERT_GE(c.f1, std::min(c.precision, c.recall) - 1e-15);
      }
    }
  }
}

TEST(Metrics, SwappingThePositiveClass) {
  SplitMix64 rng(13);
  std::vector<int> y;
  std::vector<int> p;
  for (int trial = 0; trial < 300; ++trial) {
    const ConfusionMatrix cm = random_confusion(rng, y, p);
    const MetricsReport a = metrics(cm);
    const MetricsReport b = metrics(ConfusionMatrix{cm.tn, cm.tp, cm.fn, cm.fp});
    ASSERT_EQ(a.accuracy, b.accuracy);
    ASSERT_NEAR(a.macro_f1, b.macro_f1, 1e-15);
    ASSERT_NEAR(a.macro_precision, b.macro_precision, 1e-15);
    ASSERT_EQ(a.per_class[0].f1, b.per_class[1].f1);
    ASSERT_EQ(a.per_class[1].recall, b.per_class[0].recall);
  }
}

TEST(Roc, Examples) {
  const std::vector<int> y = {1, 0, 1, 0};
  EXPECT_NEAR(roc_curve(y, std::vector<double>{0.9, 0.8, 0.7, 0.1}).auc, 0.75, 1e-12);
  EXPECT_EQ(roc_curve(y, std::vector<double>{0.9, 0.1, 0.8, 0.2}).auc, 1.0);
  const RocCurve flat = roc_curve(y, std::vector<double>{0.3, 0.3, 0.3, 0.3});
  EXPECT_EQ(flat.auc, 0.5);
  ASSERT_EQ(flat.points.size(), 2u);
  EXPECT_EQ(flat.points.back(), std::make_pair(1.0, 1.0));
  EXPECT_TRUE(std::isinf(flat.thresholds.front()));
  EXPECT_THROW(roc_curve(std::vector<int>{1, 1}, std::vector<double>{0.1, 0.2}), DataError);
}

TEST(Roc, TrapezoidEqualsPairCounting) {
  SplitMix64 rng(14);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(11);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      s[i] = static_cast<double>(rng.below(5)) / 4.0;
    }
    y[0] = 0;
    y[1] = 1;
    const RocCurve c = roc_curve(y, s);
    ASSERT_NEAR(c.auc, testkit::auc_pair_oracle(y, s), 1e-12);
    for (std::size_t k = 1; k < c.points.size(); ++k) {
      ASSERT_GE(c.points[k].first, c.points[k - 1].first);
      ASSERT_GE(c.points[k].second, c.points[k - 1].second);
    }
    ASSERT_EQ(c.points.front(), std::make_pair(0.0, 0.0));
    ASSERT_EQ(c.points.back(), std::make_pair(1.0, 1.0));
  }
}

namespace {

struct Scenario {
  std::vector<EnsembleMember> members;
  Ensemble ensemble;
  std::vector<DocumentFeatures> test;
  std::vector<int> labels;
};

EnsembleMember constant_member(const std::string& name, double value, std::size_t width) {
  auto t = std::make_shared<TrainedLearner>();
  t->family = Family::kDecisionTree;
  t->feature_width = width;
  DecisionTree tree;
  tree.nodes.push_back(TreeNode{});
  tree.nodes[0].value = value;
  t->model = tree;
  return EnsembleMember{name, t, FeatureKind::kTfidf, ScoreRange{0.0, 1.0}};
}

}  // namespace

TEST(EvaluateAll, MajorityStubScoresTheBaseRate) {
  Scenario s;
  s.members.push_back(constant_member("Stub", 1.0, 3));
  s.ensemble.members = s.members;
  for (int i = 0; i < 10; ++i) s.labels.push_back(i < 6 ? 1 : 0);
  s.test.resize(10);
  const EvaluationTable t = evaluate_all(s.members, s.ensemble, s.test, s.labels);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.n_examples, 10u);
  EXPECT_EQ(t.rows[0].name, "Stub");
  EXPECT_NEAR(t.rows[0].metrics.accuracy, 0.6, 1e-15);
  EXPECT_EQ(t.rows[1].name, kEnsembleRowName);
  EXPECT_EQ(t.rows[0].roc.auc, 0.5);
}

TEST(EvaluateAll, NineCopiesMatchTheModelRow) {
  const FeatureMatrix train = testkit::random_matrix(100, 12, 0.3, 15);
  const FeatureMatrix test = testkit::random_matrix(150, 12, 0.3, 16);
  auto model = std::make_shared<const TrainedLearner>(fit(LearnerSpec{}, train));
  std::vector<EnsembleMember> members(9, EnsembleMember{"DT", model, FeatureKind::kTfidf, {}});
  Ensemble e{members};
  const EvaluationTable t =
      evaluate_all(std::span<const EnsembleMember>(members.data(), 1), e,
                   testkit::as_document_features(test), test.labels);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].confusion, t.rows[1].confusion);
  EXPECT_EQ(t.rows[0].metrics.macro_f1, t.rows[1].metrics.macro_f1);
  EXPECT_EQ(t.rows[1].ties_broken, 0u);
}

TEST(Reports, TableJsonAndRocFiles) {
  Scenario s;
  s.members.push_back(constant_member("DT", 0.75, 2));
  s.members.push_back(constant_member("NB", 0.25, 2));
  s.ensemble.members = s.members;
  s.test.resize(4);
  s.labels = {1, 0, 1, 0};
  const EvaluationTable t = evaluate_all(s.members, s.ensemble, s.test, s.labels);

  const std::string table = format_table(t);
  EXPECT_NE(table.find("Classifier"), std::string::npos);
  EXPECT_NE(table.find("Accuracy (%)"), std::string::npos);
  EXPECT_NE(table.find("F1-score (%)"), std::string::npos);
  EXPECT_NE(table.find("50.00"), std::string::npos);
  EXPECT_NE(table.find("MajorityVote"), std::string::npos);

  const auto j = nlohmann::json::parse(format_json_report(t));
  EXPECT_EQ(j.at("format"), "majvote-report");
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_EQ(j.at("n_examples"), 4);
  ASSERT_EQ(j.at("models").size(), 3u);
  const auto& dt = j.at("models")[0];
  EXPECT_EQ(dt.at("name"), "DT");
  EXPECT_EQ(dt.at("confusion").at("tp"), 2);
  EXPECT_EQ(dt.at("confusion").at("fp"), 2);
  EXPECT_DOUBLE_EQ(dt.at("accuracy").get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(dt.at("per_class").at("1").at("recall").get<double>(), 1.0);
  EXPECT_EQ(dt.at("roc")[0].at("threshold"), "inf");
  // Equal confidences on both sides resolve every tie to class 1.
  EXPECT_EQ(j.at("models")[2].at("ties_broken"), 4);

  const auto dir = testkit::temp_dir("reports");
  write_reports(t, dir / "nested", true);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "nested" / "report.json")), j);
  EXPECT_EQ(slurp(dir / "nested" / "report.txt"), table);
  const std::string roc = slurp(dir / "nested" / "roc_MajorityVote.tsv");
  EXPECT_EQ(roc.rfind("fpr\ttpr\n", 0), 0u);
  EXPECT_TRUE(std::filesystem::exists(dir / "nested" / "roc_DT.tsv"));
  const auto dir2 = testkit::temp_dir("reports_no_roc");
  write_reports(t, dir2, false);
  EXPECT_FALSE(std::filesystem::exists(dir2 / "roc_DT.tsv"));
}
