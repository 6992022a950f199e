#include "fixtures.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <string_view>
#include <unistd.h>

namespace majvote::testkit {

FeatureMatrix separable_fixture() {
  FeatureMatrix m;
  m.width = 2;
  m.kind = FeatureKind::kCount;
  for (int i = 0; i < 100; ++i) {
    const int y = i % 2;
    SparseVector row;
    row.indices = {0};
    row.values = {1.0};
    if (y == 1) {
      row.indices.push_back(1);
      row.values.push_back(1.0);
    }
    m.rows.push_back(row);
    m.labels.push_back(y);
  }
  return m;
}

FeatureMatrix random_matrix(std::size_t n, std::size_t width, double density,
                            std::uint64_t seed, bool integer_values) {
  SplitMix64 rng(seed);
  FeatureMatrix m;
  m.width = width;
  m.kind = integer_values ? FeatureKind::kCount : FeatureKind::kTfidf;
  for (std::size_t i = 0; i < n; ++i) {
    SparseVector row;
    double signal = 0.0;
    for (std::size_t f = 0; f < width; ++f) {
      if (rng.uniform() >= density) continue;
      const double v = integer_values ? static_cast<double>(1 + rng.below(3))
                                      : 0.5 * static_cast<double>(1 + rng.below(4));
      row.indices.push_back(static_cast<FeatureIndex>(f));
      row.values.push_back(v);
      if (f < 3) signal += f == 1 ? -v : v;
    }
    m.rows.push_back(std::move(row));
    m.labels.push_back(signal + rng.uniform(-1.0, 1.0) > 0.5 ? 1 : 0);
  }
  // Guarantee both classes.
  m.labels[0] = 0;
  if (n > 1) m.labels[1] = 1;
  return m;
}

std::vector<DocumentFeatures> as_document_features(const FeatureMatrix& m) {
  std::vector<DocumentFeatures> out;
  for (const SparseVector& row : m.rows) out.push_back({row, row});
  return out;
}

namespace {

constexpr std::array<std::string_view, 40> kShared = {
    "government", "president", "report",  "people",   "state",    "official",
    "country",    "week",      "city",    "public",   "policy",   "election",
    "campaign",   "market",    "company", "police",   "court",    "minister",
    "economy",    "vote",      "news",    "world",    "health",   "school",
    "family",     "leader",    "office",  "security", "decision", "budget",
    "meeting",    "program",   "service", "history",  "question", "research",
    "growth",     "energy",    "capital", "council"};
constexpr std::array<std::string_view, 16> kReal = {
    "reuters",   "spokesman", "quarterly", "analysts",  "statement", "percent",
    "according", "agency",    "ministry",  "parliament", "forecast", "inflation",
    "committee", "tuesday",   "wednesday", "negotiations"};
constexpr std::array<std::string_view, 16> kFake = {
    "shocking", "truth",     "exposed", "hillary",  "secret",  "conspiracy",
    "wow",      "breaking",  "hoax",    "globalist", "insider", "revealed",
    "mainstream", "cover",   "elite",   "awakening"};
constexpr std::array<std::string_view, 12> kFiller = {
    "the", "a", "of", "and", "to", "in", "is", "was", "for", "on", "with", "by"};

std::string words(SplitMix64& rng, int y, std::size_t count) {
  std::string out;
  for (std::size_t k = 0; k < count; ++k) {
    if (!out.empty()) out += ' ';
    const double u = rng.uniform();
    if (u < 0.3) {
      out += kFiller[rng.below(kFiller.size())];
    } else if (u < 0.85) {
      out += kShared[rng.below(kShared.size())];
    } else {
      // Mostly the own class's marker words, sometimes the other's.
      const bool own = rng.uniform() < 0.8;
      const auto& pool = (y == 1) == own ? kFake : kReal;
      out += pool[rng.below(pool.size())];
    }
  }
  return out;
}

}  // namespace

std::vector<Document> synthetic_documents(std::size_t n, std::uint64_t seed,
                                          double class1_share) {
  SplitMix64 rng(seed);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    Document d;
    d.id = static_cast<std::int64_t>(i);
    const int y = rng.uniform() < class1_share ? 1 : 0;
    d.label = y;
    std::string title = words(rng, y, 6);
    title[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(title[0])));
    d.title = title;
    d.author = rng.uniform() < 0.2 ? "" : "Author " + std::to_string(rng.below(30));
    d.body = words(rng, y, 20 + rng.below(40)) + ". See https://example.com/" +
             std::to_string(i) + " for more!";
    docs.push_back(std::move(d));
  }
  return docs;
}

Corpus synthetic_corpus(std::size_t n, std::uint64_t seed) {
  Corpus c;
  c.documents = synthetic_documents(n, seed);
  c.source_path = "<synthetic>";
  for (const Document& d : c.documents) ++c.class_counts[*d.label];
  return c;
}

PipelineConfig fast_config() {
  PipelineConfig c = PipelineConfig::defaults();
  c.min_df = 1;
  for (LearnerConfig& lc : c.learners) {
    Hyperparameters& h = lc.spec.hyperparameters;
    switch (lc.spec.family) {
      case Family::kRandomForest:
      case Family::kExtraTrees:
        h["n_trees"] = "15";
        break;
      case Family::kGradientBoost:
        h["n_rounds"] = "20";
        h["depth"] = "3";
        break;
      case Family::kAdaBoost:
        h["n_rounds"] = "30";
        break;
      default:
        break;
    }
  }
  return c;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("majvote_test_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

double training_accuracy(const TrainedLearner& model, const FeatureMatrix& m) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < m.size(); ++i) hit += predict(model, m.rows[i]) == m.labels[i];
  return static_cast<double>(hit) / static_cast<double>(m.size());
}

}  // namespace majvote::testkit
