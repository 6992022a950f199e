#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "majvote/bundle.hpp"
#include "majvote/ensemble.hpp"
#include "majvote/learners.hpp"
#include "majvote/pipeline.hpp"
#include "majvote/preprocess.hpp"
#include "majvote/random.hpp"
#include "majvote/vectorize.hpp"

using namespace majvote;

namespace {

const std::vector<std::string> kWords = {
    "government", "officials", "announced", "running", "economy", "election", "reported",
    "president",  "secret",    "shocking",  "truth",   "media",   "covered",  "policies",
    "markets",    "weekly",    "sources",   "claimed", "leaders", "hearing",  "national"};

std::vector<Document> make_documents(std::size_t n, std::size_t words, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Document> docs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    Document& d = docs[i];
    d.id = static_cast<std::int64_t>(i);
    d.title = "Breaking News about " + kWords[rng.below(kWords.size())];
    for (std::size_t k = 0; k < words; ++k) {
      if (rng.below(4) == 0) {
        d.body += (y ? "fk" : "rl") + std::to_string(rng.below(400));
      } else if (rng.below(10) == 0) {
        d.body += "The";
      } else {
        d.body += kWords[rng.below(kWords.size())] + std::to_string(rng.below(50));
      }
      d.body += rng.below(12) == 0 ? ". " : " ";
    }
    d.body += " see https://example.com/story" + std::to_string(i);
    d.label = y;
  }
  return docs;
}

struct Workload {
  std::vector<TokenizedDocument> tokens;
  Vocabulary vocab;
  IdfTable idf;
  FeatureMatrix tfidf;
  FeatureMatrix counts;
};

const Workload& workload() {
  static const Workload w = [] {
    Workload out;
    out.tokens = preprocess_corpus(make_documents(2000, 200, 7), PreprocessConfig{});
    out.vocab = build_vocabulary(out.tokens, kDefaultMaxFeatures, 2);
    out.idf = fit_idf(out.vocab);
    out.tfidf = transform_corpus(out.tokens, out.vocab, &out.idf, FeatureKind::kTfidf);
    out.counts = transform_corpus(out.tokens, out.vocab, nullptr, FeatureKind::kCount);
    return out;
  }();
  return w;
}

LearnerSpec bench_spec(Family f) {
  LearnerSpec s{f, {}, 42};
  if (f == Family::kRandomForest || f == Family::kExtraTrees) s.hyperparameters["n_trees"] = "20";
  if (f == Family::kGradientBoost) s.hyperparameters["n_rounds"] = "20";
  if (f == Family::kAdaBoost) s.hyperparameters["n_rounds"] = "30";
  return s;
}

}  // namespace

static void BM_PorterStem(benchmark::State& state) {
  const std::vector<std::string> words = {"caresses", "relational", "running", "generalization",
                                          "happiness", "controlling", "agreed", "electrical"};
  for (auto _ : state) {
    for (const std::string& w : words) benchmark::DoNotOptimize(porter_stem(w));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(words.size()));
}
BENCHMARK(BM_PorterStem);

static void BM_PreprocessDocument(benchmark::State& state) {
  const std::vector<Document> docs = make_documents(64, static_cast<std::size_t>(state.range(0)), 1);
  const PreprocessConfig config;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(preprocess_document(docs[i++ % docs.size()], config));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PreprocessDocument)->Arg(50)->Arg(400)->Arg(2000);

static void BM_BuildVocabulary(benchmark::State& state) {
  const Workload& w = workload();
  for (auto _ : state) benchmark::DoNotOptimize(build_vocabulary(w.tokens, kDefaultMaxFeatures, 2));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.tokens.size()));
}
BENCHMARK(BM_BuildVocabulary)->Unit(benchmark::kMillisecond);

static void BM_TransformTfidf(benchmark::State& state) {
  const Workload& w = workload();
  for (auto _ : state) {
    benchmark::DoNotOptimize(transform_corpus(w.tokens, w.vocab, &w.idf, FeatureKind::kTfidf));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.tokens.size()));
}
BENCHMARK(BM_TransformTfidf)->Unit(benchmark::kMillisecond);

static void BM_Fit(benchmark::State& state) {
  const Family f = kAllFamilies[static_cast<std::size_t>(state.range(0))];
  const Workload& w = workload();
  const FeatureMatrix& m = default_feature_kind(f) == FeatureKind::kCount ? w.counts : w.tfidf;
  const LearnerSpec spec = bench_spec(f);
  for (auto _ : state) benchmark::DoNotOptimize(fit(spec, m));
  state.SetLabel(std::string(display_name(f)));
}
BENCHMARK(BM_Fit)->DenseRange(0, 8)->Unit(benchmark::kMillisecond);

static void BM_EnsemblePredict(benchmark::State& state) {
  const Workload& w = workload();
  Ensemble e;
  for (Family f : kAllFamilies) {
    const FeatureKind kind = default_feature_kind(f);
    auto model = std::make_shared<const TrainedLearner>(
        fit(bench_spec(f), kind == FeatureKind::kCount ? w.counts : w.tfidf));
    e.members.push_back({std::string(display_name(f)), model, kind, {}});
  }
  std::vector<DocumentFeatures> rows(w.tfidf.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = {w.counts.rows[i], w.tfidf.rows[i]};
  calibrate_score_ranges(e, rows);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_predict(e, rows[i++ % rows.size()]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EnsemblePredict);

static void BM_BundleRoundTrip(benchmark::State& state) {
  PipelineConfig config = PipelineConfig::defaults();
  for (LearnerConfig& lc : config.learners) lc.spec = bench_spec(lc.spec.family);
  Corpus corpus;
  corpus.documents = make_documents(400, 150, 3);
  for (const Document& d : corpus.documents) ++corpus.class_counts[*d.label];
  const ModelBundle bundle = train_pipeline(config, corpus);
  for (auto _ : state) {
    const std::string bytes = serialize_bundle(bundle);
    benchmark::DoNotOptimize(deserialize_bundle(bytes));
    state.SetBytesProcessed(static_cast<std::int64_t>(bytes.size()));
  }
}
BENCHMARK(BM_BundleRoundTrip)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
