#include "majvote/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "majvote/error.hpp"
#include "majvote/file_util.hpp"

#ifndef MAJVOTE_VERSION
#define MAJVOTE_VERSION "unknown"
#endif

namespace majvote {
namespace {

template <class F>
auto stage(std::string_view name, F&& f) -> decltype(f()) {
  const std::string prefix = std::string(name) + ": ";
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const BundleError& e) {
    throw BundleError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  }
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<int> labels_of(const std::vector<Document>& docs, std::string_view what) {
  std::vector<int> labels;
  labels.reserve(docs.size());
  std::size_t missing = 0;
  for (const Document& d : docs) {
    if (d.label) labels.push_back(*d.label);
    else ++missing;
  }
  if (missing > 0) {
    throw DataError(std::string(what) + " requires labels, but " + std::to_string(missing) +
                    " of " + std::to_string(docs.size()) + " documents are unlabeled");
  }
  return labels;
}

double fraction_correct(const std::vector<int>& pred, const std::vector<int>& labels) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == labels[i] ? 1 : 0;
  return pred.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(pred.size());
}

}  // namespace

ModelBundle train_pipeline(const PipelineConfig& config, const Corpus& corpus,
                           TrainingSummary* summary, std::ostream* log) {
  using Clock = std::chrono::steady_clock;
  stage("config", [&] { config.validate(); });

  ModelBundle bundle;
  bundle.config = config;
  const SplitPlan plan =
      stage("split", [&] { return stratified_split(corpus, config.split_ratio, config.seed); });
  if (log) {
    *log << "split: " << plan.train_indices.size() << " train, " << plan.test_indices.size()
         << " test\n";
  }

  std::vector<Document> train_docs;
  train_docs.reserve(plan.train_indices.size());
  for (std::size_t i : plan.train_indices) train_docs.push_back(corpus.documents[i]);
  const std::vector<TokenizedDocument> tokens =
      stage("preprocess", [&] { return preprocess_corpus(train_docs, config.preprocess); });

  stage("vectorize", [&] {
    bundle.vocabulary = build_vocabulary(tokens, config.max_features, config.min_df);
    if (bundle.vocabulary.size() == 0) {
      throw DataError("the vocabulary is empty (try a lower min_df)");
    }
    bundle.idf = fit_idf(bundle.vocabulary);
  });
  if (log) *log << "vocabulary: " << bundle.vocabulary.size() << " terms\n";

  std::set<FeatureKind> kinds;
  for (const LearnerConfig& lc : config.learners) kinds.insert(lc.features);
  std::map<FeatureKind, FeatureMatrix> matrices;
  stage("vectorize", [&] {
    for (FeatureKind k : kinds) {
      matrices[k] = transform_corpus(tokens, bundle.vocabulary, &bundle.idf, k);
    }
  });

  TrainingSummary local;
  local.n_train = plan.train_indices.size();
  local.n_test = plan.test_indices.size();
  local.vocabulary_size = bundle.vocabulary.size();
  std::vector<std::vector<double>> train_scores;
  const std::vector<int>& labels = matrices.begin()->second.labels;

  for (const LearnerConfig& lc : config.learners) {
    const std::string name(display_name(lc.spec.family));
    const FeatureMatrix& train = matrices.at(lc.features);
    const auto start = Clock::now();
    auto learner = std::make_shared<const TrainedLearner>(
        stage("train " + std::string(to_string(lc.spec.family)), [&] { return fit(lc.spec, train); }));
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    std::vector<double> scores(train.size());
    std::vector<int> pred(train.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const double threshold = decision_threshold(lc.spec.family);
    for (std::size_t i = 0; i < train.size(); ++i) {
      scores[i] = score(*learner, train.rows[i]);
      pred[i] = scores[i] > threshold ? 1 : 0;
      if (std::isfinite(scores[i])) {
        lo = std::min(lo, scores[i]);
        hi = std::max(hi, scores[i]);
      }
    }
    EnsembleMember member;
    member.name = name;
    member.learner = learner;
    member.kind = lc.features;
    member.range = lo <= hi ? ScoreRange{lo, hi} : ScoreRange{};
    bundle.learners.push_back(member);
    train_scores.push_back(std::move(scores));

    LearnerTrainingReport report{name, seconds, fraction_correct(pred, labels), learner->info};
    if (log) {
      *log << "trained " << std::left << std::setw(9) << name << std::right << std::fixed
           << std::setprecision(2) << std::setw(9) << seconds << " s   train accuracy "
           << std::setprecision(4) << report.train_accuracy << '\n';
      log->unsetf(std::ios::floatfield);
    }
    local.learners.push_back(std::move(report));
  }

  std::vector<std::size_t> member_index;
  for (Family f : config.ensemble) {
    for (std::size_t j = 0; j < bundle.learners.size(); ++j) {
      if (bundle.learners[j].learner->family == f) {
        bundle.ensemble.members.push_back(bundle.learners[j]);
        member_index.push_back(j);
      }
    }
  }
  std::vector<int> ens_pred(labels.size());
  std::vector<double> row_scores(member_index.size());
  std::vector<int> votes(member_index.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < member_index.size(); ++j) {
      row_scores[j] = train_scores[member_index[j]][i];
      votes[j] = row_scores[j] > decision_threshold(bundle.ensemble.members[j].learner->family);
    }
    ens_pred[i] = resolve_votes(bundle.ensemble, votes, std::span<const double>(row_scores)).label;
  }
  local.ensemble_train_accuracy = fraction_correct(ens_pred, labels);
  if (log) {
    *log << "ensemble of " << member_index.size() << ": train accuracy " << std::fixed
         << std::setprecision(4) << local.ensemble_train_accuracy << '\n';
    log->unsetf(std::ios::floatfield);
  }

  BundleMetadata& meta = bundle.metadata;
  meta.created_utc = utc_now();
  meta.tool_version = MAJVOTE_VERSION;
  meta.corpus_path = corpus.source_path;
  meta.corpus_size = corpus.size();
  meta.seed = config.seed;
  meta.ratio = config.split_ratio;
  meta.train_indices = plan.train_indices;
  meta.test_indices = plan.test_indices;
  if (summary) *summary = std::move(local);
  return bundle;
}

ModelBundle cmd_train(const PipelineConfig& config, std::ostream& log, TrainingSummary* summary) {
  stage("config", [&] { config.validate(); });
  if (config.data_path.empty()) throw ConfigError("data.path: no dataset configured");
  const Corpus corpus = stage("ingest", [&] { return load_csv(config.data_path, config.schema); });
  log << "loaded " << corpus.size() << " documents from " << config.data_path.string() << '\n';
  if (corpus.dropped_empty_rows > 0) {
    log << "skipped " << corpus.dropped_empty_rows << " empty rows\n";
  }
  ModelBundle bundle = train_pipeline(config, corpus, summary, &log);
  bundle.metadata.corpus_fingerprint =
      stage("ingest", [&] { return file_fingerprint(config.data_path); });
  const std::filesystem::path out = config.output_dir / kBundleFileName;
  stage("save", [&] { save_bundle(bundle, out); });
  log << "bundle written to " << out.string() << '\n';
  return bundle;
}

DocumentFeatures encode(const ModelBundle& bundle, const TokenizedDocument& doc) {
  return {count_vector(doc, bundle.vocabulary), tfidf_vector(doc, bundle.vocabulary, bundle.idf)};
}

std::vector<DocumentFeatures> encode_all(const ModelBundle& bundle,
                                         const std::vector<Document>& docs) {
  const std::vector<TokenizedDocument> tokens = preprocess_corpus(docs, bundle.config.preprocess);
  std::vector<DocumentFeatures> out;
  out.reserve(tokens.size());
  for (const TokenizedDocument& t : tokens) out.push_back(encode(bundle, t));
  return out;
}

EvaluationTable evaluate_documents(const ModelBundle& bundle, const std::vector<Document>& docs) {
  const std::vector<int> labels = labels_of(docs, "evaluation");
  const std::vector<DocumentFeatures> features = stage("preprocess", [&] { return encode_all(bundle, docs); });
  return stage("evaluate", [&] {
    return evaluate_all(bundle.learners, bundle.ensemble, features, labels);
  });
}

std::vector<Document> held_out_documents(const ModelBundle& bundle, const Corpus& corpus,
                                         std::ostream* log) {
  const BundleMetadata& meta = bundle.metadata;
  if (corpus.size() != meta.corpus_size) {
    throw DataError("corpus has " + std::to_string(corpus.size()) + " documents but the bundle was trained on " +
                    std::to_string(meta.corpus_size) + " (wrong dataset for this bundle?)");
  }
  const SplitPlan plan = stratified_split(corpus, meta.ratio, meta.seed);
  if (plan.test_indices != meta.test_indices || plan.train_indices != meta.train_indices) {
    throw DataError("re-derived split differs from the one recorded in the bundle "
                    "(wrong dataset for this bundle?)");
  }
  if (log) *log << "held-out split: " << plan.test_indices.size() << " documents\n";
  std::vector<Document> docs;
  docs.reserve(plan.test_indices.size());
  for (std::size_t i : plan.test_indices) docs.push_back(corpus.documents[i]);
  return docs;
}

EvaluationTable cmd_evaluate(const ModelBundle& bundle, const EvaluateOptions& options,
                             std::ostream& log) {
  std::vector<Document> docs;
  if (options.dataset) {
    CsvSchema schema = bundle.config.schema;
    schema.require_label = false;
    const Corpus corpus = stage("ingest", [&] { return load_csv(*options.dataset, schema); });
    labels_of(corpus.documents, "evaluation");
    docs = corpus.documents;
    log << "evaluating on " << docs.size() << " documents from " << options.dataset->string() << '\n';
  } else {
    const std::filesystem::path path = options.corpus.value_or(bundle.config.data_path);
    if (path.empty()) throw ConfigError("no corpus to re-derive the held-out split from");
    const Corpus corpus = stage("ingest", [&] { return load_csv(path, bundle.config.schema); });
    const std::uint64_t fp = stage("ingest", [&] { return file_fingerprint(path); });
    if (bundle.metadata.corpus_fingerprint != 0 && fp != bundle.metadata.corpus_fingerprint) {
      log << "warning: " << path.string()
          << " differs from the file the bundle was trained on (fingerprint mismatch)\n";
    }
    docs = stage("split", [&] { return held_out_documents(bundle, corpus, &log); });
  }
  EvaluationTable table = evaluate_documents(bundle, docs);
  stage("report", [&] { write_reports(table, options.output_dir, options.roc_files); });
  log << format_table(table);
  log << "reports written to " << options.output_dir.string() << '\n';
  return table;
}

std::vector<VotedPrediction> predict_documents(const ModelBundle& bundle,
                                               const std::vector<Document>& docs) {
  const std::vector<DocumentFeatures> features = encode_all(bundle, docs);
  std::vector<VotedPrediction> out;
  out.reserve(features.size());
  for (const DocumentFeatures& f : features) out.push_back(ensemble_predict(bundle.ensemble, f));
  return out;
}

std::string format_prediction(const ModelBundle& bundle, const VotedPrediction& p) {
  std::ostringstream out;
  out << p.label << '\t' << std::fixed << std::setprecision(4) << p.vote_fraction << '\t';
  for (std::size_t j = 0; j < p.votes.size(); ++j) {
    if (j > 0) out << ',';
    out << bundle.ensemble.members[j].name << '=' << p.votes[j];
  }
  return out.str();
}

std::vector<Document> read_prediction_inputs(const std::filesystem::path& path,
                                             const CsvSchema& schema) {
  if (path.extension() == ".csv") {
    CsvSchema s = schema;
    s.require_label = false;
    return load_csv(path, s).documents;
  }
  std::string content = read_file(path);
  sanitize_utf8(content);
  std::vector<Document> docs;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Document d;
    d.id = static_cast<std::int64_t>(docs.size());
    d.body = std::move(line);
    docs.push_back(std::move(d));
    start = end + 1;
  }
  return docs;
}

void cmd_predict(const ModelBundle& bundle, const std::vector<Document>& docs, std::ostream& out) {
  for (const VotedPrediction& p : predict_documents(bundle, docs)) {
    out << format_prediction(bundle, p) << '\n';
  }
}

std::string describe_bundle(const ModelBundle& bundle) {
  const BundleMetadata& m = bundle.metadata;
  std::ostringstream out;
  out << "format version   " << kBundleFormatVersion << '\n'
      << "created          " << m.created_utc << '\n'
      << "tool version     " << m.tool_version << '\n'
      << "corpus           " << m.corpus_path << '\n'
      << "fingerprint      " << std::hex << std::setw(16) << std::setfill('0')
      << m.corpus_fingerprint << std::dec << std::setfill(' ') << '\n'
      << "documents        " << m.corpus_size << " (" << m.train_indices.size() << " train, "
      << m.test_indices.size() << " test)\n"
      << "split            ratio " << m.ratio << ", seed " << m.seed << '\n'
      << "vocabulary       " << bundle.vocabulary.size() << " terms from "
      << bundle.vocabulary.n_docs << " documents\n"
      << "learners\n";
  for (const EnsembleMember& l : bundle.learners) {
    out << "  " << std::left << std::setw(10) << l.name << std::setw(21)
        << to_string(l.learner->family) << std::setw(7) << to_string(l.kind) << std::right
        << "rounds " << l.learner->info.rounds_run << '\n';
  }
  out << "ensemble         ";
  for (std::size_t j = 0; j < bundle.ensemble.members.size(); ++j) {
    out << (j ? ", " : "") << bundle.ensemble.members[j].name;
  }
  out << '\n';
  return out.str();
}

}  // namespace majvote
