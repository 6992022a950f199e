#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "majvote/error.hpp"
#include "majvote/pipeline.hpp"

namespace fs = std::filesystem;
using namespace majvote;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> ratio;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config, "Pipeline config file (INI)");
  cmd->add_option("--seed", o.seed, "Override the split and learner seed");
  cmd->add_option("--ratio", o.ratio, "Override the training share of the split");
  cmd->add_option("-o,--out", o.out, "Override the output directory");
}

PipelineConfig resolve_config(const CommonOptions& o) {
  PipelineConfig c = o.config.empty() ? PipelineConfig::defaults() : load_config(o.config);
  if (o.seed) c.set_seed(*o.seed);
  if (o.ratio) c.split_ratio = *o.ratio;
  if (!o.out.empty()) c.output_dir = o.out;
  c.validate();
  return c;
}

fs::path bundle_path(const std::string& explicit_path, const CommonOptions& o) {
  if (!explicit_path.empty()) return explicit_path;
  return resolve_config(o).output_dir / kBundleFileName;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fake-news detection with a majority-voting ensemble of nine classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MAJVOTE_VERSION);

  CommonOptions train_opts;
  std::string train_data;
  CLI::App* train = app.add_subcommand("train", "Train every enabled learner and save a bundle");
  add_common(train, train_opts);
  train->add_option("--data", train_data, "Override the dataset path");

  CommonOptions eval_opts;
  std::string eval_bundle;
  std::string eval_data;
  std::string eval_corpus;
  bool no_roc = false;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Evaluate a bundle on its held-out split or a labeled file");
  add_common(evaluate, eval_opts);
  evaluate->add_option("-b,--bundle", eval_bundle, "Model bundle (default <out>/model.bundle)");
  evaluate->add_option("--data", eval_data, "External labeled CSV to evaluate on");
  evaluate->add_option("--corpus", eval_corpus,
                       "Training corpus for the held-out split (default: the bundle's)");
  evaluate->add_flag("--no-roc", no_roc, "Do not write per-model ROC files");

  CommonOptions predict_opts;
  std::string predict_bundle;
  std::vector<std::string> texts;
  std::string input;
  CLI::App* predict = app.add_subcommand("predict", "Classify new texts");
  add_common(predict, predict_opts);
  predict->add_option("-b,--bundle", predict_bundle, "Model bundle (default <out>/model.bundle)");
  predict->add_option("-t,--text", texts, "Text to classify (repeatable)");
  predict->add_option("-i,--input", input, "CSV file, or a file with one text per line");

  CommonOptions inspect_opts;
  std::string inspect_bundle;
  CLI::App* inspect = app.add_subcommand("inspect", "Print bundle metadata");
  add_common(inspect, inspect_opts);
  inspect->add_option("-b,--bundle", inspect_bundle, "Model bundle (default <out>/model.bundle)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (train->parsed()) {
      PipelineConfig config = resolve_config(train_opts);
      if (!train_data.empty()) config.data_path = train_data;
      cmd_train(config, std::cout);
    } else if (evaluate->parsed()) {
      const ModelBundle bundle = load_bundle(bundle_path(eval_bundle, eval_opts));
      EvaluateOptions options;
      if (!eval_data.empty()) options.dataset = eval_data;
      if (!eval_corpus.empty()) options.corpus = eval_corpus;
      options.output_dir = eval_opts.out.empty() && eval_opts.config.empty()
                               ? bundle.config.output_dir
                               : resolve_config(eval_opts).output_dir;
      options.roc_files = bundle.config.roc_files && !no_roc;
      cmd_evaluate(bundle, options, std::cout);
    } else if (predict->parsed()) {
      if (texts.empty() && input.empty()) {
        throw ConfigError("predict: give --text or --input");
      }
      const ModelBundle bundle = load_bundle(bundle_path(predict_bundle, predict_opts));
      std::vector<Document> docs;
      for (const std::string& t : texts) {
        Document d;
        d.id = static_cast<std::int64_t>(docs.size());
        d.body = t;
        docs.push_back(std::move(d));
      }
      if (!input.empty()) {
        for (Document& d : read_prediction_inputs(input, bundle.config.schema)) {
          docs.push_back(std::move(d));
        }
      }
      cmd_predict(bundle, docs, std::cout);
    } else if (inspect->parsed()) {
      std::cout << describe_bundle(load_bundle(bundle_path(inspect_bundle, inspect_opts)));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kData);
  }
  return 0;
}
