#include "majvote/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "majvote/error.hpp"
#include "majvote/file_util.hpp"

namespace majvote {
namespace {

namespace pt = boost::property_tree;

std::string field(std::string_view section, std::string_view key) {
  return std::string(section) + "." + std::string(key);
}

bool parse_bool(const std::string& name, std::string value) {
  boost::algorithm::to_lower(value);
  if (value == "true" || value == "yes" || value == "1" || value == "on") return true;
  if (value == "false" || value == "no" || value == "0" || value == "off") return false;
  throw ConfigError(name + ": expected a boolean, got '" + value + "'");
}

template <class T>
T parse_number(const std::string& name, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    throw ConfigError(name + ": expected a number, got '" + value + "'");
  }
  return out;
}

double parse_real(const std::string& name, const std::string& value) {
  const double v = parse_number<double>(name, value);
  if (!std::isfinite(v)) throw ConfigError(name + ": expected a finite number");
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  boost::algorithm::split(items, value, boost::algorithm::is_any_of(","));
  std::vector<std::string> out;
  for (std::string& item : items) {
    boost::algorithm::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<Family> parse_family_list(const std::string& name, const std::string& value) {
  std::string lowered = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(value));
  if (lowered == "all") return {kAllFamilies.begin(), kAllFamilies.end()};
  std::vector<Family> out;
  for (const std::string& item : split_list(value)) {
    Family f;
    try {
      f = parse_family(item);
    } catch (const ConfigError& e) {
      throw ConfigError(name + ": " + e.what());
    }
    if (std::find(out.begin(), out.end(), f) != out.end()) {
      throw ConfigError(name + ": '" + item + "' listed twice");
    }
    out.push_back(f);
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

std::string join_families(const std::vector<Family>& families) {
  std::string out;
  for (Family f : families) {
    if (!out.empty()) out += ", ";
    out += to_string(f);
  }
  return out;
}

// Keys under sections that are not learner families.
const std::set<std::string> kDataKeys = {"path",          "id_column",   "title_column",
                                          "author_column", "text_column", "label_column"};
const std::set<std::string> kSplitKeys = {"ratio", "seed"};
const std::set<std::string> kPreprocessKeys = {
    "remove_urls",   "remove_stopwords", "stem",      "remove_names", "stopwords_file",
    "min_token_len", "use_title",        "use_author", "use_body"};
const std::set<std::string> kVectorizeKeys = {"max_features", "min_df"};
const std::set<std::string> kLearnersKeys = {"enabled"};
const std::set<std::string> kEnsembleKeys = {"members"};
const std::set<std::string> kOutputKeys = {"dir", "roc_files"};

void check_keys(const std::string& section, const pt::ptree& tree,
                const std::set<std::string>& allowed) {
  for (const auto& [key, child] : tree) {
    if (!child.empty()) throw ConfigError(field(section, key) + ": nested keys are not allowed");
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + field(section, key) + "'");
  }
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig c;
  for (Family f : kAllFamilies) {
    LearnerConfig lc;
    lc.spec.family = f;
    lc.spec.hyperparameters = default_hyperparameters(f);
    lc.spec.seed = c.seed;
    lc.features = default_feature_kind(f);
    c.learners.push_back(std::move(lc));
    c.ensemble.push_back(f);
  }
  return c;
}

const LearnerConfig* PipelineConfig::learner(Family family) const {
  for (const LearnerConfig& lc : learners) {
    if (lc.spec.family == family) return &lc;
  }
  return nullptr;
}

void PipelineConfig::set_seed(std::uint64_t s) {
  seed = s;
  for (LearnerConfig& lc : learners) lc.spec.seed = s;
}

void PipelineConfig::validate() const {
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw ConfigError("split.ratio: must lie strictly between 0 and 1, got " +
                      std::to_string(split_ratio));
  }
  if (max_features == 0) throw ConfigError("vectorize.max_features: must be positive");
  if (min_df == 0) throw ConfigError("vectorize.min_df: must be at least 1");
  try {
    preprocess.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("preprocess: ") + e.what());
  }
  if (!preprocess.use_title && !preprocess.use_author && !preprocess.use_body) {
    throw ConfigError("preprocess: at least one of use_title, use_author, use_body must be set");
  }
  if (learners.empty()) throw ConfigError("learners.enabled: no learner enabled");
  for (const LearnerConfig& lc : learners) majvote::validate(lc.spec);
  if (ensemble.empty()) throw ConfigError("ensemble.members: the ensemble has no members");
  for (Family f : ensemble) {
    if (learner(f) == nullptr) {
      throw ConfigError("ensemble.members: '" + std::string(to_string(f)) +
                        "' is not an enabled learner");
    }
  }
}

// Drops "key = value  # note" style trailing comments; a '#' or ';' only
// starts a comment after whitespace.
static std::string strip_inline_comments(std::string_view text) {
  std::string out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    for (std::size_t i = 1; i < line.size(); ++i) {
      if ((line[i] == '#' || line[i] == ';') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line = line.substr(0, i);
        break;
      }
    }
    out.append(line);
    out += '\n';
    start = end + 1;
  }
  return out;
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                            bool read_stopwords_file) {
  pt::ptree tree;
  try {
    std::istringstream in{strip_inline_comments(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }

  PipelineConfig c = PipelineConfig::defaults();
  std::optional<std::vector<Family>> enabled;
  std::optional<std::vector<Family>> members;
  std::optional<std::uint64_t> seed;
  std::map<Family, LearnerConfig> family_overrides;
  for (Family f : kAllFamilies) family_overrides[f] = *c.learner(f);
  std::set<Family> explicit_seed;

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config: key '" + section + "' must appear inside a section");
    }
    auto get = [&](const std::string& key) { return body.get<std::string>(key); };
    if (section == "data") {
      check_keys(section, body, kDataKeys);
      for (const auto& [key, v] : body) {
        const std::string value = v.data();
        if (key == "path") c.data_path = resolve(base_dir, value);
        else if (key == "id_column") c.schema.id = value;
        else if (key == "title_column") c.schema.title = value;
        else if (key == "author_column") c.schema.author = value;
        else if (key == "text_column") c.schema.text = value;
        else if (key == "label_column") c.schema.label = value;
      }
    } else if (section == "split") {
      check_keys(section, body, kSplitKeys);
      if (body.count("ratio")) c.split_ratio = parse_real("split.ratio", get("ratio"));
      if (body.count("seed")) seed = parse_number<std::uint64_t>("split.seed", get("seed"));
    } else if (section == "preprocess") {
      check_keys(section, body, kPreprocessKeys);
      PreprocessConfig& p = c.preprocess;
      for (const auto& [key, v] : body) {
        const std::string name = field(section, key);
        const std::string value = v.data();
        if (key == "remove_urls") p.remove_urls = parse_bool(name, value);
        else if (key == "remove_stopwords") p.remove_stopwords = parse_bool(name, value);
        else if (key == "stem") p.stem = parse_bool(name, value);
        else if (key == "remove_names") p.remove_names = parse_bool(name, value);
        else if (key == "use_title") p.use_title = parse_bool(name, value);
        else if (key == "use_author") p.use_author = parse_bool(name, value);
        else if (key == "use_body") p.use_body = parse_bool(name, value);
        else if (key == "min_token_len") p.min_token_len = parse_number<std::size_t>(name, value);
        else if (key == "stopwords_file" && !value.empty()) {
          c.stopwords_file = resolve(base_dir, value);
        }
      }
    } else if (section == "vectorize") {
      check_keys(section, body, kVectorizeKeys);
      if (body.count("max_features")) {
        c.max_features = parse_number<std::size_t>("vectorize.max_features", get("max_features"));
      }
      if (body.count("min_df")) {
        c.min_df = parse_number<std::uint32_t>("vectorize.min_df", get("min_df"));
      }
    } else if (section == "learners") {
      check_keys(section, body, kLearnersKeys);
      const auto v = body.get_optional<std::string>("enabled");
      if (v && !v->empty()) enabled = parse_family_list("learners.enabled", *v);
    } else if (section == "ensemble") {
      check_keys(section, body, kEnsembleKeys);
      const auto v = body.get_optional<std::string>("members");
      if (v && !v->empty()) members = parse_family_list("ensemble.members", *v);
    } else if (section == "output") {
      check_keys(section, body, kOutputKeys);
      if (body.count("dir")) c.output_dir = resolve(base_dir, get("dir"));
      if (body.count("roc_files")) c.roc_files = parse_bool("output.roc_files", get("roc_files"));
    } else {
      Family f;
      try {
        f = parse_family(section);
      } catch (const ConfigError&) {
        throw ConfigError("unknown section [" + section + "]");
      }
      LearnerConfig& lc = family_overrides[f];
      const Hyperparameters& allowed = default_hyperparameters(f);
      for (const auto& [key, v] : body) {
        const std::string name = field(section, key);
        if (!v.empty()) throw ConfigError(name + ": nested keys are not allowed");
        if (key == "features") {
          try {
            lc.features = parse_feature_kind(v.data());
          } catch (const ConfigError& e) {
            throw ConfigError(name + ": " + e.what());
          }
        } else if (key == "seed") {
          lc.spec.seed = parse_number<std::uint64_t>(name, v.data());
          explicit_seed.insert(f);
        } else if (allowed.contains(key)) {
          lc.spec.hyperparameters[key] = v.data();
        } else {
          throw ConfigError("unknown key '" + name + "'");
        }
      }
    }
  }

  if (seed) {
    c.seed = *seed;
    for (auto& [f, lc] : family_overrides) {
      if (!explicit_seed.contains(f)) lc.spec.seed = *seed;
    }
  }
  const std::vector<Family> on = enabled.value_or(
      std::vector<Family>(kAllFamilies.begin(), kAllFamilies.end()));
  c.learners.clear();
  for (Family f : kAllFamilies) {
    if (std::find(on.begin(), on.end(), f) != on.end()) c.learners.push_back(family_overrides[f]);
  }
  if (members) {
    c.ensemble = *members;
  } else {
    c.ensemble.clear();
    for (const LearnerConfig& lc : c.learners) c.ensemble.push_back(lc.spec.family);
  }
  if (c.stopwords_file && read_stopwords_file) c.preprocess.stopword_list = load_stopwords(*c.stopwords_file);
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  return parse_config(text, std::filesystem::absolute(path).parent_path());
}

std::string format_config(const PipelineConfig& c) {
  std::ostringstream out;
  out.precision(17);
  auto b = [](bool v) { return v ? "true" : "false"; };
  out << "[data]\n"
      << "path = " << c.data_path.string() << '\n'
      << "id_column = " << c.schema.id << '\n'
      << "title_column = " << c.schema.title << '\n'
      << "author_column = " << c.schema.author << '\n'
      << "text_column = " << c.schema.text << '\n'
      << "label_column = " << c.schema.label << "\n\n";
  out << "[split]\n"
      << "ratio = " << c.split_ratio << '\n'
      << "seed = " << c.seed << "\n\n";
  const PreprocessConfig& p = c.preprocess;
  out << "[preprocess]\n"
      << "remove_urls = " << b(p.remove_urls) << '\n'
      << "remove_stopwords = " << b(p.remove_stopwords) << '\n'
      << "stem = " << b(p.stem) << '\n'
      << "remove_names = " << b(p.remove_names) << '\n'
      << "stopwords_file = " << (c.stopwords_file ? c.stopwords_file->string() : "") << '\n'
      << "min_token_len = " << p.min_token_len << '\n'
      << "use_title = " << b(p.use_title) << '\n'
      << "use_author = " << b(p.use_author) << '\n'
      << "use_body = " << b(p.use_body) << "\n\n";
  out << "[vectorize]\n"
      << "max_features = " << c.max_features << '\n'
      << "min_df = " << c.min_df << "\n\n";
  std::vector<Family> enabled;
  for (const LearnerConfig& lc : c.learners) enabled.push_back(lc.spec.family);
  out << "[learners]\nenabled = " << join_families(enabled) << "\n\n";
  out << "[ensemble]\nmembers = " << join_families(c.ensemble) << "\n\n";
  out << "[output]\n"
      << "dir = " << c.output_dir.string() << '\n'
      << "roc_files = " << b(c.roc_files) << '\n';
  for (const LearnerConfig& lc : c.learners) {
    out << "\n[" << to_string(lc.spec.family) << "]\n"
        << "features = " << to_string(lc.features) << '\n'
        << "seed = " << lc.spec.seed << '\n';
    for (const auto& [key, value] : lc.spec.hyperparameters) {
      out << key << " = " << value << '\n';
    }
  }
  return out.str();
}

}  // namespace majvote
