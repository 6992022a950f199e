#include "majvote/bundle.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <map>

#include <zlib.h>

#include "majvote/error.hpp"
#include "majvote/file_util.hpp"

namespace majvote {
namespace {

constexpr std::uint32_t tag(const char (&s)[5]) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(s[0])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[3])) << 24;
}

constexpr std::uint32_t kConfigTag = tag("CONF");
constexpr std::uint32_t kStopwordsTag = tag("STOP");
constexpr std::uint32_t kMetadataTag = tag("META");
constexpr std::uint32_t kVocabularyTag = tag("VOCA");
constexpr std::uint32_t kIdfTag = tag("IDFT");
constexpr std::uint32_t kLearnersTag = tag("LRNR");
constexpr std::uint32_t kEnsembleTag = tag("ENSM");

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u64(s.size());
    out_.append(s);
  }
  void f64s(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void sizes(const std::vector<std::size_t>& v) {
    u64(v.size());
    for (std::size_t x : v) u64(x);
  }
  void section(std::uint32_t t, const Writer& body) {
    u32(t);
    str(body.out_);
  }
  const std::string& bytes() const { return out_; }

 private:
  void put_le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string out_;
};

class Reader {
 public:
  Reader(std::string_view data, std::string what) : data_(data), what_(std::move(what)) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64() { return get_le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string_view str() { return take(count(1)); }
  std::vector<double> f64s() {
    std::vector<double> v(count(8));
    for (double& x : v) x = f64();
    return v;
  }
  std::vector<std::size_t> sizes() {
    std::vector<std::size_t> v(count(8));
    for (std::size_t& x : v) x = u64();
    return v;
  }
  /// Element count that cannot exceed the bytes left.
  std::size_t count(std::size_t min_element_size) {
    const std::uint64_t n = u64();
    if (n > remaining() / std::max<std::size_t>(min_element_size, 1)) fail("length out of range");
    return static_cast<std::size_t>(n);
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  void expect_done() const {
    if (!done()) fail("trailing bytes");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw BundleError("corrupt bundle (" + what_ + "): " + msg);
  }

 private:
  std::string_view take(std::size_t n) {
    if (n > remaining()) fail("unexpected end of data");
    const std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint64_t get_le(int n) {
    const std::string_view b = take(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
  std::string what_;
};

void write_tree(Writer& w, const DecisionTree& tree) {
  w.u64(tree.nodes.size());
  for (const TreeNode& n : tree.nodes) {
    w.i32(n.feature);
    w.f64(n.threshold);
    w.i32(n.left);
    w.i32(n.right);
    w.f64(n.weight0);
    w.f64(n.weight1);
    w.u32(n.n_samples);
    w.f64(n.value);
  }
}

DecisionTree read_tree(Reader& r, std::size_t width) {
  DecisionTree tree;
  tree.nodes.resize(r.count(48));
  const auto n_nodes = static_cast<std::int32_t>(tree.nodes.size());
  if (n_nodes == 0) r.fail("empty tree");
  for (std::int32_t i = 0; i < n_nodes; ++i) {
    TreeNode& n = tree.nodes[static_cast<std::size_t>(i)];
    n.feature = r.i32();
    n.threshold = r.f64();
    n.left = r.i32();
    n.right = r.i32();
    n.weight0 = r.f64();
    n.weight1 = r.f64();
    n.n_samples = r.u32();
    n.value = r.f64();
    if (!n.is_leaf()) {
      // Children always follow their parent, which also rules out cycles.
      if (static_cast<std::size_t>(n.feature) >= width || n.left <= i || n.right <= i ||
          n.left >= n_nodes || n.right >= n_nodes) {
        r.fail("invalid tree node");
      }
    }
  }
  return tree;
}

void write_trees(Writer& w, const std::vector<DecisionTree>& trees) {
  w.u64(trees.size());
  for (const DecisionTree& t : trees) write_tree(w, t);
}

std::vector<DecisionTree> read_trees(Reader& r, std::size_t width) {
  std::vector<DecisionTree> trees(r.count(8));
  for (DecisionTree& t : trees) t = read_tree(r, width);
  return trees;
}

void write_learner(Writer& w, const TrainedLearner& l) {
  w.u8(static_cast<std::uint8_t>(l.family));
  w.u64(l.feature_width);
  w.u64(l.info.rounds_run);
  w.f64(l.info.final_loss);
  w.u8(static_cast<std::uint8_t>(l.model.index()));
  std::visit(
      [&w](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DecisionTree>) {
          write_tree(w, m);
        } else if constexpr (std::is_same_v<M, LinearModel>) {
          w.u8(static_cast<std::uint8_t>(m.loss));
          w.f64s(m.weights);
          w.f64(m.bias);
        } else if constexpr (std::is_same_v<M, BoostedTreesModel>) {
          w.f64(m.base_score);
          w.f64(m.eta);
          write_trees(w, m.trees);
        } else if constexpr (std::is_same_v<M, ForestModel>) {
          write_trees(w, m.trees);
        } else if constexpr (std::is_same_v<M, AdaBoostModel>) {
          write_trees(w, m.stumps);
          w.f64s(m.alphas);
        } else {
          static_assert(std::is_same_v<M, NaiveBayesModel>);
          w.f64(m.log_prior[0]);
          w.f64(m.log_prior[1]);
          w.f64s(m.log_likelihood[0]);
          w.f64s(m.log_likelihood[1]);
          w.f64(m.alpha);
        }
      },
      l.model);
}

TrainedLearner read_learner(Reader& r) {
  TrainedLearner l;
  const std::uint8_t family = r.u8();
  if (family > static_cast<std::uint8_t>(Family::kNaiveBayes)) r.fail("unknown learner family");
  l.family = static_cast<Family>(family);
  l.feature_width = r.u64();
  l.info.rounds_run = r.u64();
  l.info.final_loss = r.f64();
  const std::size_t w = l.feature_width;
  switch (r.u8()) {
    case 0:
      l.model = read_tree(r, w);
      break;
    case 1: {
      LinearModel m;
      const std::uint8_t loss = r.u8();
      if (loss > 1) r.fail("unknown linear loss");
      m.loss = static_cast<LinearLoss>(loss);
      m.weights = r.f64s();
      m.bias = r.f64();
      if (m.weights.size() != w) r.fail("linear weight count does not match the width");
      l.model = std::move(m);
      break;
    }
    case 2: {
      BoostedTreesModel m;
      m.base_score = r.f64();
      m.eta = r.f64();
      m.trees = read_trees(r, w);
      l.model = std::move(m);
      break;
    }
    case 3: {
      ForestModel m;
      m.trees = read_trees(r, w);
      if (m.trees.empty()) r.fail("forest without trees");
      l.model = std::move(m);
      break;
    }
    case 4: {
      AdaBoostModel m;
      m.stumps = read_trees(r, w);
      m.alphas = r.f64s();
      if (m.alphas.size() != m.stumps.size()) r.fail("stump and weight counts differ");
      l.model = std::move(m);
      break;
    }
    case 5: {
      NaiveBayesModel m;
      m.log_prior[0] = r.f64();
      m.log_prior[1] = r.f64();
      m.log_likelihood[0] = r.f64s();
      m.log_likelihood[1] = r.f64s();
      m.alpha = r.f64();
      if (m.log_likelihood[0].size() != w || m.log_likelihood[1].size() != w) {
        r.fail("naive Bayes table does not match the width");
      }
      l.model = std::move(m);
      break;
    }
    default:
      r.fail("unknown model kind");
  }
  return l;
}

}  // namespace

const EnsembleMember* ModelBundle::find(Family family) const {
  for (const EnsembleMember& m : learners) {
    if (m.learner && m.learner->family == family) return &m;
  }
  return nullptr;
}

std::string serialize_bundle(const ModelBundle& b) {
  Writer payload;
  {
    Writer s;
    s.str(format_config(b.config));
    payload.section(kConfigTag, s);
  }
  {
    std::vector<std::string> words(b.config.preprocess.stopword_list.begin(),
                                   b.config.preprocess.stopword_list.end());
    std::sort(words.begin(), words.end());
    Writer s;
    s.u64(words.size());
    for (const std::string& word : words) s.str(word);
    payload.section(kStopwordsTag, s);
  }
  {
    const BundleMetadata& m = b.metadata;
    Writer s;
    s.str(m.created_utc);
    s.str(m.tool_version);
    s.str(m.corpus_path);
    s.u64(m.corpus_fingerprint);
    s.u64(m.corpus_size);
    s.u64(m.seed);
    s.f64(m.ratio);
    s.sizes(m.train_indices);
    s.sizes(m.test_indices);
    payload.section(kMetadataTag, s);
  }
  {
    const Vocabulary& v = b.vocabulary;
    Writer s;
    s.u64(v.n_docs);
    s.u64(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      s.str(v.terms[i]);
      s.u32(v.doc_freq[i]);
    }
    payload.section(kVocabularyTag, s);
  }
  {
    Writer s;
    s.f64s(b.idf.idf);
    payload.section(kIdfTag, s);
  }
  {
    Writer s;
    s.u64(b.learners.size());
    for (const EnsembleMember& m : b.learners) {
      if (!m.learner) throw BundleError("cannot save a bundle with a missing learner");
      s.str(m.name);
      s.u8(static_cast<std::uint8_t>(m.kind));
      s.f64(m.range.min);
      s.f64(m.range.max);
      write_learner(s, *m.learner);
    }
    payload.section(kLearnersTag, s);
  }
  {
    Writer s;
    s.u64(b.ensemble.members.size());
    for (const EnsembleMember& m : b.ensemble.members) {
      const auto it = std::find_if(b.learners.begin(), b.learners.end(),
                                   [&](const EnsembleMember& l) { return l.learner == m.learner; });
      if (it == b.learners.end()) throw BundleError("ensemble member '" + m.name + "' is not a bundle learner");
      s.u64(static_cast<std::uint64_t>(it - b.learners.begin()));
    }
    payload.section(kEnsembleTag, s);
  }

  const std::string& body = payload.bytes();
  Writer header;
  for (char c : kBundleMagic) header.u8(static_cast<std::uint8_t>(c));
  header.u32(kBundleFormatVersion);
  header.u64(body.size());
  header.u32(static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()))));
  return header.bytes() + body;
}

ModelBundle deserialize_bundle(std::string_view bytes) {
  if (bytes.size() < kBundleMagic.size() || bytes.substr(0, kBundleMagic.size()) != kBundleMagic) {
    throw BundleError("not a model bundle (bad magic)");
  }
  if (bytes.size() < kBundleHeaderSize) throw BundleError("truncated bundle header");
  Reader header(bytes.substr(kBundleMagic.size(), kBundleHeaderSize - kBundleMagic.size()),
                "header");
  const std::uint32_t version = header.u32();
  if (version != kBundleFormatVersion) {
    throw BundleError("bundle format version mismatch: file has version " +
                      std::to_string(version) + ", this build reads version " +
                      std::to_string(kBundleFormatVersion));
  }
  const std::uint64_t length = header.u64();
  const std::uint32_t expected_crc = header.u32();
  const std::string_view body = bytes.substr(kBundleHeaderSize);
  if (body.size() != length) {
    throw BundleError("bundle checksum failed: payload is " + std::to_string(body.size()) +
                      " bytes, header declares " + std::to_string(length) +
                      " (truncated or corrupt file)");
  }
  const auto actual_crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
  if (actual_crc != expected_crc) throw BundleError("bundle checksum failed (corrupt file)");

  std::map<std::uint32_t, std::string_view> sections;
  Reader payload(body, "payload");
  while (!payload.done()) {
    const std::uint32_t t = payload.u32();
    const std::string_view s = payload.str();
    if (!sections.emplace(t, s).second) payload.fail("duplicate section");
  }
  auto section = [&](std::uint32_t t, const char* name) {
    const auto it = sections.find(t);
    if (it == sections.end()) throw BundleError(std::string("bundle lacks the ") + name + " section");
    return Reader(it->second, name);
  };

  ModelBundle b;
  {
    Reader r = section(kConfigTag, "config");
    const std::string_view text = r.str();
    r.expect_done();
    try {
      b.config = parse_config(text, {}, false);
    } catch (const ConfigError& e) {
      throw BundleError(std::string("bundle config snapshot is invalid: ") + e.what());
    }
  }
  {
    Reader r = section(kStopwordsTag, "stopwords");
    std::unordered_set<std::string> words;
    const std::size_t n = r.count(8);
    for (std::size_t i = 0; i < n; ++i) words.emplace(r.str());
    r.expect_done();
    b.config.preprocess.stopword_list = std::move(words);
  }
  {
    Reader r = section(kMetadataTag, "metadata");
    BundleMetadata& m = b.metadata;
    m.created_utc = r.str();
    m.tool_version = r.str();
    m.corpus_path = r.str();
    m.corpus_fingerprint = r.u64();
    m.corpus_size = r.u64();
    m.seed = r.u64();
    m.ratio = r.f64();
    m.train_indices = r.sizes();
    m.test_indices = r.sizes();
    r.expect_done();
  }
  {
    Reader r = section(kVocabularyTag, "vocabulary");
    Vocabulary& v = b.vocabulary;
    v.n_docs = r.u64();
    const std::size_t n = r.count(12);
    v.terms.reserve(n);
    v.doc_freq.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      v.terms.emplace_back(r.str());
      v.doc_freq.push_back(r.u32());
    }
    r.expect_done();
    v.reindex();
  }
  {
    Reader r = section(kIdfTag, "idf");
    b.idf.idf = r.f64s();
    r.expect_done();
    if (b.idf.idf.size() != b.vocabulary.size()) {
      throw BundleError("corrupt bundle: IDF table does not match the vocabulary");
    }
  }
  {
    Reader r = section(kLearnersTag, "learners");
    const std::size_t n = r.count(8);
    for (std::size_t i = 0; i < n; ++i) {
      EnsembleMember m;
      m.name = r.str();
      const std::uint8_t kind = r.u8();
      if (kind > 1) r.fail("unknown feature kind");
      m.kind = static_cast<FeatureKind>(kind);
      m.range.min = r.f64();
      m.range.max = r.f64();
      m.learner = std::make_shared<const TrainedLearner>(read_learner(r));
      if (m.learner->feature_width != b.vocabulary.size()) {
        r.fail("learner '" + m.name + "' does not match the vocabulary width");
      }
      b.learners.push_back(std::move(m));
    }
    r.expect_done();
  }
  {
    Reader r = section(kEnsembleTag, "ensemble");
    const std::size_t n = r.count(8);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t idx = r.u64();
      if (idx >= b.learners.size()) r.fail("member index out of range");
      b.ensemble.members.push_back(b.learners[idx]);
    }
    r.expect_done();
  }
  return b;
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  const std::string bytes = serialize_bundle(bundle);
  try {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_file_atomic(path, bytes);
  } catch (const std::exception& e) {
    throw BundleError("cannot write bundle " + path.string() + ": " + e.what());
  }
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const DataError&) {
    throw BundleError("cannot read bundle " + path.string());
  }
  return deserialize_bundle(bytes);
}

}  // namespace majvote
