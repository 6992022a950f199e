#pragma once

// Text cleaning: URL removal, punctuation removal, tokenization, stopword
// removal and Porter stemming, applied in that fixed order.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "majvote/ingest.hpp"

namespace majvote {

/// The built-in 318-term English stop list.
const std::unordered_set<std::string>& default_stopwords();

/// Reads one lowercase term per line; '#' starts a comment. Throws DataError.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

struct PreprocessConfig {
  bool remove_urls = true;
  bool remove_stopwords = true;
  bool stem = true;
  /// Drops capitalized words that do not start a sentence. Heuristic, off by
  /// default.
  bool remove_names = false;
  std::unordered_set<std::string> stopword_list = default_stopwords();
  std::size_t min_token_len = 2;
  bool use_title = true;
  bool use_author = true;
  bool use_body = true;

  /// Throws ConfigError when min_token_len is 0 or a stopword is not
  /// lowercase [a-z0-9]+.
  void validate() const;
};

struct TokenizedDocument {
  std::int64_t doc_id = 0;
  std::vector<std::string> tokens;
  std::optional<int> label;
};

/// URL removal (when enabled), then every character that is not an ASCII
/// letter, digit or whitespace becomes a space, then lowercasing and
/// whitespace collapsing. Idempotent.
std::string sanitize(std::string_view raw, const PreprocessConfig& config = {});

/// Whitespace split keeping tokens of at least `min_token_len` characters.
std::vector<std::string> tokenize(std::string_view clean, std::size_t min_token_len = 2);

/// Porter stemmer, following the reference C implementation published by
/// M. F. Porter (including its two documented departures from the 1980
/// description: "bli"->"ble" and "logi"->"log" in step 2).
std::string porter_stem(std::string_view word);

/// Drops capitalized words that are not sentence-initial.
std::string remove_names(std::string_view text);

/// Joins the enabled fields with single spaces and runs
/// sanitize -> tokenize -> stopword filter -> stem.
TokenizedDocument preprocess_document(const Document& doc,
                                      const PreprocessConfig& config = {});

std::vector<TokenizedDocument> preprocess_corpus(const std::vector<Document>& docs,
                                                 const PreprocessConfig& config = {});

}  // namespace majvote
