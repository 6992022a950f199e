#include "majvote/preprocess.hpp"

#include <algorithm>
#include <array>

#include "majvote/error.hpp"

namespace majvote {
namespace {

bool is_ascii_alnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (text.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[pos + i]);
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    if (c != static_cast<unsigned char>(prefix[i])) return false;
  }
  return true;
}

constexpr std::array<std::string_view, 3> kUrlPrefixes = {"http://", "https://",
                                                          "www."};

std::string strip_urls(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const bool url = std::any_of(kUrlPrefixes.begin(), kUrlPrefixes.end(),
                                 [&](std::string_view p) {
                                   return starts_with_ci(text, i, p);
                                 });
    if (url) {
      while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back(' ');
      continue;
    }
    out.push_back(text[i++]);
  }
  return out;
}

bool ends_sentence(std::string_view word) {
  while (!word.empty() && (word.back() == '"' || word.back() == '\'' ||
                           word.back() == ')')) {
    word.remove_suffix(1);
  }
  return !word.empty() &&
         (word.back() == '.' || word.back() == '!' || word.back() == '?');
}

}  // namespace

void PreprocessConfig::validate() const {
  if (min_token_len < 1) {
    throw ConfigError("preprocess.min_token_len must be >= 1");
  }
  for (const std::string& w : stopword_list) {
    if (w.empty() || !std::all_of(w.begin(), w.end(), [](unsigned char c) {
          return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
        })) {
      throw ConfigError("stopword '" + w + "' is not lowercase [a-z0-9]+");
    }
  }
}

std::string sanitize(std::string_view raw, const PreprocessConfig& config) {
  std::string without_urls;
  if (config.remove_urls) {
    without_urls = strip_urls(raw);
    raw = without_urls;
  }
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (is_ascii_alnum(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view clean, std::size_t min_token_len) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < clean.size()) {
    while (i < clean.size() && is_space(static_cast<unsigned char>(clean[i]))) ++i;
    const std::size_t start = i;
    while (i < clean.size() && !is_space(static_cast<unsigned char>(clean[i]))) ++i;
    if (i > start && i - start >= min_token_len) {
      tokens.emplace_back(clean.substr(start, i - start));
    }
  }
  return tokens;
}

std::string remove_names(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool sentence_start = true;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t ws_start = i;
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    out.append(text.substr(ws_start, i - ws_start));
    const std::size_t start = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) break;
    const std::string_view word = text.substr(start, i - start);
    // Leading quotes/brackets do not count towards capitalization.
    std::size_t first = 0;
    while (first < word.size() && !is_ascii_alnum(static_cast<unsigned char>(word[first]))) {
      ++first;
    }
    const bool capitalized =
        first < word.size() && word[first] >= 'A' && word[first] <= 'Z';
    if (!(capitalized && !sentence_start)) {
      out.append(word);
    } else if (ends_sentence(word)) {
      // Keep the sentence boundary visible to later words.
      out.push_back('.');
    }
    sentence_start = ends_sentence(word);
  }
  return out;
}

TokenizedDocument preprocess_document(const Document& doc, const PreprocessConfig& config) {
  std::string text;
  auto append = [&text](const std::string& field) {
    if (field.empty()) return;
    if (!text.empty()) text.push_back(' ');
    text += field;
  };
  if (config.use_title) append(doc.title);
  if (config.use_author) append(doc.author);
  if (config.use_body) append(doc.body);

  if (config.remove_names) {
    if (config.remove_urls) text = strip_urls(text);
    text = remove_names(text);
  }

  TokenizedDocument out;
  out.doc_id = doc.id;
  out.label = doc.label;
  for (std::string& token : tokenize(sanitize(text, config), config.min_token_len)) {
    if (config.remove_stopwords && config.stopword_list.contains(token)) continue;
    if (config.stem) {
      token = porter_stem(token);
      if (token.size() < config.min_token_len) continue;
    }
    out.tokens.push_back(std::move(token));
  }
  return out;
}

std::vector<TokenizedDocument> preprocess_corpus(const std::vector<Document>& docs,
                                                 const PreprocessConfig& config) {
  std::vector<TokenizedDocument> out;
  out.reserve(docs.size());
  for (const Document& d : docs) out.push_back(preprocess_document(d, config));
  return out;
}

}  // namespace majvote
