#pragma once

// Corpus loading (RFC-4180 CSV) and stratified train/test splitting.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace majvote {

/// Class labels. 1 is the positive ("fake") class throughout the library.
inline constexpr int kReal = 0;
inline constexpr int kFake = 1;

struct Document {
  std::int64_t id = 0;
  std::string title;
  std::string author;
  std::string body;
  std::optional<int> label;

  bool operator==(const Document&) const = default;
};

/// Column names looked up in the CSV header row.
struct CsvSchema {
  std::string id = "id";
  std::string title = "title";
  std::string author = "author";
  std::string text = "text";
  std::string label = "label";
  /// When false a missing label column is accepted and every label is empty.
  bool require_label = true;
};

struct Corpus {
  std::vector<Document> documents;
  std::string source_path;
  std::map<int, std::size_t> class_counts;
  /// Rows whose title, author and body were all empty. They are skipped.
  std::size_t dropped_empty_rows = 0;
  /// Invalid UTF-8 sequences replaced by U+FFFD while loading.
  std::size_t replaced_invalid_utf8 = 0;

  std::size_t size() const { return documents.size(); }
  bool fully_labeled() const;
};

/// Parses a corpus. Throws DataError on a missing file, missing column,
/// malformed quoting (with the 1-based record number) or a label outside
/// {0,1}.
Corpus load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Same as load_csv over an in-memory buffer; `source` is used in messages.
Corpus parse_csv(std::string_view content, const CsvSchema& schema = {},
                 const std::string& source = "<memory>");

/// Writes documents with the schema's column names; every field is quoted.
void write_csv(const std::filesystem::path& path,
               const std::vector<Document>& documents,
               const CsvSchema& schema = {});

/// Replaces invalid UTF-8 sequences with U+FFFD; returns the number replaced.
std::size_t sanitize_utf8(std::string& text);

/// FNV-1a 64-bit hash of a file's raw bytes.
std::uint64_t file_fingerprint(const std::filesystem::path& path);

struct SplitPlan {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  double ratio = 0.8;
  std::uint64_t seed = 42;
};

inline constexpr double kDefaultSplitRatio = 0.8;
inline constexpr std::uint64_t kDefaultSplitSeed = 42;

/// Per-class shuffle with a splitmix64 stream seeded by `seed` (class 0 first,
/// then class 1). Each class contributes llround((1 - ratio) * n_c) documents
/// to the test side. Both index lists come back sorted.
SplitPlan stratified_split(const Corpus& corpus, double ratio = kDefaultSplitRatio,
                           std::uint64_t seed = kDefaultSplitSeed);

}  // namespace majvote
