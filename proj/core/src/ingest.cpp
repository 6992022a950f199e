#include "majvote/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "majvote/error.hpp"
#include "majvote/file_util.hpp"
#include "majvote/random.hpp"

namespace majvote {
namespace {

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line on which the record starts
};

// RFC-4180 reader: comma separator, double-quote quoting with "" escapes,
// CRLF or LF record terminators. Quoted fields may contain separators,
// quotes and newlines.
class CsvReader {
 public:
  CsvReader(std::string_view text, std::string source)
      : text_(text), source_(std::move(source)) {}

  bool next(CsvRecord& record) {
    record.fields.clear();
    // Skip blank lines between records.
    while (pos_ < text_.size() && (text_[pos_] == '\n' || text_[pos_] == '\r')) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= text_.size()) return false;
    ++record_no_;
    record.line = line_;

    std::string field;
    for (;;) {
      field.clear();
      if (pos_ < text_.size() && text_[pos_] == '"') {
        ++pos_;
        for (;;) {
          if (pos_ >= text_.size()) {
            fail(record.line, "unterminated quoted field");
          }
          const char c = text_[pos_++];
          if (c == '"') {
            if (pos_ < text_.size() && text_[pos_] == '"') {
              field.push_back('"');
              ++pos_;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line_;
            field.push_back(c);
          }
        }
        if (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '\n' &&
            text_[pos_] != '\r') {
          fail(record.line, "unexpected character after closing quote");
        }
      } else {
        while (pos_ < text_.size()) {
          const char c = text_[pos_];
          if (c == ',' || c == '\n' || c == '\r') break;
          if (c == '"') {
            fail(record.line, "quote inside unquoted field");
          }
          field.push_back(c);
          ++pos_;
        }
      }
      record.fields.push_back(field);

      if (pos_ >= text_.size()) return true;
      const char sep = text_[pos_];
      if (sep == ',') {
        ++pos_;
        continue;
      }
      if (sep == '\r') {
        ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
      } else {
        ++pos_;
      }
      ++line_;
      return true;
    }
  }

  std::size_t record_number() const { return record_no_; }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    std::ostringstream msg;
    msg << source_ << ": malformed CSV at record " << record_no_ << " (line "
        << line << "): " << what;
    throw DataError(msg.str());
  }

 private:
  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t record_no_ = 0;
};

// Length of the well-formed sequence at p, or 0 with *skip set to the length of
// the maximal invalid subpart to replace.
std::size_t utf8_sequence_length(const unsigned char* p, std::size_t avail, std::size_t* skip) {
  const unsigned char c = p[0];
  *skip = 1;
  if (c < 0x80) return 1;
  std::size_t len = 0;
  unsigned char lo = 0x80;
  unsigned char hi = 0xBF;
  if (c >= 0xC2 && c <= 0xDF) {
    len = 2;
  } else if (c >= 0xE0 && c <= 0xEF) {
    len = 3;
    if (c == 0xE0) lo = 0xA0;
    if (c == 0xED) hi = 0x9F;
  } else if (c >= 0xF0 && c <= 0xF4) {
    len = 4;
    if (c == 0xF0) lo = 0x90;
    if (c == 0xF4) hi = 0x8F;
  } else {
    return 0;
  }
  for (std::size_t i = 1; i < len; ++i) {
    if (i >= avail) return 0;
    const unsigned char b = p[i];
    if (b < (i == 1 ? lo : 0x80) || b > (i == 1 ? hi : 0xBF)) return 0;
    *skip = i + 1;
  }
  return len;
}

std::string quote_csv(std::string_view field) {
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

bool Corpus::fully_labeled() const {
  return std::all_of(documents.begin(), documents.end(),
                     [](const Document& d) { return d.label.has_value(); });
}

std::size_t sanitize_utf8(std::string& text) {
  std::size_t replaced = 0;
  std::string out;
  std::size_t i = 0;
  bool changed = false;
  const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
  while (i < text.size()) {
    std::size_t skip = 1;
    const std::size_t len = utf8_sequence_length(bytes + i, text.size() - i, &skip);
    if (len == 0) {
      if (!changed) {
        out.assign(text, 0, i);
        changed = true;
      }
      out += "\xEF\xBF\xBD";
      ++replaced;
      i += skip;
      continue;
    }
    if (changed) out.append(text, i, len);
    i += len;
  }
  if (changed) text = std::move(out);
  return replaced;
}

std::uint64_t file_fingerprint(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

Corpus parse_csv(std::string_view content, const CsvSchema& schema,
                 const std::string& source) {
  std::string text(content);
  Corpus corpus;
  corpus.source_path = source;
  corpus.replaced_invalid_utf8 = sanitize_utf8(text);
  // Strip a UTF-8 byte-order mark.
  std::string_view view = text;
  if (view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);

  CsvReader reader(view, source);
  CsvRecord header;
  if (!reader.next(header)) {
    throw DataError(source + ": missing header row");
  }
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    column.emplace(header.fields[i], i);
  }
  auto find_column = [&](const std::string& name,
                         bool required) -> std::optional<std::size_t> {
    auto it = column.find(name);
    if (it == column.end()) {
      if (required) {
        throw DataError(source + ": missing required column '" + name + "'");
      }
      return std::nullopt;
    }
    return it->second;
  };
  const std::size_t id_col = *find_column(schema.id, true);
  const std::size_t title_col = *find_column(schema.title, true);
  const std::size_t author_col = *find_column(schema.author, true);
  const std::size_t text_col = *find_column(schema.text, true);
  const std::optional<std::size_t> label_col =
      find_column(schema.label, schema.require_label);

  CsvRecord record;
  while (reader.next(record)) {
    if (record.fields.size() != header.fields.size()) {
      reader.fail(record.line, "expected " + std::to_string(header.fields.size()) +
                                   " fields, found " +
                                   std::to_string(record.fields.size()));
    }
    Document doc;
    const std::string& id_text = record.fields[id_col];
    const auto [ptr, ec] =
        std::from_chars(id_text.data(), id_text.data() + id_text.size(), doc.id);
    if (ec != std::errc{} || ptr != id_text.data() + id_text.size()) {
      reader.fail(record.line, "id '" + id_text + "' is not an integer");
    }
    doc.title = std::move(record.fields[title_col]);
    doc.author = std::move(record.fields[author_col]);
    doc.body = std::move(record.fields[text_col]);
    if (label_col) {
      const std::string& label = record.fields[*label_col];
      if (label == "0") {
        doc.label = kReal;
      } else if (label == "1") {
        doc.label = kFake;
      } else if (!label.empty()) {
        reader.fail(record.line, "label '" + label + "' is not 0 or 1");
      }
    }
    if (doc.title.empty() && doc.author.empty() && doc.body.empty()) {
      ++corpus.dropped_empty_rows;
      continue;
    }
    if (doc.label) ++corpus.class_counts[*doc.label];
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

Corpus load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  if (!std::filesystem::exists(path)) {
    throw DataError("no such file: " + path.string());
  }
  return parse_csv(read_file(path), schema, path.string());
}

void write_csv(const std::filesystem::path& path,
               const std::vector<Document>& documents, const CsvSchema& schema) {
  std::string out;
  out += quote_csv(schema.id) + "," + quote_csv(schema.title) + "," +
         quote_csv(schema.author) + "," + quote_csv(schema.text) + "," +
         quote_csv(schema.label) + "\n";
  for (const Document& d : documents) {
    out += quote_csv(std::to_string(d.id));
    out += ',';
    out += quote_csv(d.title);
    out += ',';
    out += quote_csv(d.author);
    out += ',';
    out += quote_csv(d.body);
    out += ',';
    out += quote_csv(d.label ? std::to_string(*d.label) : std::string());
    out += '\n';
  }
  write_file_atomic(path, out);
}

SplitPlan stratified_split(const Corpus& corpus, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("split ratio must lie in (0,1), got " + std::to_string(ratio));
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    const auto& label = corpus.documents[i].label;
    if (!label) {
      throw DataError("cannot split: document " + std::to_string(corpus.documents[i].id) +
                      " (row " + std::to_string(i) + ") has no label");
    }
    by_class[*label].push_back(i);
  }

  SplitPlan plan;
  plan.ratio = ratio;
  plan.seed = seed;
  SplitMix64 rng(seed);
  for (auto& members : by_class) {
    fisher_yates(std::span<std::size_t>(members), rng);
    const auto n_test = static_cast<std::size_t>(
        std::llround((1.0 - ratio) * static_cast<double>(members.size())));
    plan.test_indices.insert(plan.test_indices.end(), members.begin(),
                             members.begin() + static_cast<std::ptrdiff_t>(n_test));
    plan.train_indices.insert(plan.train_indices.end(),
                              members.begin() + static_cast<std::ptrdiff_t>(n_test),
                              members.end());
  }
  std::sort(plan.train_indices.begin(), plan.train_indices.end());
  std::sort(plan.test_indices.begin(), plan.test_indices.end());
  return plan;
}

}  // namespace majvote
