#pragma once

// Model bundle: everything needed to reproduce predictions, in one
// checksummed binary file.
//
// Layout (all integers little-endian):
//   magic "MJVB" | u32 format version | u64 payload length | u32 crc32(payload)
//   payload = sequence of sections: 4-byte tag | u64 length | body
// Reals are IEEE-754 binary64, little-endian.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "majvote/config.hpp"
#include "majvote/ensemble.hpp"
#include "majvote/vectorize.hpp"

namespace majvote {

inline constexpr std::uint32_t kBundleFormatVersion = 1;
inline constexpr std::string_view kBundleMagic = "MJVB";
/// Offset of the version field, for tests that tamper with it.
inline constexpr std::size_t kBundleVersionOffset = 4;
inline constexpr std::size_t kBundleHeaderSize = 20;

struct BundleMetadata {
  std::string created_utc;  // ISO-8601
  std::string tool_version;
  std::string corpus_path;
  std::uint64_t corpus_fingerprint = 0;
  std::uint64_t corpus_size = 0;
  std::uint64_t seed = 0;
  double ratio = 0.0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

struct ModelBundle {
  PipelineConfig config;
  BundleMetadata metadata;
  Vocabulary vocabulary;
  IdfTable idf;
  /// Every trained learner in reporting order, with its feature kind and
  /// training score range.
  std::vector<EnsembleMember> learners;
  /// Voting members; they share the learners' model objects.
  Ensemble ensemble;

  const EnsembleMember* find(Family family) const;
};

std::string serialize_bundle(const ModelBundle& bundle);
/// Checks magic and version before anything else, then the length and
/// checksum. Throws BundleError.
ModelBundle deserialize_bundle(std::string_view bytes);

/// Atomic write. Throws BundleError.
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace majvote
