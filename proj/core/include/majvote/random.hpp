#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace majvote {

/// splitmix64 generator. All randomness in the library flows through this type
/// so a run is reproducible from its seed alone, independent of the standard
/// library's distribution implementations.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t operator()() noexcept { return next(); }
  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

  /// Integer in [0, bound). Plain modulo reduction; the bias is below 2^-40
  /// for every bound this library uses and keeps the mapping trivially
  /// portable.
  std::uint64_t below(std::uint64_t bound) noexcept { return next() % bound; }

  /// Double in [0, 1) built from the top 53 bits.
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Double in [lo, hi).
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

 private:
  std::uint64_t state_;
};

/// In-place Fisher-Yates shuffle: for i = n-1 down to 1, swap a[i] with
/// a[next() % (i+1)].
template <typename T>
void fisher_yates(std::span<T> items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

/// Derives an independent seed for a sub-task (tree t of a forest, ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  return mix.next();
}

}  // namespace majvote
