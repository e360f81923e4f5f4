#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace confset {

struct RandomSeed {
  std::uint64_t value = 0;
};

// splitmix64 finalizer; also used as the deterministic hash behind score jitter.
std::uint64_t mix64(std::uint64_t x);

// Seeded generator wrapping std::mt19937_64. Normal deviates use an explicit
// Box-Muller transform instead of std::normal_distribution, whose output is
// not pinned by the standard; every draw here is bit-reproducible per seed.
class Rng {
 public:
  explicit Rng(RandomSeed seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform01();

  // Uniform in {0, ..., bound-1}, bias-free via rejection.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal deviate (Box-Muller, one cached spare per pair).
  double normal();

  // Independent child stream; depends only on the root seed and the stream
  // index, so parallel lanes stay reproducible at any lane count.
  Rng derive(std::uint64_t stream) const;

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  RandomSeed seed() const { return seed_; }

 private:
  RandomSeed seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace confset
