#pragma once

#include <cstdint>
#include <random>

namespace mir {

// Deterministic generator for everything randomized. mt19937_64's output
// stream is pinned by the standard, and the bounded draw below avoids the
// implementation-defined std::uniform_int_distribution, so equal seeds give
// bit-identical results everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform draw from {0, ..., n-1} by rejection.
  std::uint32_t below(std::uint32_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return static_cast<std::uint32_t>(x % n);
  }

  // Uniform in [lo, hi] inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint32_t>(hi - lo + 1)));
  }

  // Derive an independent stream, e.g. one per (partition index, bucket).
  std::uint64_t fork() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mir
