#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "mir/errors.hpp"

namespace mir {

// All values are nonnegative integers over a per-instance denominator, so
// welfare comparisons and VCG payments stay exact.
using Value = std::int64_t;

// A subset of the ground set {0, ..., m-1}, m <= 64. Used both for item sets
// and for bidder sets.
struct ItemSet {
  std::uint64_t bits = 0;

  constexpr ItemSet() = default;
  constexpr explicit ItemSet(std::uint64_t b) : bits(b) {}

  static constexpr ItemSet single(int j) { return ItemSet(std::uint64_t{1} << j); }
  static constexpr ItemSet full(int m) {
    return ItemSet(m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1);
  }

  constexpr bool has(int j) const { return (bits >> j) & 1; }
  constexpr void add(int j) { bits |= std::uint64_t{1} << j; }
  constexpr void remove(int j) { bits &= ~(std::uint64_t{1} << j); }

  constexpr int count() const { return std::popcount(bits); }
  constexpr bool empty() const { return bits == 0; }
  constexpr bool subset_of(ItemSet o) const { return (bits & ~o.bits) == 0; }
  constexpr bool intersects(ItemSet o) const { return (bits & o.bits) != 0; }
  constexpr int lowest() const { return std::countr_zero(bits); }

  constexpr ItemSet operator|(ItemSet o) const { return ItemSet(bits | o.bits); }
  constexpr ItemSet operator&(ItemSet o) const { return ItemSet(bits & o.bits); }
  constexpr ItemSet operator-(ItemSet o) const { return ItemSet(bits & ~o.bits); }
  constexpr ItemSet& operator|=(ItemSet o) { bits |= o.bits; return *this; }
  constexpr ItemSet& operator&=(ItemSet o) { bits &= o.bits; return *this; }
  constexpr bool operator==(const ItemSet&) const = default;
  constexpr bool operator<(ItemSet o) const { return bits < o.bits; }

  std::vector<int> items() const {
    std::vector<int> out;
    for (std::uint64_t b = bits; b; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int j : items()) {
      if (!first) s += ",";
      s += std::to_string(j);
      first = false;
    }
    return s + "}";
  }
};

using BidderSet = ItemSet;

inline ItemSet make_set(std::initializer_list<int> js) {
  ItemSet s;
  for (int j : js) s.add(j);
  return s;
}

inline void require_within(ItemSet s, int m, const char* what) {
  if (!s.subset_of(ItemSet::full(m)))
    throw MalformedInputError(std::string(what) + ": index out of range for m=" +
                              std::to_string(m));
}

// Gosper's hack: next subset of {0,...,m-1} with the same popcount.
// Returns false once the combination space is exhausted.
inline bool next_combination(std::uint64_t& x, int m) {
  if (x == 0) return false;
  std::uint64_t c = x & (~x + 1);
  std::uint64_t r = x + c;
  x = (((r ^ x) >> 2) / c) | r;
  return x < (std::uint64_t{1} << m);
}

inline std::uint64_t first_combination(int r) { return (std::uint64_t{1} << r) - 1; }

// Number of r-subsets of an m-set, saturating instead of overflowing.
inline std::uint64_t binomial(int m, int r) {
  if (r < 0 || r > m) return 0;
  if (r > m - r) r = m - r;
  std::uint64_t out = 1;
  for (int i = 1; i <= r; ++i) {
    if (out > (std::uint64_t{1} << 62) / m) return ~std::uint64_t{0};
    out = out * (m - r + i) / i;
  }
  return out;
}

}  // namespace mir
