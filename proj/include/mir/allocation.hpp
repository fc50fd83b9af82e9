#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mir/errors.hpp"
#include "mir/sets.hpp"

namespace mir {

// A disjoint assignment of items to bidders; owner[j] = -1 leaves item j
// unassigned. Disjointness is structural: one owner per item.
struct Allocation {
  int n = 0, m = 0;
  std::vector<std::int16_t> owner;

  Allocation() = default;
  Allocation(int n_, int m_) : n(n_), m(m_), owner(m_, -1) {}

  static Allocation grand_bundle(int n, int m, int bidder) {
    Allocation a(n, m);
    for (auto& o : a.owner) o = static_cast<std::int16_t>(bidder);
    return a;
  }

  ItemSet awarded(int bidder) const {
    ItemSet s;
    for (int j = 0; j < m; ++j)
      if (owner[j] == bidder) s.add(j);
    return s;
  }

  void award(int bidder, ItemSet s) {
    require_within(s, m, "award");
    if (bidder < 0 || bidder >= n) throw MalformedInputError("award: bidder out of range");
    for (int j : s.items()) {
      if (owner[j] != -1) throw MalformedInputError("award: item already assigned");
      owner[j] = static_cast<std::int16_t>(bidder);
    }
  }

  bool all_unassigned() const {
    for (auto o : owner)
      if (o != -1) return false;
    return true;
  }

  // The bidder holding every item, or -1 if this is not a grand bundle.
  int grand_bundle_owner() const {
    if (m == 0 || owner[0] < 0) return -1;
    for (auto o : owner)
      if (o != owner[0]) return -1;
    return owner[0];
  }

  Allocation restricted(ItemSet keep) const {
    Allocation a(n, m);
    for (int j = 0; j < m; ++j)
      if (keep.has(j)) a.owner[j] = owner[j];
    return a;
  }

  bool operator==(const Allocation&) const = default;

  std::string to_string() const {
    std::string s = "(";
    for (int i = 0; i < n; ++i) {
      if (i) s += ", ";
      s += awarded(i).to_string();
    }
    return s + ")";
  }
};

// Fixed valuation-independent order used everywhere ties are broken:
// lexicographic over the item -> bidder encoding, unassigned sorting last.
inline bool alloc_lex_less(const Allocation& a, const Allocation& b) {
  for (int j = 0; j < a.m; ++j) {
    int x = a.owner[j] < 0 ? a.n : a.owner[j];
    int y = b.owner[j] < 0 ? b.n : b.owner[j];
    if (x != y) return x < y;
  }
  return false;
}

struct AllocationHash {
  std::size_t operator()(const Allocation& a) const {
    std::size_t h = 1469598103934665603ull;
    for (auto o : a.owner) {
      h ^= static_cast<std::size_t>(o + 1);
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace mir
