#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "mir/detail/exact_lp.hpp"
#include "mir/errors.hpp"
#include "mir/sets.hpp"

namespace mir {

// A monotone valuation oracle over 2^{[m]}. Values are integers over the
// instance's declared denominator; almost-single-minded valuations use
// denominator m^3 so the |S|/m^3 term stays exact.
class Valuation {
 public:
  enum class Kind {
    additive,
    coverage,
    xos,
    mild_desires,
    almost_single_minded,
    induced_single_minded,
    explicit_table,
  };

  static Valuation additive(int m, std::vector<Value> weights) {
    Valuation v(Kind::additive, m);
    if (static_cast<int>(weights.size()) != m)
      throw MalformedInputError("additive: need one weight per item");
    for (Value w : weights)
      if (w < 0) throw MalformedInputError("additive: negative weight");
    v.weights_ = std::move(weights);
    return v;
  }

  // Weighted coverage: item j covers the universe elements in covers[j];
  // v(S) is the total weight covered. Monotone and submodular by construction.
  static Valuation coverage(int m, std::vector<Value> element_weights,
                            std::vector<std::uint64_t> covers) {
    Valuation v(Kind::coverage, m);
    if (static_cast<int>(covers.size()) != m)
      throw MalformedInputError("coverage: need one cover set per item");
    if (element_weights.size() > 64)
      throw MalformedInputError("coverage: universe larger than 64");
    for (Value w : element_weights)
      if (w < 0) throw MalformedInputError("coverage: negative element weight");
    std::uint64_t universe = element_weights.size() >= 64
                                 ? ~std::uint64_t{0}
                                 : (std::uint64_t{1} << element_weights.size()) - 1;
    for (std::uint64_t c : covers)
      if ((c & ~universe) != 0)
        throw MalformedInputError("coverage: cover outside universe");
    v.element_weights_ = std::move(element_weights);
    v.covers_ = std::move(covers);
    return v;
  }

  // Max over additive clauses.
  static Valuation xos(int m, std::vector<std::vector<Value>> clauses) {
    Valuation v(Kind::xos, m);
    if (clauses.empty()) throw MalformedInputError("xos: need at least one clause");
    for (const auto& c : clauses) {
      if (static_cast<int>(c.size()) != m)
        throw MalformedInputError("xos: clause length must equal m");
      for (Value w : c)
        if (w < 0) throw MalformedInputError("xos: negative clause weight");
    }
    v.clauses_ = std::move(clauses);
    return v;
  }

  // v(G) = 2|G| below the target size a, 2|G| - [G not desired] at size a,
  // and 2a above. The bidder is satisfied exactly when v(G) = 2a.
  static Valuation mild_desires(int m, int a, std::vector<ItemSet> family) {
    Valuation v(Kind::mild_desires, m);
    if (family.empty()) throw MalformedInputError("mild_desires: empty family");
    if (a < 0 || a > m) throw MalformedInputError("mild_desires: bad target size");
    for (ItemSet f : family) {
      require_within(f, m, "mild_desires family member");
      if (f.count() != a)
        throw MalformedInputError("mild_desires: family member of size != a");
    }
    v.a_ = a;
    v.family_ = std::move(family);
    return v;
  }

  // v(S) = 1_{target ⊆ S} + |S|/m^3, scaled to integers by m^3.
  static Valuation almost_single_minded(int m, ItemSet target) {
    Valuation v(Kind::almost_single_minded, m);
    require_within(target, m, "almost_single_minded target");
    if (target.empty())
      throw MalformedInputError("almost_single_minded: empty target would make v({}) > 0");
    v.target_ = target;
    return v;
  }

  // v(R) = 1_{R ⊇ target}. target = {} gives the constant-1 valuation.
  static Valuation induced_single_minded(int m, ItemSet target) {
    Valuation v(Kind::induced_single_minded, m);
    require_within(target, m, "induced_single_minded target");
    v.target_ = target;
    return v;
  }

  // Dense table of length 2^m; validated monotone with v({}) = 0.
  static Valuation explicit_table(int m, std::vector<Value> table) {
    Valuation v(Kind::explicit_table, m);
    if (m > 24) throw ScaleRefusedError("explicit_table: m too large for a dense table");
    if (table.size() != (std::size_t{1} << m))
      throw MalformedInputError("explicit_table: table length must be 2^m");
    if (table[0] != 0) throw MalformedInputError("explicit_table: v({}) must be 0");
    for (std::uint64_t s = 0; s < table.size(); ++s) {
      if (table[s] < 0) throw MalformedInputError("explicit_table: negative value");
      for (int j = 0; j < m; ++j)
        if (!((s >> j) & 1) && table[s | (std::uint64_t{1} << j)] < table[s])
          throw MalformedInputError("explicit_table: not monotone");
    }
    v.table_ = std::move(table);
    return v;
  }

  static Valuation zero(int m) { return additive(m, std::vector<Value>(m, 0)); }

  Value value(ItemSet s) const {
    require_within(s, m_, "value query");
    switch (kind_) {
      case Kind::additive: {
        Value out = 0;
        for (std::uint64_t b = s.bits; b; b &= b - 1) out += weights_[std::countr_zero(b)];
        return out;
      }
      case Kind::coverage: {
        std::uint64_t covered = 0;
        for (std::uint64_t b = s.bits; b; b &= b - 1) covered |= covers_[std::countr_zero(b)];
        Value out = 0;
        for (std::uint64_t b = covered; b; b &= b - 1)
          out += element_weights_[std::countr_zero(b)];
        return out;
      }
      case Kind::xos: {
        Value best = 0;
        for (const auto& c : clauses_) {
          Value cur = 0;
          for (std::uint64_t b = s.bits; b; b &= b - 1) cur += c[std::countr_zero(b)];
          best = std::max(best, cur);
        }
        return best;
      }
      case Kind::mild_desires: {
        int g = s.count();
        if (g < a_) return 2 * Value{g};
        if (g > a_) return 2 * Value{a_};
        bool desired = std::find(family_.begin(), family_.end(), s) != family_.end();
        return 2 * Value{g} - (desired ? 0 : 1);
      }
      case Kind::almost_single_minded: {
        Value m3 = Value{m_} * m_ * m_;
        return (target_.subset_of(s) ? m3 : 0) + s.count();
      }
      case Kind::induced_single_minded:
        return target_.subset_of(s) ? 1 : 0;
      case Kind::explicit_table:
        return table_[s.bits];
    }
    return 0;
  }

  int m() const { return m_; }
  Kind kind() const { return kind_; }

  const std::vector<Value>& weights() const { return weights_; }
  const std::vector<Value>& element_weights() const { return element_weights_; }
  const std::vector<std::uint64_t>& covers() const { return covers_; }
  const std::vector<std::vector<Value>>& clauses() const { return clauses_; }
  const std::vector<Value>& table() const { return table_; }
  const std::vector<ItemSet>& family() const { return family_; }
  ItemSet target() const { return target_; }
  int target_size() const { return a_; }

 private:
  Valuation(Kind kind, int m) : kind_(kind), m_(m) {
    if (m < 0 || m > 64) throw MalformedInputError("valuation: m out of range");
  }

  Kind kind_;
  int m_;
  std::vector<Value> weights_;
  std::vector<Value> element_weights_;
  std::vector<std::uint64_t> covers_;
  std::vector<std::vector<Value>> clauses_;
  std::vector<Value> table_;
  std::vector<ItemSet> family_;
  ItemSet target_;
  int a_ = 0;
};

inline bool mild_desires_satisfied(const Valuation& v, ItemSet g) {
  return v.value(g) == 2 * Value{v.target_size()};
}

// Counts distinct value queries per bidder; repeats are free, matching the
// simultaneous-query model. One ledger per mechanism run.
class QueryLedger {
 public:
  explicit QueryLedger(int n) : seen_(n) {}

  void record(int bidder, ItemSet s) { seen_[bidder].insert(s.bits); }

  std::uint64_t count(int bidder) const { return seen_[bidder].size(); }

  std::vector<std::uint64_t> counts() const {
    std::vector<std::uint64_t> out;
    out.reserve(seen_.size());
    for (const auto& s : seen_) out.push_back(s.size());
    return out;
  }

 private:
  std::vector<std::unordered_set<std::uint64_t>> seen_;
};

// One auction instance: n bidders over m items, values in units of
// 1/denominator.
struct Profile {
  int m = 0;
  Value denominator = 1;
  std::vector<Valuation> bidders;

  int n() const { return static_cast<int>(bidders.size()); }

  Value query(int bidder, ItemSet s, QueryLedger* ledger = nullptr) const {
    if (ledger) ledger->record(bidder, s);
    return bidders[bidder].value(s);
  }
};

enum class ValClass { monotone, subadditive, submodular, xos };

namespace detail {

inline std::vector<Value> value_table(const Valuation& v) {
  const std::uint64_t size = std::uint64_t{1} << v.m();
  std::vector<Value> t(size);
  for (std::uint64_t s = 0; s < size; ++s) t[s] = v.value(ItemSet(s));
  return t;
}

// Is there an additive clause u >= 0 with u(T) <= v(T) for all T ⊆ S and
// u(S) = v(S)? v is XOS iff this holds for every S.
inline bool xos_clause_exists(const std::vector<Value>& t, ItemSet s) {
  const auto items = s.items();
  const int q = static_cast<int>(items.size());
  if (q == 0) return t[0] == 0;
  std::vector<std::vector<std::int64_t>> a;
  std::vector<std::int64_t> b;
  for (std::uint64_t sub = s.bits; sub; sub = (sub - 1) & s.bits) {
    std::vector<std::int64_t> row(q, 0);
    for (int idx = 0; idx < q; ++idx)
      if ((sub >> items[idx]) & 1) row[idx] = 1;
    a.push_back(std::move(row));
    b.push_back(t[sub]);
  }
  return maximize_sum(a, b, q) == Rational(t[s.bits]);
}

}  // namespace detail

// Exhaustive membership check for the named valuation class. Scale-guarded:
// monotone/subadditive/submodular up to m = 16, XOS up to m = 8 (the clause
// search is an exact rational LP per set).
inline bool check_class(const Valuation& v, ValClass cls) {
  const int m = v.m();
  if (m > 16) throw ScaleRefusedError("check_class: m > 16");
  if (cls == ValClass::xos && m > 8)
    throw ScaleRefusedError("check_class: exact XOS search limited to m <= 8");

  const auto t = detail::value_table(v);
  const std::uint64_t size = std::uint64_t{1} << m;

  switch (cls) {
    case ValClass::monotone:
      for (std::uint64_t s = 0; s < size; ++s)
        for (int j = 0; j < m; ++j)
          if (!((s >> j) & 1) && t[s | (std::uint64_t{1} << j)] < t[s]) return false;
      return true;

    case ValClass::subadditive:
      // Disjoint pairs suffice: overlapping ones follow by monotonicity.
      for (std::uint64_t s = 0; s < size; ++s) {
        const std::uint64_t comp = (size - 1) & ~s;
        for (std::uint64_t u = comp;; u = (u - 1) & comp) {
          if (t[s | u] > t[s] + t[u]) return false;
          if (u == 0) break;
        }
      }
      return true;

    case ValClass::submodular:
      // Local form: marginals of j may not grow when one more element i is
      // present; chaining single removals recovers the full S ⊆ T condition.
      for (std::uint64_t s = 0; s < size; ++s)
        for (int j = 0; j < m; ++j) {
          if ((s >> j) & 1) continue;
          const std::uint64_t sj = s | (std::uint64_t{1} << j);
          for (int i = 0; i < m; ++i) {
            if (i == j || !((s >> i) & 1)) continue;
            const std::uint64_t si = s & ~(std::uint64_t{1} << i);
            if (t[sj] - t[s] > t[sj & ~(std::uint64_t{1} << i)] - t[si]) return false;
          }
        }
      return true;

    case ValClass::xos:
      for (std::uint64_t s = 0; s < size; ++s)
        if (!detail::xos_clause_exists(t, ItemSet(s))) return false;
      return true;
  }
  return false;
}

}  // namespace mir
