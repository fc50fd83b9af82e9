#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mir/allocation.hpp"
#include "mir/errors.hpp"
#include "mir/rng.hpp"
#include "mir/sets.hpp"
#include "mir/valuation.hpp"

namespace mir {

// Labeling of the m items into t chunks (chunks may be empty).
struct Partition {
  int m = 0, t = 0;
  std::vector<std::uint8_t> labels;

  Partition() = default;
  Partition(int m_, int t_) : m(m_), t(t_), labels(m_, 0) {}

  std::vector<ItemSet> chunks() const {
    std::vector<ItemSet> out(t);
    for (int j = 0; j < m; ++j) out[labels[j]].add(j);
    return out;
  }

  ItemSet chunk(int s) const {
    ItemSet out;
    for (int j = 0; j < m; ++j)
      if (labels[j] == s) out.add(j);
    return out;
  }

  // True iff no chunk holds two items of s.
  bool itemizes(ItemSet s) const {
    std::uint64_t seen = 0;
    for (int j : s.items()) {
      const std::uint64_t bit = std::uint64_t{1} << labels[j];
      if (seen & bit) return false;
      seen |= bit;
    }
    return true;
  }

  bool operator==(const Partition&) const = default;
};

inline Partition sample_partition(int m, int t, Rng& rng) {
  if (t < 1) throw MalformedInputError("sample_partition: t must be >= 1");
  if (t > 64) throw ScaleRefusedError("sample_partition: t > 64");
  Partition p(m, t);
  for (int j = 0; j < m; ++j) p.labels[j] = static_cast<std::uint8_t>(rng.below(t));
  return p;
}

inline Partition sample_partition(int m, int t, std::uint64_t seed) {
  Rng rng(seed);
  return sample_partition(m, t, rng);
}

// Deterministic near-equal chunks (sizes differ by at most one) for callers
// that need a fixed balanced partition when t does not divide m.
inline Partition round_robin_partition(int m, int t) {
  if (t < 1) throw MalformedInputError("round_robin_partition: t must be >= 1");
  Partition p(m, t);
  for (int j = 0; j < m; ++j) p.labels[j] = static_cast<std::uint8_t>(j % t);
  return p;
}

enum class Certificate { none, r_itemizing, regular };

struct PartitionList {
  int m = 0, t = 0;
  std::vector<Partition> parts;
  Certificate cert = Certificate::none;
  int cert_r = 0;
  std::uint64_t seed = 0;
  // Samples drawn by the search that produced this list (not serialized).
  int samples_drawn = 0;

  int z() const { return static_cast<int>(parts.size()); }
};

inline std::string cert_tag(const PartitionList& l) {
  switch (l.cert) {
    case Certificate::none: return "none";
    case Certificate::r_itemizing: return "r-itemizing:" + std::to_string(l.cert_r);
    case Certificate::regular: return "regular";
  }
  return "none";
}

inline void write_partition_list(std::ostream& os, const PartitionList& l) {
  os << "m=" << l.m << " t=" << l.t << " z=" << l.z() << " cert=" << cert_tag(l)
     << " seed=" << l.seed << "\n";
  for (const auto& p : l.parts) {
    for (int j = 0; j < p.m; ++j) {
      if (j) os << ",";
      os << static_cast<int>(p.labels[j]);
    }
    os << "\n";
  }
}

inline PartitionList read_partition_list(std::istream& is) {
  PartitionList l;
  std::string header;
  if (!std::getline(is, header))
    throw MalformedInputError("partition list: missing header");
  int z = 0;
  std::string cert;
  {
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw MalformedInputError("partition list: bad header token: " + tok);
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "m") l.m = std::stoi(val);
      else if (key == "t") l.t = std::stoi(val);
      else if (key == "z") z = std::stoi(val);
      else if (key == "cert") cert = val;
      else if (key == "seed") l.seed = std::stoull(val);
      else throw MalformedInputError("partition list: unknown header key: " + key);
    }
  }
  if (cert == "none" || cert.empty()) {
    l.cert = Certificate::none;
  } else if (cert.rfind("r-itemizing:", 0) == 0) {
    l.cert = Certificate::r_itemizing;
    l.cert_r = std::stoi(cert.substr(12));
  } else if (cert == "regular") {
    l.cert = Certificate::regular;
  } else {
    throw MalformedInputError("partition list: unknown cert tag: " + cert);
  }
  for (int i = 0; i < z; ++i) {
    std::string line;
    if (!std::getline(is, line))
      throw MalformedInputError("partition list: fewer lines than z");
    Partition p(l.m, l.t);
    std::istringstream ls(line);
    std::string cell;
    for (int j = 0; j < l.m; ++j) {
      if (!std::getline(ls, cell, ','))
        throw MalformedInputError("partition list: short label row");
      int lab = std::stoi(cell);
      if (lab < 0 || lab >= l.t)
        throw MalformedInputError("partition list: label out of range");
      p.labels[j] = static_cast<std::uint8_t>(lab);
    }
    l.parts.push_back(std::move(p));
  }
  return l;
}

// Exhaustively checks all item sets of size exactly min(r, m): a partition
// itemizing a set itemizes every subset, so size-r coverage implies coverage
// of all smaller sizes. Sets the certificate on success.
inline bool certify_r_itemizing(PartitionList& l, int r,
                                std::uint64_t budget = 10'000'000) {
  if (r < 0) throw MalformedInputError("certify_r_itemizing: negative r");
  const int r_eff = std::min(r, l.m);
  if (binomial(l.m, r_eff) > budget)
    throw ScaleRefusedError("certify_r_itemizing: combination count over budget");
  if (r_eff > 0) {
    if (l.parts.empty()) return false;
    for (std::uint64_t s = first_combination(r_eff);;) {
      bool covered = false;
      for (const auto& p : l.parts)
        if (p.itemizes(ItemSet(s))) {
          covered = true;
          break;
        }
      if (!covered) return false;
      if (!next_combination(s, l.m)) break;
    }
  }
  l.cert = Certificate::r_itemizing;
  l.cert_r = r;
  return true;
}

// Samples uniform partitions until every size-r set is itemized by some kept
// partition. A sample is kept only when it covers a still-uncovered set, so
// the returned list stays near the covering number rather than the raw
// rejection count; z_max caps total samples drawn. The kept list is
// re-certified from scratch before being returned.
inline PartitionList find_r_itemizing(int m, int t, int r, int z_max,
                                      std::uint64_t seed) {
  if (t < 1) throw MalformedInputError("find_r_itemizing: t must be >= 1");
  if (z_max < 1) throw MalformedInputError("find_r_itemizing: z_max must be >= 1");
  const int r_eff = std::min(r, m);
  PartitionList l;
  l.m = m;
  l.t = t;
  l.seed = seed;
  Rng rng(seed);
  if (r_eff > t)
    throw SearchFailedError(
        "find_r_itemizing: " + std::to_string(t) + " chunks cannot itemize " +
            std::to_string(r_eff) + " items",
        first_combination(r_eff));

  std::vector<std::uint64_t> uncovered;
  if (r_eff > 0) {
    if (binomial(m, r_eff) > 50'000'000)
      throw ScaleRefusedError("find_r_itemizing: combination count over budget");
    for (std::uint64_t s = first_combination(r_eff);;) {
      uncovered.push_back(s);
      if (!next_combination(s, m)) break;
    }
  }

  while (!uncovered.empty()) {
    if (l.samples_drawn >= z_max)
      throw SearchFailedError("find_r_itemizing: z_max=" + std::to_string(z_max) +
                                  " samples exhausted, " +
                                  std::to_string(uncovered.size()) + " sets uncovered",
                              uncovered.front());
    Partition p = sample_partition(m, t, rng);
    ++l.samples_drawn;
    bool progress = false;
    for (std::size_t i = 0; i < uncovered.size();) {
      if (p.itemizes(ItemSet(uncovered[i]))) {
        uncovered[i] = uncovered.back();
        uncovered.pop_back();
        progress = true;
      } else {
        ++i;
      }
    }
    if (progress) l.parts.push_back(std::move(p));
  }
  if (l.parts.empty()) {
    // r <= 1: any single partition certifies.
    l.parts.push_back(sample_partition(m, t, rng));
    ++l.samples_drawn;
  }
  certify_r_itemizing(l, r);
  return l;
}

// Regularity of one chunking against a (possibly incomplete) bucket partition:
// every light bucket (|B_s| <= c1*m/t) meets every chunk in at most c2*m/t^2
// items. Threshold comparisons are exact integer arithmetic.
inline bool is_regular(const Partition& b, const std::vector<ItemSet>& buckets,
                       int c1, int c2) {
  if (c1 <= 0 || c2 <= 0) throw MalformedInputError("is_regular: constants must be > 0");
  if (static_cast<int>(buckets.size()) > b.t)
    throw MalformedInputError("is_regular: more buckets than chunks");
  const auto chunks = b.chunks();
  const std::int64_t m = b.m, t = b.t;
  for (const ItemSet& bucket : buckets) {
    if (std::int64_t{bucket.count()} * t > std::int64_t{c1} * m) continue;  // heavy: exempt
    for (const ItemSet& chunk : chunks)
      if (std::int64_t{(chunk & bucket).count()} * t * t > std::int64_t{c2} * m)
        return false;
  }
  return true;
}

// z uniform chunkings; regularity is checked lazily per instance against the
// realized optimal buckets, never certified over the exponential universe.
inline PartitionList find_regular_list(int m, int t, int z, std::uint64_t seed) {
  if (t < 1) throw MalformedInputError("find_regular_list: t must be >= 1");
  PartitionList l;
  l.m = m;
  l.t = t;
  l.seed = seed;
  Rng rng(seed);
  for (int i = 0; i < z; ++i) l.parts.push_back(sample_partition(m, t, rng));
  return l;
}

// Labeling of the n bidders into t buckets.
struct BidderBucketing {
  int n = 0, t = 0;
  std::vector<std::uint8_t> labels;

  BidderBucketing() = default;
  BidderBucketing(int n_, int t_) : n(n_), t(t_), labels(n_, 0) {}

  BidderSet bucket(int s) const {
    BidderSet out;
    for (int i = 0; i < n; ++i)
      if (labels[i] == s) out.add(i);
    return out;
  }

  BidderBucketing shifted(int delta) const {
    BidderBucketing p(n, t);
    for (int i = 0; i < n; ++i)
      p.labels[i] = static_cast<std::uint8_t>((labels[i] + delta) % t);
    return p;
  }

  bool operator==(const BidderBucketing&) const = default;
};

inline std::vector<BidderBucketing> sample_balanced_bucketings(int n, int t, int y,
                                                               std::uint64_t seed) {
  if (t < 1) throw MalformedInputError("sample_balanced_bucketings: t must be >= 1");
  Rng rng(seed);
  std::vector<BidderBucketing> out;
  out.reserve(y);
  for (int x = 0; x < y; ++x) {
    BidderBucketing p(n, t);
    for (int i = 0; i < n; ++i) p.labels[i] = static_cast<std::uint8_t>(rng.below(t));
    out.push_back(std::move(p));
  }
  return out;
}

// Balance of one bidder bucketing for a profile, evaluated under a fixed
// optimal allocation. N1 holds bidders with small optimal awards; buckets
// whose N1 awards stay below c_bal*m/t are light, and the report compares the
// welfare captured by light-bucket bidders against all of N1.
struct BalanceReport {
  BidderSet n1;       // |A*_i| <= m/t
  ItemSet light;      // light buckets S_P (bucket indices)
  BidderSet n_p;      // N1 bidders living in light buckets
  Value opt_n1 = 0;   // OPT(v, N1) under the fixed A*
  Value opt_np = 0;   // OPT(v, N_P) under the fixed A*
  double ratio = 1.0;

  bool balanced(int c_bal_ratio) const {
    return opt_n1 == 0 || opt_np * Value{c_bal_ratio} >= opt_n1;
  }
};

inline BalanceReport balance_report(const BidderBucketing& p, const Profile& profile,
                                    const Allocation& a_star, int c_bal) {
  if (c_bal <= 0) throw MalformedInputError("balance_report: c_bal must be > 0");
  if (a_star.n != profile.n() || a_star.m != profile.m || p.n != profile.n())
    throw MalformedInputError("balance_report: mismatched instance");
  if (p.t > 64) throw ScaleRefusedError("balance_report: t > 64");
  const std::int64_t m = profile.m, t = p.t;

  BalanceReport rep;
  std::vector<ItemSet> awards(profile.n());
  for (int i = 0; i < profile.n(); ++i) {
    awards[i] = a_star.awarded(i);
    if (std::int64_t{awards[i].count()} * t <= m) rep.n1.add(i);
  }
  for (int s = 0; s < p.t; ++s) {
    ItemSet b_star;
    for (int i : (p.bucket(s) & rep.n1).items()) b_star |= awards[i];
    if (std::int64_t{b_star.count()} * t <= std::int64_t{c_bal} * m) {
      rep.light.add(s);
      rep.n_p |= p.bucket(s) & rep.n1;
    }
  }
  for (int i : rep.n1.items()) {
    const Value w = profile.bidders[i].value(awards[i]);
    rep.opt_n1 += w;
    if (rep.n_p.has(i)) rep.opt_np += w;
  }
  rep.ratio = rep.opt_n1 == 0 ? 1.0
                              : static_cast<double>(rep.opt_np) /
                                    static_cast<double>(rep.opt_n1);
  return rep;
}

}  // namespace mir
