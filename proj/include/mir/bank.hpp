#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "mir/allocation.hpp"
#include "mir/config.hpp"
#include "mir/errors.hpp"
#include "mir/partition.hpp"
#include "mir/rng.hpp"
#include "mir/sets.hpp"

namespace mir {

// Number of buckets for the subadditive mechanisms: floor(sqrt(m/k)/2),
// computed exactly as the largest t with 4*t^2*k <= m.
inline int bucket_count(int m, int k) {
  int t = 0;
  while (std::int64_t{4} * (t + 1) * (t + 1) * k <= m) ++t;
  return t;
}

// Build a Partition over bucket-local indices from chunk sets given in global
// item ids. bucket_items must be sorted ascending.
inline Partition local_partition_from_chunks(const std::vector<int>& bucket_items,
                                             const std::vector<ItemSet>& chunk_sets) {
  Partition p(static_cast<int>(bucket_items.size()),
              static_cast<int>(chunk_sets.size()));
  for (int local = 0; local < p.m; ++local) {
    int lab = -1;
    for (int c = 0; c < p.t; ++c)
      if (chunk_sets[c].has(bucket_items[local])) {
        if (lab >= 0) throw MalformedInputError("chunk sets overlap");
        lab = c;
      }
    if (lab < 0) throw MalformedInputError("chunk sets do not cover the bucket");
    p.labels[local] = static_cast<std::uint8_t>(lab);
  }
  return p;
}

// Two-level structure behind the subadditive mechanisms: an outer list of
// bucketings of the items, and for every (bucketing, bucket) an itemizing
// list of chunkings of that bucket (stored over bucket-local indices).
struct BucketShatteringParams {
  int m = 0, k = 0, t = 0;
  std::uint64_t seed = 0;
  PartitionList outer;
  std::vector<std::vector<PartitionList>> inner;        // [l][s]
  std::vector<std::vector<std::vector<int>>> bucket_items;  // [l][s], sorted

  int z() const { return outer.z(); }

  ItemSet bucket_mask(int l, int s) const {
    ItemSet out;
    for (int j : bucket_items[l][s]) out.add(j);
    return out;
  }

  // Chunks of inner partition idx of bucket (l, s), as global item masks.
  std::vector<ItemSet> global_chunks(int l, int s, int idx) const {
    const Partition& p = inner[l][s].parts[idx];
    std::vector<ItemSet> out(p.t);
    for (int local = 0; local < p.m; ++local)
      out[p.labels[local]].add(bucket_items[l][s][local]);
    return out;
  }

  static BucketShatteringParams build(int m, int k, std::uint64_t seed,
                                      const Config& cfg = {}) {
    if (k < 1) throw MalformedInputError("bucket shattering: k must be >= 1");
    BucketShatteringParams bs;
    bs.m = m;
    bs.k = k;
    bs.t = bucket_count(m, k);
    bs.seed = seed;
    if (bs.t < 1)
      throw MalformedInputError("bucket shattering: m < 4k leaves no bucket");
    Rng rng(seed);
    const int z = cfg.regular_z > 0 ? cfg.regular_z : m;
    bs.outer = find_regular_list(m, bs.t, z, rng.fork());
    bs.inner.resize(bs.outer.z());
    bs.bucket_items.resize(bs.outer.z());
    for (int l = 0; l < bs.outer.z(); ++l) {
      bs.inner[l].resize(bs.t);
      bs.bucket_items[l].resize(bs.t);
      for (int s = 0; s < bs.t; ++s) {
        bs.bucket_items[l][s] = bs.outer.parts[l].chunk(s).items();
        const int sz = static_cast<int>(bs.bucket_items[l][s].size());
        const std::uint64_t inner_seed = rng.fork();
        if (sz == 0) {
          bs.inner[l][s] = PartitionList{};
          continue;
        }
        const int chunks = std::min(4 * k, sz);
        bs.inner[l][s] =
            find_r_itemizing(sz, chunks, chunks, cfg.itemizing_z_max, inner_seed);
      }
    }
    return bs;
  }
};

// The committed range of an MIR mechanism. Structured shapes are never
// materialized: membership, menus and optimization work on the structure.
struct AllocationBank {
  enum class Shape { explicit_list, chunking, r_chunking, bucket_shattering, p_bucketing };

  Shape shape = Shape::explicit_list;
  int n = 0, m = 0;
  std::vector<Allocation> members;           // explicit_list
  PartitionList chunking;                    // chunking
  Partition base;                            // r_chunking
  int r = 0;                                 // r_chunking
  BucketShatteringParams bs;                 // bucket_shattering, p_bucketing
  std::vector<BidderBucketing> bucketings;   // p_bucketing (shift-closed)

  std::string descriptor() const {
    switch (shape) {
      case Shape::explicit_list:
        return "explicit size=" + std::to_string(members.size());
      case Shape::chunking:
        return "chunking z=" + std::to_string(chunking.z()) +
               " t=" + std::to_string(chunking.t) +
               " seed=" + std::to_string(chunking.seed);
      case Shape::r_chunking:
        return "r-chunking t=" + std::to_string(base.t) + " r=" + std::to_string(r);
      case Shape::bucket_shattering:
        return "bucket-shattering z=" + std::to_string(bs.z()) +
               " t=" + std::to_string(bs.t) + " k=" + std::to_string(bs.k) +
               " seed=" + std::to_string(bs.seed);
      case Shape::p_bucketing:
        return "p-bucketing z=" + std::to_string(bs.z()) + " t=" + std::to_string(bs.t) +
               " k=" + std::to_string(bs.k) + " y=" + std::to_string(bucketings.size()) +
               " seed=" + std::to_string(bs.seed);
    }
    return "?";
  }
};

inline AllocationBank explicit_bank(std::vector<Allocation> members, int n, int m) {
  AllocationBank b;
  b.shape = AllocationBank::Shape::explicit_list;
  b.n = n;
  b.m = m;
  for (const auto& a : members)
    if (a.n != n || a.m != m) throw MalformedInputError("explicit_bank: mismatched member");
  b.members = std::move(members);
  return b;
}

// Every bidder receives a union of chunks of one shared partition index.
inline AllocationBank chunking_bank(PartitionList l, int n) {
  if (l.parts.empty()) throw MalformedInputError("chunking_bank: empty list");
  AllocationBank b;
  b.shape = AllocationBank::Shape::chunking;
  b.n = n;
  b.m = l.m;
  b.chunking = std::move(l);
  return b;
}

inline AllocationBank r_chunking_bank(Partition base, int r, int n) {
  if (r < 0 || r > base.t) throw MalformedInputError("r_chunking_bank: need 0 <= r <= t");
  AllocationBank b;
  b.shape = AllocationBank::Shape::r_chunking;
  b.n = n;
  b.m = base.m;
  b.base = std::move(base);
  b.r = r;
  return b;
}

inline AllocationBank bucket_shattering_bank(BucketShatteringParams params, int n) {
  AllocationBank b;
  b.shape = AllocationBank::Shape::bucket_shattering;
  b.n = n;
  b.m = params.m;
  b.bs = std::move(params);
  return b;
}

// As bucket_shattering_bank, with bidder bucketings restricted to the given
// list closed under cyclic shifts of the bucket indices.
inline AllocationBank p_bucketing_bank(BucketShatteringParams params,
                                       std::vector<BidderBucketing> p_list, int n) {
  if (p_list.empty()) throw MalformedInputError("p_bucketing_bank: empty bucketing list");
  AllocationBank b;
  b.shape = AllocationBank::Shape::p_bucketing;
  b.n = n;
  b.m = params.m;
  for (const auto& p : p_list) {
    if (p.n != n || p.t != params.t)
      throw MalformedInputError("p_bucketing_bank: mismatched bucketing");
    for (int delta = 0; delta < params.t; ++delta) {
      BidderBucketing q = p.shifted(delta);
      if (std::find(b.bucketings.begin(), b.bucketings.end(), q) == b.bucketings.end())
        b.bucketings.push_back(std::move(q));
    }
  }
  b.bs = std::move(params);
  return b;
}

namespace detail {

inline bool is_chunk_union(ItemSet award, const std::vector<ItemSet>& chunks) {
  for (const ItemSet& c : chunks) {
    const ItemSet inter = award & c;
    if (!inter.empty() && inter != c) return false;
  }
  return true;
}

// Chunks a minimal representation of the award uses (empty chunks never count).
inline int chunks_used(ItemSet award, const std::vector<ItemSet>& chunks) {
  int used = 0;
  for (const ItemSet& c : chunks)
    if (!c.empty() && c.subset_of(award)) ++used;
  return used;
}

// For nonempty awards of a bucket-shattering member: the bucket each bidder
// lives in under outer partition l, or -1 when an award straddles buckets.
inline bool bucket_assignment(const AllocationBank& b, const Allocation& a, int l,
                              std::vector<int>& where) {
  where.assign(b.n, -1);
  for (int i = 0; i < b.n; ++i) {
    const ItemSet x = a.awarded(i);
    if (x.empty()) continue;
    const int s = b.bs.outer.parts[l].labels[x.lowest()];
    if (!x.subset_of(b.bs.bucket_mask(l, s))) return false;
    where[i] = s;
  }
  return true;
}

inline bool bucket_awards_fit(const AllocationBank& b, const Allocation& a, int l,
                              const std::vector<int>& where) {
  for (int s = 0; s < b.bs.t; ++s) {
    std::vector<int> here;
    for (int i = 0; i < b.n; ++i)
      if (where[i] == s) here.push_back(i);
    if (here.empty()) continue;
    bool ok = false;
    for (int idx = 0; idx < b.bs.inner[l][s].z() && !ok; ++idx) {
      const auto chunks = b.bs.global_chunks(l, s, idx);
      ok = true;
      for (int i : here)
        if (!is_chunk_union(a.awarded(i), chunks)) {
          ok = false;
          break;
        }
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace detail

// Membership by per-bidder decomposition against the structure; no bank is
// ever enumerated here.
inline bool contains(const AllocationBank& b, const Allocation& a) {
  if (a.n != b.n || a.m != b.m)
    throw MalformedInputError("contains: allocation shape mismatch");
  switch (b.shape) {
    case AllocationBank::Shape::explicit_list:
      return std::find(b.members.begin(), b.members.end(), a) != b.members.end();

    case AllocationBank::Shape::chunking: {
      for (const auto& p : b.chunking.parts) {
        const auto chunks = p.chunks();
        bool ok = true;
        for (int i = 0; i < b.n && ok; ++i)
          ok = detail::is_chunk_union(a.awarded(i), chunks);
        if (ok) return true;
      }
      return false;
    }

    case AllocationBank::Shape::r_chunking: {
      const auto chunks = b.base.chunks();
      for (int i = 0; i < b.n; ++i) {
        const ItemSet x = a.awarded(i);
        if (!detail::is_chunk_union(x, chunks)) return false;
        if (detail::chunks_used(x, chunks) > b.r) return false;
      }
      return true;
    }

    case AllocationBank::Shape::bucket_shattering:
    case AllocationBank::Shape::p_bucketing: {
      if (a.all_unassigned() || a.grand_bundle_owner() >= 0) return true;
      std::vector<int> where;
      for (int l = 0; l < b.bs.z(); ++l) {
        if (!detail::bucket_assignment(b, a, l, where)) continue;
        if (!detail::bucket_awards_fit(b, a, l, where)) continue;
        if (b.shape == AllocationBank::Shape::p_bucketing) {
          bool reachable = false;
          for (const auto& p : b.bucketings) {
            bool match = true;
            for (int i = 0; i < b.n && match; ++i)
              if (where[i] >= 0 && p.labels[i] != where[i]) match = false;
            if (match) {
              reachable = true;
              break;
            }
          }
          if (!reachable) continue;
        }
        return true;
      }
      return false;
    }
  }
  return false;
}

namespace detail {

inline void add_unions(const std::vector<ItemSet>& chunks, int max_chunks,
                       std::vector<std::uint64_t>& out) {
  const int t = static_cast<int>(chunks.size());
  if (t > 24) throw ScaleRefusedError("menu: 2^t unions over budget");
  for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << t); ++sel) {
    if (max_chunks >= 0 && std::popcount(sel) > max_chunks) continue;
    ItemSet u;
    for (int c = 0; c < t; ++c)
      if ((sel >> c) & 1) u |= chunks[c];
    out.push_back(u.bits);
  }
}

}  // namespace detail

// Every set some member allocation awards the given bidder, deduplicated and
// sorted. Cardinality respects the shape's menu bound.
inline std::vector<ItemSet> menu(const AllocationBank& b, int bidder) {
  std::vector<std::uint64_t> raw;
  switch (b.shape) {
    case AllocationBank::Shape::explicit_list:
      for (const auto& a : b.members) raw.push_back(a.awarded(bidder).bits);
      break;
    case AllocationBank::Shape::chunking:
      for (const auto& p : b.chunking.parts) detail::add_unions(p.chunks(), -1, raw);
      break;
    case AllocationBank::Shape::r_chunking: {
      // The cap counts nonempty chunks only, so drop empties before selecting.
      std::vector<ItemSet> chunks;
      for (const ItemSet& c : b.base.chunks())
        if (!c.empty()) chunks.push_back(c);
      detail::add_unions(chunks, b.r, raw);
      break;
    }
    case AllocationBank::Shape::bucket_shattering:
    case AllocationBank::Shape::p_bucketing: {
      raw.push_back(0);
      raw.push_back(ItemSet::full(b.m).bits);
      for (int l = 0; l < b.bs.z(); ++l)
        for (int s = 0; s < b.bs.t; ++s) {
          if (b.shape == AllocationBank::Shape::p_bucketing) {
            bool reachable = false;
            for (const auto& p : b.bucketings)
              if (p.labels[bidder] == s) {
                reachable = true;
                break;
              }
            if (!reachable) continue;
          }
          for (int idx = 0; idx < b.bs.inner[l][s].z(); ++idx)
            detail::add_unions(b.bs.global_chunks(l, s, idx), -1, raw);
        }
      break;
    }
  }
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  std::vector<ItemSet> out;
  out.reserve(raw.size());
  for (std::uint64_t bits : raw) out.emplace_back(bits);
  return out;
}

namespace detail {

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > ~std::uint64_t{0} / a) return ~std::uint64_t{0};
  return a * b;
}

inline std::uint64_t pow_u64(std::uint64_t base, int exp) {
  std::uint64_t out = 1;
  for (int i = 0; i < exp; ++i) out = sat_mul(out, base);
  return out;
}

// All ways to hand the given chunks to owners in `bidders` (or nobody), with
// an optional per-bidder cap on chunks owned. Empty chunks are skipped.
inline void enumerate_chunk_awards(const std::vector<ItemSet>& all_chunks,
                                   const std::vector<int>& bidders, int cap,
                                   std::vector<std::vector<std::pair<int, ItemSet>>>& out) {
  std::vector<ItemSet> chunks;
  for (const ItemSet& c : all_chunks)
    if (!c.empty()) chunks.push_back(c);
  const int t = static_cast<int>(chunks.size());
  const int options = static_cast<int>(bidders.size()) + 1;
  std::vector<int> pick(t, 0);
  for (;;) {
    std::vector<std::pair<int, ItemSet>> award;
    bool ok = true;
    if (cap >= 0) {
      std::vector<int> used(bidders.size(), 0);
      for (int c = 0; c < t && ok; ++c)
        if (pick[c] > 0 && ++used[pick[c] - 1] > cap) ok = false;
    }
    if (ok) {
      for (std::size_t bi = 0; bi < bidders.size(); ++bi) {
        ItemSet mask;
        for (int c = 0; c < t; ++c)
          if (pick[c] == static_cast<int>(bi) + 1) mask |= chunks[c];
        if (!mask.empty()) award.emplace_back(bidders[bi], mask);
      }
      out.push_back(std::move(award));
    }
    int c = 0;
    while (c < t && ++pick[c] == options) pick[c++] = 0;
    if (c == t) break;
  }
}

}  // namespace detail

// Materializes the member set. Only used by restrict, cross-checking tests and
// the shattering checker; throws ScaleRefused when the structure is too large.
inline std::vector<Allocation> enumerate_bank(const AllocationBank& b,
                                              std::uint64_t budget) {
  std::unordered_set<Allocation, AllocationHash> seen;
  std::vector<Allocation> out;
  auto push = [&](const Allocation& a) {
    if (seen.insert(a).second) out.push_back(a);
  };

  switch (b.shape) {
    case AllocationBank::Shape::explicit_list:
      for (const auto& a : b.members) push(a);
      break;

    case AllocationBank::Shape::chunking:
    case AllocationBank::Shape::r_chunking: {
      const bool capped = b.shape == AllocationBank::Shape::r_chunking;
      const std::vector<Partition> parts =
          capped ? std::vector<Partition>{b.base} : b.chunking.parts;
      std::vector<int> all(b.n);
      for (int i = 0; i < b.n; ++i) all[i] = i;
      for (const auto& p : parts) {
        if (detail::pow_u64(b.n + 1, p.t) > budget)
          throw ScaleRefusedError("enumerate_bank: chunk assignments over budget");
        std::vector<std::vector<std::pair<int, ItemSet>>> awards;
        detail::enumerate_chunk_awards(p.chunks(), all, capped ? b.r : -1, awards);
        for (const auto& award : awards) {
          Allocation a(b.n, b.m);
          for (const auto& [i, mask] : award) a.award(i, mask);
          push(a);
        }
      }
      break;
    }

    case AllocationBank::Shape::bucket_shattering:
    case AllocationBank::Shape::p_bucketing: {
      push(Allocation(b.n, b.m));
      for (int i = 0; i < b.n; ++i) push(Allocation::grand_bundle(b.n, b.m, i));
      std::vector<int> all(b.n);
      for (int i = 0; i < b.n; ++i) all[i] = i;
      for (int l = 0; l < b.bs.z(); ++l) {
        // Per bucket: all sub-awards over all inner chunkings.
        std::vector<std::vector<std::vector<std::pair<int, ItemSet>>>> per_bucket(b.bs.t);
        std::uint64_t combos = 1;
        for (int s = 0; s < b.bs.t; ++s) {
          for (int idx = 0; idx < b.bs.inner[l][s].z(); ++idx)
            detail::enumerate_chunk_awards(b.bs.global_chunks(l, s, idx), all, -1,
                                           per_bucket[s]);
          if (per_bucket[s].empty()) per_bucket[s].push_back({});
          combos = detail::sat_mul(combos, per_bucket[s].size());
        }
        if (combos > budget)
          throw ScaleRefusedError("enumerate_bank: bucket combinations over budget");
        // Combine one sub-award per bucket; a bidder may appear in one bucket only.
        std::vector<std::size_t> pick(b.bs.t, 0);
        for (;;) {
          std::vector<int> where(b.n, -1);
          Allocation a(b.n, b.m);
          bool ok = true;
          for (int s = 0; s < b.bs.t && ok; ++s)
            for (const auto& [i, mask] : per_bucket[s][pick[s]]) {
              if (where[i] != -1) {
                ok = false;
                break;
              }
              where[i] = s;
              a.award(i, mask);
            }
          if (ok && b.shape == AllocationBank::Shape::p_bucketing) {
            bool reachable = false;
            for (const auto& p : b.bucketings) {
              bool match = true;
              for (int i = 0; i < b.n && match; ++i)
                if (where[i] >= 0 && p.labels[i] != where[i]) match = false;
              if (match) {
                reachable = true;
                break;
              }
            }
            ok = reachable;
          }
          if (ok) push(a);
          int s = 0;
          while (s < b.bs.t && ++pick[s] == per_bucket[s].size()) pick[s++] = 0;
          if (s == b.bs.t) break;
        }
      }
      break;
    }
  }
  return out;
}

// Restriction to the items in keep, returned as an explicit bank of the
// deduplicated restricted allocations.
inline AllocationBank restrict_bank(const AllocationBank& b, ItemSet keep,
                                    std::uint64_t budget) {
  require_within(keep, b.m, "restrict_bank");
  std::unordered_set<Allocation, AllocationHash> seen;
  std::vector<Allocation> out;
  auto push = [&](const Allocation& a) {
    if (seen.insert(a).second) out.push_back(a);
  };

  if (b.shape == AllocationBank::Shape::chunking) {
    // Items of one chunk that survive the restriction stay glued together, so
    // restricted members are exactly the per-group owner maps.
    for (const auto& p : b.chunking.parts) {
      std::vector<ItemSet> groups;
      for (const ItemSet& c : p.chunks())
        if (!(c & keep).empty()) groups.push_back(c & keep);
      if (detail::pow_u64(b.n + 1, static_cast<int>(groups.size())) > budget)
        throw ScaleRefusedError("restrict_bank: group assignments over budget");
      std::vector<int> pick(groups.size(), 0);
      for (;;) {
        Allocation a(b.n, b.m);
        for (std::size_t g = 0; g < groups.size(); ++g)
          if (pick[g] > 0) a.award(pick[g] - 1, groups[g]);
        push(a);
        std::size_t g = 0;
        while (g < groups.size() && ++pick[g] == b.n + 1) pick[g++] = 0;
        if (g == groups.size()) break;
      }
    }
  } else {
    for (const auto& a : enumerate_bank(b, budget)) push(a.restricted(keep));
  }
  return explicit_bank(std::move(out), b.n, b.m);
}

// ---- Serialization: header plus embedded partition-list blocks. ----

inline void write_bank(std::ostream& os, const AllocationBank& b) {
  auto shape_tag = [&] {
    switch (b.shape) {
      case AllocationBank::Shape::explicit_list: return "explicit";
      case AllocationBank::Shape::chunking: return "chunking";
      case AllocationBank::Shape::r_chunking: return "r-chunking";
      case AllocationBank::Shape::bucket_shattering: return "bucket-shattering";
      case AllocationBank::Shape::p_bucketing: return "p-bucketing";
    }
    return "?";
  };
  os << "bank shape=" << shape_tag() << " n=" << b.n << " m=" << b.m;
  switch (b.shape) {
    case AllocationBank::Shape::explicit_list:
      os << " count=" << b.members.size() << "\n";
      for (const auto& a : b.members) {
        for (int j = 0; j < a.m; ++j) {
          if (j) os << ",";
          os << a.owner[j];
        }
        os << "\n";
      }
      break;
    case AllocationBank::Shape::chunking:
      os << "\n";
      write_partition_list(os, b.chunking);
      break;
    case AllocationBank::Shape::r_chunking: {
      os << " r=" << b.r << "\n";
      PartitionList single;
      single.m = b.base.m;
      single.t = b.base.t;
      single.parts = {b.base};
      write_partition_list(os, single);
      break;
    }
    case AllocationBank::Shape::bucket_shattering:
    case AllocationBank::Shape::p_bucketing:
      os << " k=" << b.bs.k << " t=" << b.bs.t << " seed=" << b.bs.seed;
      if (b.shape == AllocationBank::Shape::p_bucketing)
        os << " y=" << b.bucketings.size();
      os << "\n";
      write_partition_list(os, b.bs.outer);
      for (int l = 0; l < b.bs.z(); ++l)
        for (int s = 0; s < b.bs.t; ++s) write_partition_list(os, b.bs.inner[l][s]);
      if (b.shape == AllocationBank::Shape::p_bucketing)
        for (const auto& p : b.bucketings) {
          for (int i = 0; i < p.n; ++i) {
            if (i) os << ",";
            os << static_cast<int>(p.labels[i]);
          }
          os << "\n";
        }
      break;
  }
}

inline AllocationBank read_bank(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw MalformedInputError("bank: missing header");
  std::istringstream hs(header);
  std::string word;
  hs >> word;
  if (word != "bank") throw MalformedInputError("bank: bad header");
  std::map<std::string, std::string> kv;
  while (hs >> word) {
    auto eq = word.find('=');
    if (eq == std::string::npos) throw MalformedInputError("bank: bad header token");
    kv[word.substr(0, eq)] = word.substr(eq + 1);
  }
  const std::string shape = kv.at("shape");
  const int n = std::stoi(kv.at("n"));
  const int m = std::stoi(kv.at("m"));

  if (shape == "explicit") {
    const int count = std::stoi(kv.at("count"));
    std::vector<Allocation> members;
    for (int x = 0; x < count; ++x) {
      std::string line;
      if (!std::getline(is, line)) throw MalformedInputError("bank: short member list");
      Allocation a(n, m);
      std::istringstream ls(line);
      std::string cell;
      for (int j = 0; j < m; ++j) {
        if (!std::getline(ls, cell, ',')) throw MalformedInputError("bank: short row");
        a.owner[j] = static_cast<std::int16_t>(std::stoi(cell));
      }
      members.push_back(std::move(a));
    }
    return explicit_bank(std::move(members), n, m);
  }
  if (shape == "chunking") return chunking_bank(read_partition_list(is), n);
  if (shape == "r-chunking") {
    PartitionList single = read_partition_list(is);
    return r_chunking_bank(single.parts.at(0), std::stoi(kv.at("r")), n);
  }
  if (shape == "bucket-shattering" || shape == "p-bucketing") {
    BucketShatteringParams bs;
    bs.m = m;
    bs.k = std::stoi(kv.at("k"));
    bs.t = std::stoi(kv.at("t"));
    bs.seed = std::stoull(kv.at("seed"));
    bs.outer = read_partition_list(is);
    bs.inner.resize(bs.outer.z());
    bs.bucket_items.resize(bs.outer.z());
    for (int l = 0; l < bs.outer.z(); ++l) {
      bs.inner[l].resize(bs.t);
      bs.bucket_items[l].resize(bs.t);
      for (int s = 0; s < bs.t; ++s) {
        bs.bucket_items[l][s] = bs.outer.parts[l].chunk(s).items();
        bs.inner[l][s] = read_partition_list(is);
      }
    }
    if (shape == "bucket-shattering") return bucket_shattering_bank(std::move(bs), n);
    const int y = std::stoi(kv.at("y"));
    AllocationBank b;
    b.shape = AllocationBank::Shape::p_bucketing;
    b.n = n;
    b.m = m;
    for (int x = 0; x < y; ++x) {
      std::string line;
      if (!std::getline(is, line)) throw MalformedInputError("bank: short bucketing list");
      BidderBucketing p(n, bs.t);
      std::istringstream ls(line);
      std::string cell;
      for (int i = 0; i < n; ++i) {
        if (!std::getline(ls, cell, ',')) throw MalformedInputError("bank: short bucketing");
        p.labels[i] = static_cast<std::uint8_t>(std::stoi(cell));
      }
      b.bucketings.push_back(std::move(p));
    }
    b.bs = std::move(bs);
    return b;
  }
  throw MalformedInputError("bank: unknown shape " + shape);
}

}  // namespace mir
