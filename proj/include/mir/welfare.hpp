#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mir/bank.hpp"
#include "mir/config.hpp"
#include "mir/errors.hpp"
#include "mir/sets.hpp"
#include "mir/valuation.hpp"

namespace mir {

inline Value welfare_of(const Allocation& a, const Profile& profile,
                        QueryLedger* ledger = nullptr) {
  Value w = 0;
  for (int i = 0; i < profile.n(); ++i) w += profile.query(i, a.awarded(i), ledger);
  return w;
}

// A welfare-maximization problem where the goods are disjoint super-items
// (chunks); bidder valuations are lifted by evaluating unions of chunks.
struct ChunkInstance {
  std::vector<ItemSet> chunks;
  std::vector<int> bidders;  // global ids, processed in this order
};

struct DpResult {
  Value welfare = 0;
  std::vector<ItemSet> awards;  // per entry of ChunkInstance::bidders
};

// Exact optimum by subset DP: opt[i+1][S] = max_{T ⊆ S} opt[i][S-T] + v_{i+1}(T),
// 3^chunks transitions per bidder, ties resolved to the first T in the fixed
// descending subset enumeration. chunk_cap >= 0 limits chunks per bidder.
inline DpResult dp_optimize(const ChunkInstance& inst, const Profile& profile,
                            QueryLedger* ledger = nullptr, int dp_budget = 20,
                            int chunk_cap = -1) {
  const int mc = static_cast<int>(inst.chunks.size());
  const int nb = static_cast<int>(inst.bidders.size());
  if (mc > dp_budget) throw ScaleRefusedError("dp_optimize: chunk count over budget");
  {
    ItemSet seen;
    for (const ItemSet& c : inst.chunks) {
      if (seen.intersects(c)) throw MalformedInputError("dp_optimize: chunks overlap");
      seen |= c;
    }
  }
  const std::uint64_t size = std::uint64_t{1} << mc;
  DpResult res;
  res.awards.assign(nb, ItemSet{});
  if (nb == 0) return res;

  auto union_of = [&](std::uint64_t sel) {
    ItemSet u;
    for (std::uint64_t b = sel; b; b &= b - 1) u |= inst.chunks[std::countr_zero(b)];
    return u;
  };

  std::vector<Value> prev(size, 0), cur(size, 0), lift(size, 0);
  std::vector<std::vector<std::uint64_t>> back(nb,
                                               std::vector<std::uint64_t>(size, 0));
  for (int i = 0; i < nb; ++i) {
    for (std::uint64_t t = 0; t < size; ++t)
      lift[t] = profile.query(inst.bidders[i], union_of(t), ledger);
    for (std::uint64_t s = 0; s < size; ++s) {
      Value best = prev[s] + lift[0];  // T = {} considered via the loop too;
      std::uint64_t best_t = 0;        // seed so empty s is handled uniformly
      for (std::uint64_t t = s;; t = (t - 1) & s) {
        if (chunk_cap < 0 || std::popcount(t) <= chunk_cap) {
          const Value w = prev[s & ~t] + lift[t];
          if (w > best) {
            best = w;
            best_t = t;
          }
        }
        if (t == 0) break;
      }
      cur[s] = best;
      back[i][s] = best_t;
    }
    std::swap(prev, cur);
  }

  std::uint64_t s = size - 1;
  for (int i = nb - 1; i >= 0; --i) {
    const std::uint64_t t = back[i][s];
    res.awards[i] = union_of(t);
    s &= ~t;
  }
  res.welfare = prev[size - 1];
  return res;
}

struct OptimizeResult {
  Allocation alloc;
  Value welfare = 0;
};

// Exact in-range optimization over a bank, reusable across the n+1 VCG calls.
// Per-(l, s, T) bucket optima are memoized, which makes the pivot runs (each
// bidder masked out in turn) nearly free for the bucketed shapes.
class BankOptimizer {
 public:
  BankOptimizer(const AllocationBank& bank, const Profile& profile,
                QueryLedger* ledger = nullptr, const Config& cfg = {})
      : bank_(bank), profile_(profile), ledger_(ledger), cfg_(cfg) {
    if (bank.n != profile.n() || bank.m != profile.m)
      throw MalformedInputError("optimize: bank/profile mismatch");
  }

  // Maximizes the welfare of the bidders in `active`; other bidders count as
  // zero and receive nothing. Candidates are scanned in a fixed order (empty,
  // grand bundles, then structure tuples ascending) with strict improvement,
  // so the result is deterministic and unchanged under common scaling.
  OptimizeResult optimize(BidderSet active) {
    switch (bank_.shape) {
      case AllocationBank::Shape::explicit_list: return optimize_explicit(active);
      case AllocationBank::Shape::chunking: return optimize_chunking(active);
      case AllocationBank::Shape::r_chunking: return optimize_r_chunking(active);
      case AllocationBank::Shape::bucket_shattering:
      case AllocationBank::Shape::p_bucketing: return optimize_bucketed(active);
    }
    throw MalformedInputError("optimize: unknown bank shape");
  }

  OptimizeResult optimize_all() { return optimize(BidderSet::full(bank_.n)); }

 private:
  Value active_welfare(const Allocation& a, BidderSet active) {
    Value w = 0;
    for (int i : active.items()) w += profile_.query(i, a.awarded(i), ledger_);
    return w;
  }

  OptimizeResult optimize_explicit(BidderSet active) {
    if (bank_.members.empty())
      throw MalformedInputError("optimize: empty explicit bank");
    OptimizeResult best{bank_.members[0], active_welfare(bank_.members[0], active)};
    for (std::size_t x = 1; x < bank_.members.size(); ++x) {
      const Value w = active_welfare(bank_.members[x], active);
      if (w > best.welfare ||
          (w == best.welfare && alloc_lex_less(bank_.members[x], best.alloc)))
        best = {bank_.members[x], w};
    }
    return best;
  }

  void consider(OptimizeResult& best, Allocation a, Value w) const {
    if (w > best.welfare) best = {std::move(a), w};
  }

  void consider_grand_bundles(OptimizeResult& best, BidderSet active) {
    for (int i : active.items()) {
      const Value w = profile_.query(i, ItemSet::full(bank_.m), ledger_);
      consider(best, Allocation::grand_bundle(bank_.n, bank_.m, i), w);
    }
  }

  static std::vector<ItemSet> nonempty(const std::vector<ItemSet>& chunks) {
    std::vector<ItemSet> out;
    for (const ItemSet& c : chunks)
      if (!c.empty()) out.push_back(c);
    return out;
  }

  OptimizeResult run_dp(const std::vector<ItemSet>& chunks, BidderSet active,
                        int cap) {
    ChunkInstance inst{chunks, active.items()};
    DpResult dp = dp_optimize(inst, profile_, ledger_, cfg_.dp_budget, cap);
    Allocation a(bank_.n, bank_.m);
    for (std::size_t bi = 0; bi < inst.bidders.size(); ++bi)
      a.award(inst.bidders[bi], dp.awards[bi]);
    return {std::move(a), dp.welfare};
  }

  OptimizeResult optimize_chunking(BidderSet active) {
    OptimizeResult best{Allocation(bank_.n, bank_.m), 0};
    consider_grand_bundles(best, active);
    for (const auto& p : bank_.chunking.parts) {
      OptimizeResult r = run_dp(nonempty(p.chunks()), active, -1);
      consider(best, std::move(r.alloc), r.welfare);
    }
    return best;
  }

  OptimizeResult optimize_r_chunking(BidderSet active) {
    OptimizeResult best{Allocation(bank_.n, bank_.m), 0};
    OptimizeResult r = run_dp(nonempty(bank_.base.chunks()), active, bank_.r);
    consider(best, std::move(r.alloc), r.welfare);
    return best;
  }

  struct BucketBest {
    Value welfare = 0;
    std::vector<std::pair<int, ItemSet>> awards;
  };

  const BucketBest& bucket_best(int l, int s, BidderSet t_set) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(l) * bank_.bs.t + s) << 40 | t_set.bits;
    auto it = bucket_memo_.find(key);
    if (it != bucket_memo_.end()) return it->second;
    BucketBest out;  // welfare 0 with no awards is always available
    if (!t_set.empty()) {
      const auto& list = bank_.bs.inner[l][s];
      for (int idx = 0; idx < list.z(); ++idx) {
        OptimizeResult r = run_dp(nonempty(bank_.bs.global_chunks(l, s, idx)),
                                  t_set, -1);
        if (r.welfare > out.welfare) {
          out.welfare = r.welfare;
          out.awards.clear();
          for (int i : t_set.items()) {
            const ItemSet x = r.alloc.awarded(i);
            if (!x.empty()) out.awards.emplace_back(i, x);
          }
        }
      }
    }
    return bucket_memo_.emplace(key, std::move(out)).first->second;
  }

  OptimizeResult optimize_bucketed(BidderSet active) {
    OptimizeResult best{Allocation(bank_.n, bank_.m), 0};
    consider_grand_bundles(best, active);
    const int t = bank_.bs.t;

    auto consider_bucketing = [&](int l, const std::uint8_t* labels) {
      Value w = 0;
      for (int s = 0; s < t; ++s) {
        BidderSet in_bucket;
        for (int i = 0; i < bank_.n; ++i)
          if (labels[i] == s && active.has(i)) in_bucket.add(i);
        w += bucket_best(l, s, in_bucket).welfare;
      }
      if (w <= best.welfare) return;
      Allocation a(bank_.n, bank_.m);
      for (int s = 0; s < t; ++s) {
        BidderSet in_bucket;
        for (int i = 0; i < bank_.n; ++i)
          if (labels[i] == s && active.has(i)) in_bucket.add(i);
        for (const auto& [i, mask] : bucket_best(l, s, in_bucket).awards)
          a.award(i, mask);
      }
      best = {std::move(a), w};
    };

    if (bank_.shape == AllocationBank::Shape::p_bucketing) {
      for (int l = 0; l < bank_.bs.z(); ++l)
        for (const auto& p : bank_.bucketings) consider_bucketing(l, p.labels.data());
    } else {
      if (detail::pow_u64(t, bank_.n) > cfg_.enum_budget)
        throw ScaleRefusedError(
            "optimize: t^n bidder bucketings over budget; use the efficient "
            "(p-bucketing) variant");
      std::vector<std::uint8_t> labels(bank_.n, 0);
      for (int l = 0; l < bank_.bs.z(); ++l) {
        std::fill(labels.begin(), labels.end(), 0);
        for (;;) {
          consider_bucketing(l, labels.data());
          int i = bank_.n - 1;
          while (i >= 0 && ++labels[i] == t) labels[i--] = 0;
          if (i < 0) break;
        }
      }
    }
    return best;
  }

  const AllocationBank& bank_;
  const Profile& profile_;
  QueryLedger* ledger_;
  Config cfg_;
  std::unordered_map<std::uint64_t, BucketBest> bucket_memo_;
};

inline OptimizeResult optimize_over_bank(const AllocationBank& bank,
                                         const Profile& profile,
                                         QueryLedger* ledger = nullptr,
                                         const Config& cfg = {}) {
  return BankOptimizer(bank, profile, ledger, cfg).optimize_all();
}

}  // namespace mir
