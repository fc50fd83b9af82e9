#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "mir/allocation.hpp"
#include "mir/bank.hpp"
#include "mir/config.hpp"
#include "mir/errors.hpp"
#include "mir/mechanisms.hpp"
#include "mir/rng.hpp"
#include "mir/sets.hpp"
#include "mir/valuation.hpp"
#include "mir/welfare.hpp"

namespace mir {

// Ground-truth optimum. Subset welfare follows the convention that OPT(v, N')
// is the welfare of N' under one fixed optimal allocation, not a re-optimized
// value, so every report derives from the same A*.
struct OptResult {
  Allocation a_star;
  Value welfare = 0;

  Value opt_subset(BidderSet who, const Profile& profile) const {
    Value w = 0;
    for (int i : who.items()) w += profile.bidders[i].value(a_star.awarded(i));
    return w;
  }
};

inline OptResult brute_force_opt(const Profile& profile, const Config& cfg = {}) {
  if (profile.m > cfg.dp_budget)
    throw ScaleRefusedError("brute_force_opt: m over the DP budget");
  ChunkInstance inst;
  for (int j = 0; j < profile.m; ++j) inst.chunks.push_back(ItemSet::single(j));
  for (int i = 0; i < profile.n(); ++i) inst.bidders.push_back(i);
  DpResult dp = dp_optimize(inst, profile, nullptr, cfg.dp_budget);
  OptResult out;
  out.a_star = Allocation(profile.n(), profile.m);
  for (int i = 0; i < profile.n(); ++i) out.a_star.award(i, dp.awards[i]);
  out.welfare = dp.welfare;
  return out;
}

// Witness that the bank realizes, restricted to mp, every assignment of each
// item j to one of d designated bidders t_j.
struct ShatterWitness {
  ItemSet mp;
  std::vector<BidderSet> tj;  // one per item of mp, in ascending item order
  bool verified = false;
};

inline ShatterWitness check_d_shatters(const AllocationBank& bank, ItemSet mp,
                                       BidderSet np, int d,
                                       std::uint64_t budget = 20'000'000) {
  require_within(mp, bank.m, "check_d_shatters items");
  require_within(np, bank.n, "check_d_shatters bidders");
  if (d < 1 || d > np.count())
    throw MalformedInputError("check_d_shatters: need 1 <= d <= |N'|");
  ShatterWitness w;
  w.mp = mp;
  const auto items = mp.items();
  const int q = static_cast<int>(items.size());

  // All size-d bidder sets within np, shared by every item position.
  std::vector<BidderSet> candidates;
  {
    const auto ids = np.items();
    const int nn = static_cast<int>(ids.size());
    for (std::uint64_t c = first_combination(d);;) {
      BidderSet t;
      for (int b = 0; b < nn; ++b)
        if ((c >> b) & 1) t.add(ids[b]);
      candidates.push_back(t);
      if (!next_combination(c, nn)) break;
    }
  }

  std::uint64_t combos = 1, functions = 1;
  for (int j = 0; j < q; ++j) {
    combos = detail::sat_mul(combos, candidates.size());
    functions = detail::sat_mul(functions, d);
  }
  if (detail::sat_mul(combos, functions) > budget)
    throw ScaleRefusedError("check_d_shatters: search space over budget");

  std::unordered_set<Allocation, AllocationHash> realized;
  for (const auto& a : restrict_bank(bank, mp, budget).members) realized.insert(a);

  std::vector<std::size_t> pick(q, 0);
  for (;;) {
    bool all_ok = true;
    std::vector<std::vector<int>> choices(q);
    for (int j = 0; j < q; ++j) choices[j] = candidates[pick[j]].items();
    std::vector<std::size_t> g(q, 0);
    for (;;) {
      Allocation a(bank.n, bank.m);
      for (int j = 0; j < q; ++j)
        a.owner[items[j]] = static_cast<std::int16_t>(choices[j][g[j]]);
      if (!realized.count(a)) {
        all_ok = false;
        break;
      }
      int j = 0;
      while (j < q && ++g[j] == static_cast<std::size_t>(d)) g[j++] = 0;
      if (j == q) break;
    }
    if (all_ok) {
      for (int j = 0; j < q; ++j) w.tj.push_back(candidates[pick[j]]);
      w.verified = true;
      return w;
    }
    int j = 0;
    while (j < q && ++pick[j] == candidates.size()) pick[j++] = 0;
    if (j == q) break;
  }
  return w;
}

// Unilateral deviation: bidder reports `report` instead of the truth.
struct Deviation {
  int bidder;
  Valuation report;
};

// True iff no sampled deviation beats truth-telling, compared exactly. The
// bank is fixed, so each misreport is one more VCG run over the same range.
// `audit`, when set, sees every run (the reported profile and its outcome),
// which lets callers check payment properties without repeating the runs.
using RunAudit = std::function<void(const Profile&, const MechanismOutcome&)>;

inline bool check_truthful(const AllocationBank& bank, const Profile& profile,
                           const std::vector<Deviation>& deviations,
                           const Config& cfg = {}, const RunAudit& audit = {}) {
  const MechanismOutcome truth = vcg_outcome(bank, profile, nullptr, cfg);
  if (audit) audit(profile, truth);
  std::vector<Value> truth_utility(profile.n());
  for (int i = 0; i < profile.n(); ++i)
    truth_utility[i] =
        profile.bidders[i].value(truth.allocation.awarded(i)) - truth.payments[i];

  bool truthful = true;
  for (const auto& dev : deviations) {
    Profile lied = profile;
    lied.bidders[dev.bidder] = dev.report;
    const MechanismOutcome out = vcg_outcome(bank, lied, nullptr, cfg);
    if (audit) audit(lied, out);
    const Value deviating =
        profile.bidders[dev.bidder].value(out.allocation.awarded(dev.bidder)) -
        out.payments[dev.bidder];
    if (deviating > truth_utility[dev.bidder]) truthful = false;
  }
  return truthful;
}

namespace detail {

inline std::vector<Value> random_monotone_table(int m, Rng& rng, Value max_step) {
  std::vector<Value> t(std::size_t{1} << m, 0);
  for (std::uint64_t s = 1; s < t.size(); ++s) {
    Value floor = 0;
    for (std::uint64_t b = s; b; b &= b - 1)
      floor = std::max(floor, t[s & ~(b & (~b + 1))]);
    t[s] = floor + rng.range(0, max_step);
  }
  return t;
}

inline Valuation random_valuation_like(const Valuation& v, Rng& rng) {
  const int m = v.m();
  switch (v.kind()) {
    case Valuation::Kind::additive: {
      std::vector<Value> w(m);
      for (auto& x : w) x = rng.range(0, 20);
      return Valuation::additive(m, std::move(w));
    }
    case Valuation::Kind::coverage: {
      const int u = std::max<int>(1, static_cast<int>(v.element_weights().size()));
      std::vector<Value> w(u);
      for (auto& x : w) x = rng.range(0, 10);
      std::vector<std::uint64_t> covers(m);
      for (auto& c : covers)
        for (int e = 0; e < u; ++e)
          if (rng.below(3) == 0) c |= std::uint64_t{1} << e;
      return Valuation::coverage(m, std::move(w), std::move(covers));
    }
    case Valuation::Kind::xos: {
      const int nc = std::max<int>(1, static_cast<int>(v.clauses().size()));
      std::vector<std::vector<Value>> clauses(nc, std::vector<Value>(m));
      for (auto& c : clauses)
        for (auto& x : c) x = rng.range(0, 12);
      return Valuation::xos(m, std::move(clauses));
    }
    case Valuation::Kind::mild_desires: {
      const int a = 1 + static_cast<int>(rng.below(std::min(m, 3)));
      const int fam = 1 + static_cast<int>(rng.below(3));
      std::vector<ItemSet> family;
      for (int f = 0; f < fam; ++f) {
        ItemSet set;
        while (set.count() < a) set.add(static_cast<int>(rng.below(m)));
        if (std::find(family.begin(), family.end(), set) == family.end())
          family.push_back(set);
      }
      return Valuation::mild_desires(m, a, std::move(family));
    }
    case Valuation::Kind::almost_single_minded: {
      ItemSet target;
      const int sz = 1 + static_cast<int>(rng.below(std::max(1, m / 2)));
      while (target.count() < sz) target.add(static_cast<int>(rng.below(m)));
      return Valuation::almost_single_minded(m, target);
    }
    case Valuation::Kind::induced_single_minded: {
      ItemSet target;
      const int sz = 1 + static_cast<int>(rng.below(std::max(1, m / 2)));
      while (target.count() < sz) target.add(static_cast<int>(rng.below(m)));
      return Valuation::induced_single_minded(m, target);
    }
    case Valuation::Kind::explicit_table:
      return Valuation::explicit_table(m, random_monotone_table(m, rng, 6));
  }
  throw MalformedInputError("random_valuation_like: unknown kind");
}

}  // namespace detail

// Adversarial templates (zero report, grand-bundle-only, scaled truth) plus
// random reports of the bidder's own kind, per_bidder total for each bidder.
inline std::vector<Deviation> sample_deviations(const Profile& profile, int per_bidder,
                                                std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Deviation> out;
  const int m = profile.m;
  for (int i = 0; i < profile.n(); ++i) {
    int left = per_bidder;
    if (left-- > 0) out.push_back({i, Valuation::zero(m)});
    if (m <= 20) {
      const Value top = profile.bidders[i].value(ItemSet::full(m));
      if (left-- > 0) {
        std::vector<Value> t(std::size_t{1} << m, 0);
        t.back() = 2 * top + 1;
        out.push_back({i, Valuation::explicit_table(m, std::move(t))});
      }
      if (left-- > 0) {
        std::vector<Value> t(std::size_t{1} << m);
        for (std::uint64_t s = 0; s < t.size(); ++s)
          t[s] = 3 * profile.bidders[i].value(ItemSet(s));
        out.push_back({i, Valuation::explicit_table(m, std::move(t))});
      }
    }
    while (left-- > 0)
      out.push_back({i, detail::random_valuation_like(profile.bidders[i], rng)});
  }
  return out;
}

// Heavy/light split of the welfare guarantee proofs: heavy bidders (large
// optimal awards) are served by grand bundles, light bidders are greedily
// grouped under a per-group item cap. sqrt_mode selects the subadditive
// thresholds (2*sqrt(mk) / 4*sqrt(mk), compared exactly via squares) instead
// of the general ones (2k / 4k).
struct DecompositionReport {
  BidderSet n0;
  std::vector<BidderSet> groups;
  Value opt_n0 = 0, opt_rest = 0, opt_total = 0;
  bool grand_bundle_branch = false;
};

inline DecompositionReport decomposition_report(const Profile& profile,
                                                const OptResult& opt, int k,
                                                bool sqrt_mode = false) {
  const std::int64_t m = profile.m;
  DecompositionReport rep;
  auto heavy = [&](std::int64_t sz) {
    return sqrt_mode ? sz * sz >= 4 * m * k : sz > 2 * k;
  };
  auto fits_cap = [&](std::int64_t total) {
    return sqrt_mode ? total * total <= 16 * m * k : total <= 4 * k;
  };
  BidderSet group;
  std::int64_t group_items = 0;
  for (int i = 0; i < profile.n(); ++i) {
    const std::int64_t sz = opt.a_star.awarded(i).count();
    if (heavy(sz)) {
      rep.n0.add(i);
      continue;
    }
    if (!fits_cap(group_items + sz)) {
      rep.groups.push_back(group);
      group = BidderSet{};
      group_items = 0;
    }
    group.add(i);
    group_items += sz;
  }
  if (!group.empty()) rep.groups.push_back(group);
  rep.opt_n0 = opt.opt_subset(rep.n0, profile);
  rep.opt_rest = opt.opt_subset(BidderSet::full(profile.n()) - rep.n0, profile);
  rep.opt_total = opt.welfare;
  rep.grand_bundle_branch = rep.opt_n0 >= rep.opt_rest;
  return rep;
}

// Base allocations with per-bidder input sets X_i over [z]; bidders in V carry
// the instance's information, everyone else desires all z of their base sets.
struct DisjointnessInstance {
  std::vector<Allocation> base;
  std::vector<std::uint64_t> x;  // X_i as a bitmask over [z]
  BidderSet v_set;
  Value s = 0;  // total award size per base allocation
  Profile profile;
};

// Every non-constant choice of one base award per V-bidder must collide; the
// iff below is meaningless without this.
inline bool check_no_mixing(const std::vector<Allocation>& base, BidderSet v_set,
                            std::uint64_t budget = 10'000'000) {
  const int z = static_cast<int>(base.size());
  const auto ids = v_set.items();
  const int q = static_cast<int>(ids.size());
  if (detail::pow_u64(z, q) > budget)
    throw ScaleRefusedError("check_no_mixing: z^|V| over budget");
  std::vector<int> f(q, 0);
  for (;;) {
    bool constant = true;
    for (int b = 1; b < q; ++b)
      if (f[b] != f[0]) constant = false;
    if (!constant) {
      ItemSet seen;
      bool disjoint = true;
      for (int b = 0; b < q && disjoint; ++b) {
        const ItemSet award = base[f[b]].awarded(ids[b]);
        if (seen.intersects(award)) disjoint = false;
        seen |= award;
      }
      if (disjoint) return false;
    }
    int b = 0;
    while (b < q && ++f[b] == z) f[b++] = 0;
    if (b == q) break;
  }
  return true;
}

inline DisjointnessInstance build_disjointness_instance(
    const std::vector<Allocation>& base, const std::vector<std::uint64_t>& x,
    BidderSet v_set) {
  if (base.empty()) throw MalformedInputError("disjointness: no base allocations");
  const int n = base[0].n, m = base[0].m;
  const int z = static_cast<int>(base.size());
  const std::uint64_t all_z = z >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << z) - 1;
  if (static_cast<int>(x.size()) != n)
    throw MalformedInputError("disjointness: need one X per bidder");

  DisjointnessInstance inst;
  inst.base = base;
  inst.v_set = v_set;
  inst.profile.m = m;
  for (int i = 0; i < n; ++i) {
    const int a_i = base[0].awarded(i).count();
    for (int l = 1; l < z; ++l)
      if (base[l].awarded(i).count() != a_i)
        throw MalformedInputError("disjointness: award sizes differ across base");
    // Bidders outside V hold the full universe; degenerate a_i = 0 bidders are
    // constant zero and leave V.
    std::uint64_t x_i = v_set.has(i) ? x[i] : all_z;
    if (a_i == 0) {
      inst.v_set.remove(i);
      x_i = all_z;
    }
    if (x_i == 0 || (x_i & ~all_z) != 0)
      throw MalformedInputError("disjointness: X_i must be a nonempty subset of [z]");
    std::vector<ItemSet> family;
    for (int l = 0; l < z; ++l)
      if ((x_i >> l) & 1) {
        const ItemSet f = base[l].awarded(i);
        if (std::find(family.begin(), family.end(), f) == family.end())
          family.push_back(f);
      }
    inst.x.push_back(x_i);
    inst.s += a_i;
    inst.profile.bidders.push_back(Valuation::mild_desires(m, a_i, std::move(family)));
  }
  return inst;
}

// Explicit bank of every allocation that sends each item to one of its owners
// across the base allocations (items must be fully assigned in every base).
inline AllocationBank shattering_product_bank(const std::vector<Allocation>& base,
                                              std::uint64_t budget = 1'000'000) {
  if (base.empty()) throw MalformedInputError("product bank: no base allocations");
  const int n = base[0].n, m = base[0].m;
  std::vector<std::vector<int>> owners(m);
  for (int j = 0; j < m; ++j) {
    for (const auto& a : base) {
      if (a.owner[j] < 0)
        throw MalformedInputError("product bank: base leaves an item unassigned");
      if (std::find(owners[j].begin(), owners[j].end(), a.owner[j]) == owners[j].end())
        owners[j].push_back(a.owner[j]);
    }
    std::sort(owners[j].begin(), owners[j].end());
  }
  std::uint64_t total = 1;
  for (int j = 0; j < m; ++j) total = detail::sat_mul(total, owners[j].size());
  if (total > budget) throw ScaleRefusedError("product bank: over budget");

  std::vector<Allocation> members;
  std::vector<std::size_t> pick(m, 0);
  for (;;) {
    Allocation a(n, m);
    for (int j = 0; j < m; ++j) a.owner[j] = static_cast<std::int16_t>(owners[j][pick[j]]);
    members.push_back(std::move(a));
    int j = 0;
    while (j < m && ++pick[j] == owners[j].size()) pick[j++] = 0;
    if (j == m) break;
  }
  return explicit_bank(std::move(members), n, m);
}

// The headline iff for one X-configuration: optimal in-bank welfare equals 2s
// exactly when the V-bidders' input sets share an index.
inline bool verify_embedding(const AllocationBank& bank, const DisjointnessInstance& inst,
                             const Config& cfg = {}) {
  if (!check_no_mixing(inst.base, inst.v_set))
    throw PreconditionFailedError(
        "verify_embedding: base family admits a mixed disjoint selection");
  std::uint64_t inter = ~std::uint64_t{0};
  for (int i : inst.v_set.items()) inter &= inst.x[i];
  const bool expect = inst.v_set.empty() || inter != 0;
  const Value welfare = optimize_over_bank(bank, inst.profile, nullptr, cfg).welfare;
  return (welfare == 2 * inst.s) == expect;
}

// Hard-instance family: a uniformly random partition into n = floor(2m/k)
// near-equal parts (sizes differ by at most one), each bidder single-minded
// for its part. OPT equals n.
inline Profile induced_hard_instance(int m, int k, std::uint64_t seed) {
  if (k < 1) throw MalformedInputError("induced_hard_instance: k must be >= 1");
  const int n = std::max(1, 2 * m / k);
  Rng rng(seed);
  std::vector<int> perm(m);
  for (int j = 0; j < m; ++j) perm[j] = j;
  for (int j = m - 1; j > 0; --j)
    std::swap(perm[j], perm[rng.below(static_cast<std::uint32_t>(j + 1))]);
  Profile profile;
  profile.m = m;
  int at = 0;
  for (int i = 0; i < n; ++i) {
    const int take = m / n + (i < m % n ? 1 : 0);
    ItemSet part;
    for (int x = 0; x < take; ++x) part.add(perm[at++]);
    profile.bidders.push_back(Valuation::induced_single_minded(m, part));
  }
  return profile;
}

}  // namespace mir
