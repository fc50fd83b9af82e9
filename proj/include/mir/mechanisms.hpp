#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mir/bank.hpp"
#include "mir/config.hpp"
#include "mir/errors.hpp"
#include "mir/partition.hpp"
#include "mir/valuation.hpp"
#include "mir/welfare.hpp"

namespace mir {

struct MechanismOutcome {
  Allocation allocation;
  std::vector<Value> payments;
  Value welfare = 0;
  std::vector<std::uint64_t> query_counts;
  std::string bank_descriptor;
  int achieved_z = 0;
};

// MIR + Clarke pivot: the chosen allocation maximizes welfare over the bank,
// and bidder i pays the externality max_{A in bank} sum_{j!=i} v_j(A_j) -
// sum_{j!=i} v_j(A*_j). Exactly n+1 in-range optimizations.
inline MechanismOutcome vcg_outcome(const AllocationBank& bank, const Profile& profile,
                                    QueryLedger* ledger = nullptr,
                                    const Config& cfg = {}) {
  QueryLedger local(profile.n());
  if (!ledger) ledger = &local;
  BankOptimizer opt(bank, profile, ledger, cfg);

  const BidderSet everyone = BidderSet::full(profile.n());
  OptimizeResult full = opt.optimize(everyone);

  MechanismOutcome out;
  out.welfare = 0;
  out.payments.assign(profile.n(), 0);
  std::vector<Value> contrib(profile.n());
  for (int i = 0; i < profile.n(); ++i) {
    contrib[i] = profile.query(i, full.alloc.awarded(i), ledger);
    out.welfare += contrib[i];
  }
  for (int i = 0; i < profile.n(); ++i) {
    BidderSet others = everyone;
    others.remove(i);
    const Value without = opt.optimize(others).welfare;
    out.payments[i] = without - (out.welfare - contrib[i]);
  }
  out.allocation = std::move(full.alloc);
  out.query_counts = ledger->counts();
  out.bank_descriptor = bank.descriptor();
  return out;
}

// Range of the general-valuations mechanism: a certified (4k)-itemizing list
// of partitions into 4k chunks, sampled from the seed.
inline AllocationBank build_chunking_bank(int m, int n, int k, std::uint64_t seed,
                                          const Config& cfg = {}) {
  if (k < 1) throw MalformedInputError("chunking mechanism: k must be >= 1");
  PartitionList l = find_r_itemizing(m, 4 * k, 4 * k, cfg.itemizing_z_max, seed);
  return chunking_bank(std::move(l), n);
}

inline AllocationBank build_bucket_shattering_bank(int m, int n, int k,
                                                   std::uint64_t seed,
                                                   const Config& cfg = {}) {
  return bucket_shattering_bank(BucketShatteringParams::build(m, k, seed, cfg), n);
}

inline AllocationBank build_p_bucketing_bank(int m, int n, int k, int y,
                                             std::uint64_t seed,
                                             const Config& cfg = {}) {
  if (y < 1) throw MalformedInputError("efficient mechanism: y must be >= 1");
  BucketShatteringParams params = BucketShatteringParams::build(m, k, seed, cfg);
  // Distinct stream for the bidder bucketings so both subadditive variants
  // share identical item-side structure at equal seeds.
  auto p_list =
      sample_balanced_bucketings(n, params.t, y, seed ^ 0x9E3779B97F4A7C15ull);
  return p_bucketing_bank(std::move(params), std::move(p_list), n);
}

inline int achieved_z_of(const AllocationBank& bank) {
  switch (bank.shape) {
    case AllocationBank::Shape::chunking: return bank.chunking.z();
    case AllocationBank::Shape::bucket_shattering:
    case AllocationBank::Shape::p_bucketing: return bank.bs.z();
    default: return 0;
  }
}

inline MechanismOutcome run_mechanism(const AllocationBank& bank, const Profile& profile,
                                      const Config& cfg = {}) {
  QueryLedger ledger(profile.n());
  MechanismOutcome out = vcg_outcome(bank, profile, &ledger, cfg);
  out.achieved_z = achieved_z_of(bank);
  return out;
}

inline MechanismOutcome chunking_mechanism(const Profile& profile, int k,
                                           std::uint64_t seed, const Config& cfg = {}) {
  return run_mechanism(build_chunking_bank(profile.m, profile.n(), k, seed, cfg),
                       profile, cfg);
}

inline MechanismOutcome bucket_shattering_mechanism(const Profile& profile, int k,
                                                    std::uint64_t seed,
                                                    const Config& cfg = {}) {
  return run_mechanism(
      build_bucket_shattering_bank(profile.m, profile.n(), k, seed, cfg), profile, cfg);
}

inline MechanismOutcome efficient_bucket_shattering_mechanism(const Profile& profile,
                                                              int k, int y,
                                                              std::uint64_t seed,
                                                              const Config& cfg = {}) {
  return run_mechanism(build_p_bucketing_bank(profile.m, profile.n(), k, y, seed, cfg),
                       profile, cfg);
}

}  // namespace mir
