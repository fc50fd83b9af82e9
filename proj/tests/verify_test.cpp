#include "mir/verify.hpp"

#include <gtest/gtest.h>

#include "mir/bank.hpp"
#include "mir/instance.hpp"
#include "mir/mechanisms.hpp"
#include "mir/rng.hpp"

using namespace mir;

namespace {

Allocation alloc_of(int n, int m, std::vector<ItemSet> awards) {
  Allocation a(n, m);
  for (int i = 0; i < static_cast<int>(awards.size()); ++i) a.award(i, awards[i]);
  return a;
}

Value exhaustive_opt(const Profile& profile) {
  const int n = profile.n(), m = profile.m;
  std::vector<int> owner(m, -1);
  Value best = 0;
  for (;;) {
    Allocation a(n, m);
    for (int j = 0; j < m; ++j) a.owner[j] = static_cast<std::int16_t>(owner[j]);
    best = std::max(best, welfare_of(a, profile));
    int j = 0;
    while (j < m && ++owner[j] == n) owner[j++] = -1;
    if (j == m) break;
  }
  return best;
}

TEST(BruteForceOpt, Basics) {
  Profile one;
  one.m = 5;
  one.bidders = {Valuation::additive(5, {1, 2, 3, 4, 5})};
  EXPECT_EQ(brute_force_opt(one).welfare, 15);

  Profile two;
  two.m = 4;
  two.bidders = {Valuation::induced_single_minded(4, make_set({0, 1})),
                 Valuation::induced_single_minded(4, make_set({2, 3}))};
  auto opt = brute_force_opt(two);
  EXPECT_EQ(opt.welfare, 2);
  EXPECT_EQ(opt.opt_subset(BidderSet::full(2), two), 2);

  // All-ones additive bidders split the items perfectly: OPT = m.
  Profile ones;
  ones.m = 6;
  ones.bidders = {Valuation::additive(6, std::vector<Value>(6, 1)),
                  Valuation::additive(6, std::vector<Value>(6, 1))};
  EXPECT_EQ(brute_force_opt(ones).welfare, 6);
}

TEST(BruteForceOpt, MatchesExhaustiveEnumeration) {
  Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    Instance inst = gen_instance("explicit", 6, 3, rng.fork());
    EXPECT_EQ(brute_force_opt(inst.profile).welfare, exhaustive_opt(inst.profile));
  }
  Profile big;
  big.m = 21;
  big.bidders = {Valuation::additive(21, std::vector<Value>(21, 1))};
  EXPECT_THROW(brute_force_opt(big), ScaleRefusedError);
}

TEST(Shattering, CompleteBankShattersEverything) {
  // All 9 allocations of 2 items to 2 bidders or nobody.
  std::vector<Allocation> members;
  for (int o0 = -1; o0 < 2; ++o0)
    for (int o1 = -1; o1 < 2; ++o1) {
      Allocation a(2, 2);
      a.owner[0] = static_cast<std::int16_t>(o0);
      a.owner[1] = static_cast<std::int16_t>(o1);
      members.push_back(a);
    }
  auto bank = explicit_bank(members, 2, 2);
  auto w = check_d_shatters(bank, ItemSet::full(2), BidderSet::full(2), 2);
  EXPECT_TRUE(w.verified);
  ASSERT_EQ(w.tj.size(), 2u);
  EXPECT_EQ(w.tj[0], BidderSet::full(2));
}

TEST(Shattering, SingleAllocationBankFails) {
  auto bank = explicit_bank({alloc_of(2, 2, {make_set({0}), make_set({1})})}, 2, 2);
  auto w = check_d_shatters(bank, ItemSet::full(2), BidderSet::full(2), 2);
  EXPECT_FALSE(w.verified);
}

TEST(Shattering, ChunkingBankShattersItemizedSets) {
  auto bank = chunking_bank(find_r_itemizing(6, 3, 3, 10000, 8u), 2);
  for (std::uint64_t s = first_combination(3);;) {
    auto w = check_d_shatters(bank, ItemSet(s), BidderSet::full(2), 2);
    EXPECT_TRUE(w.verified) << ItemSet(s).to_string();
    if (!next_combination(s, 6)) break;
  }
}

TEST(Truthful, SingleBidderAndVickrey) {
  Profile one;
  one.m = 3;
  one.bidders = {Valuation::additive(3, {1, 2, 3})};
  auto bank1 = chunking_bank(find_r_itemizing(3, 2, 2, 10000, 1u), 1);
  EXPECT_TRUE(check_truthful(bank1, one,
                             {{0, Valuation::zero(3)},
                              {0, Valuation::additive(3, {9, 9, 9})}}));

  Profile two;
  two.m = 1;
  two.bidders = {Valuation::additive(1, {5}), Valuation::additive(1, {3})};
  Allocation to0(2, 1), to1(2, 1), nobody(2, 1);
  to0.owner[0] = 0;
  to1.owner[0] = 1;
  auto bank = explicit_bank({to0, to1, nobody}, 2, 1);
  // The loser overbidding wins at a price above value; still no gain.
  EXPECT_TRUE(check_truthful(bank, two, {{1, Valuation::additive(1, {10})}}));
}

TEST(Truthful, RandomDeviationSweep) {
  Rng rng(19);
  for (int trial = 0; trial < 6; ++trial) {
    Instance inst = gen_instance(trial % 2 ? "coverage" : "mild_desires", 6, 3,
                                 rng.fork());
    auto bank = build_chunking_bank(6, 3, 1, rng.fork());
    auto deviations = sample_deviations(inst.profile, 10, rng.fork());
    EXPECT_TRUE(check_truthful(bank, inst.profile, deviations)) << inst.name;
  }
}

TEST(Decomposition, AllHeavyAndAllLight) {
  // Two bidders splitting 8 items 4/4: heavy for k = 1 (cutoff 2).
  Profile heavy;
  heavy.m = 8;
  heavy.bidders = {Valuation::additive(8, {1, 1, 1, 1, 0, 0, 0, 0}),
                   Valuation::additive(8, {0, 0, 0, 0, 1, 1, 1, 1})};
  auto opt = brute_force_opt(heavy);
  auto rep = decomposition_report(heavy, opt, 1);
  EXPECT_EQ(rep.n0, BidderSet::full(2));
  EXPECT_EQ(rep.opt_rest, 0);
  EXPECT_TRUE(rep.grand_bundle_branch);

  // Unit-demand bidders are all light.
  Profile light;
  light.m = 4;
  for (int i = 0; i < 4; ++i) {
    std::vector<Value> w(4, 0);
    w[i] = 2;
    light.bidders.push_back(Valuation::additive(4, std::move(w)));
  }
  auto light_opt = brute_force_opt(light);
  auto rep2 = decomposition_report(light, light_opt, 1);
  EXPECT_TRUE(rep2.n0.empty());
  EXPECT_EQ(rep2.opt_n0, 0);
  // Greedy groups respect the 4k item cap.
  for (const auto& g : rep2.groups) {
    std::int64_t items = 0;
    for (int i : g.items()) items += light_opt.a_star.awarded(i).count();
    EXPECT_LE(items, 4);
  }
}

TEST(Decomposition, BranchBoundsImplyTheGuarantee) {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = gen_instance("explicit", 8, 3, rng.fork());
    auto opt = brute_force_opt(inst.profile);
    for (int k : {1, 2}) {
      auto rep = decomposition_report(inst.profile, opt, k);
      EXPECT_EQ(rep.opt_n0 + rep.opt_rest, rep.opt_total);
      // max branch covers half the optimum, the exact shape of the bound.
      EXPECT_GE(2 * std::max(rep.opt_n0, rep.opt_rest), rep.opt_total);
      const std::int64_t cap = 4 * k;
      for (const auto& g : rep.groups) {
        std::int64_t items = 0;
        for (int i : g.items()) items += opt.a_star.awarded(i).count();
        EXPECT_LE(items, cap);
      }
    }
    auto sq = decomposition_report(inst.profile, opt, 1, true);
    EXPECT_EQ(sq.opt_n0 + sq.opt_rest, sq.opt_total);
  }
}

// The z = 2 no-mixing family used throughout: any cross choice collides.
std::vector<Allocation> no_mixing_base_n2() {
  return {alloc_of(2, 4, {make_set({0, 1}), make_set({2, 3})}),
          alloc_of(2, 4, {make_set({0, 2}), make_set({1, 3})})};
}

TEST(Disjointness, BuildValidatesAndComputesSizes) {
  auto base = no_mixing_base_n2();
  auto inst = build_disjointness_instance(base, {0b01, 0b10}, BidderSet::full(2));
  EXPECT_EQ(inst.s, 4);
  EXPECT_EQ(inst.profile.n(), 2);
  EXPECT_EQ(inst.profile.bidders[0].value(make_set({0, 1})), 4);  // desired set

  // Unequal award sizes across the base are rejected.
  auto bad = base;
  bad[1] = alloc_of(2, 4, {make_set({0}), make_set({1, 2, 3})});
  EXPECT_THROW(build_disjointness_instance(bad, {0b01, 0b10}, BidderSet::full(2)),
               MalformedInputError);
}

TEST(Disjointness, ZeroSizeBidderLeavesV) {
  std::vector<Allocation> base = {
      alloc_of(2, 2, {make_set({0, 1}), ItemSet{}}),
      alloc_of(2, 2, {make_set({0, 1}), ItemSet{}}),
  };
  auto inst = build_disjointness_instance(base, {0b11, 0b01}, BidderSet::full(2));
  EXPECT_FALSE(inst.v_set.has(1));
  EXPECT_EQ(inst.profile.bidders[1].value(make_set({0})), 0);
  EXPECT_EQ(inst.s, 2);
}

TEST(Disjointness, NoMixingChecker) {
  EXPECT_TRUE(check_no_mixing(no_mixing_base_n2(), BidderSet::full(2)));
  // Duplicated allocations mix trivially.
  std::vector<Allocation> dup = {no_mixing_base_n2()[0], no_mixing_base_n2()[0]};
  EXPECT_FALSE(check_no_mixing(dup, BidderSet::full(2)));
}

TEST(Disjointness, SingleAllocationFamilySatisfiesEveryone) {
  std::vector<Allocation> base = {no_mixing_base_n2()[0]};
  auto inst = build_disjointness_instance(base, {0b1, 0b1}, BidderSet::full(2));
  auto bank = explicit_bank(base, 2, 4);
  EXPECT_EQ(optimize_over_bank(bank, inst.profile).welfare, 2 * inst.s);
}

TEST(Disjointness, EmbeddingIffOverAllInputPairs) {
  auto base = no_mixing_base_n2();
  auto bank = shattering_product_bank(base);
  EXPECT_EQ(bank.members.size(), 4u);
  for (std::uint64_t x0 = 1; x0 < 4; ++x0)
    for (std::uint64_t x1 = 1; x1 < 4; ++x1) {
      auto inst = build_disjointness_instance(base, {x0, x1}, BidderSet::full(2));
      EXPECT_TRUE(verify_embedding(bank, inst)) << x0 << "," << x1;
      // And the welfare itself matches the intersection test.
      const Value welfare = optimize_over_bank(bank, inst.profile).welfare;
      EXPECT_EQ(welfare == 2 * inst.s, (x0 & x1) != 0);
    }
}

TEST(Disjointness, EmbeddingPreconditionIsEnforced) {
  std::vector<Allocation> dup = {no_mixing_base_n2()[0], no_mixing_base_n2()[0]};
  auto inst = build_disjointness_instance(dup, {0b01, 0b10}, BidderSet::full(2));
  auto bank = shattering_product_bank(dup);
  EXPECT_THROW(verify_embedding(bank, inst), PreconditionFailedError);
}

TEST(HardInstance, DisjointPartsMakeOptEqualN) {
  auto profile = induced_hard_instance(4, 2, 5u);
  EXPECT_EQ(profile.n(), 4);
  EXPECT_EQ(brute_force_opt(profile).welfare, 4);

  auto p8 = induced_hard_instance(8, 4, 9u);
  EXPECT_EQ(p8.n(), 4);
  EXPECT_EQ(brute_force_opt(p8).welfare, 4);
}

TEST(HardInstance, ChunkingMechanismKeepsTheGuarantee) {
  Rng rng(47);
  for (int trial = 0; trial < 5; ++trial) {
    auto profile = induced_hard_instance(8, 4, rng.fork());
    auto out = chunking_mechanism(profile, 2, rng.fork());
    auto opt = brute_force_opt(profile);
    EXPECT_GE(out.welfare * 8, opt.welfare * 2);
  }
}

}  // namespace
