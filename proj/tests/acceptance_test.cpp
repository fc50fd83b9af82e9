// Acceptance suite: every criterion runs at its stated scale and tolerance and
// prints one PASS/FAIL line. Tolerances are pinned in code, not configured.

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mir/bank.hpp"
#include "mir/instance.hpp"
#include "mir/mechanisms.hpp"
#include "mir/partition.hpp"
#include "mir/rng.hpp"
#include "mir/verify.hpp"
#include "mir/welfare.hpp"

using namespace mir;

namespace {

void acceptance_line(int num, const char* name, bool pass, const std::string& detail) {
  std::printf("[ACCEPTANCE] criterion %d (%s): %s%s%s\n", num, name,
              pass ? "PASS" : "FAIL", detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
}

const char* kMonotoneKinds[] = {"explicit", "additive", "coverage", "mild_desires",
                                "single_minded"};
const char* kSubadditiveKinds[] = {"coverage", "mild_desires", "additive"};

TEST(Acceptance, C1ChunkingExactGuaranteeAndC9QueryBudget) {
  Config cfg;
  cfg.itemizing_z_max = 2'000'000;  // the m=12, k=3 cell needs ~2e4 samples
  int violations = 0, query_violations = 0, runs = 0;
  for (int m : {8, 12})
    for (int n : {2, 3, 4})
      for (int k : {1, 2, 3}) {
        for (int trial = 0; trial < 200; ++trial) {
          const std::uint64_t seed =
              0xC0FFEEull * m + 131 * n + 17 * k + static_cast<std::uint64_t>(trial);
          Instance inst = gen_instance(kMonotoneKinds[trial % 5], m, n, seed);
          const MechanismOutcome out = chunking_mechanism(inst.profile, k, seed, cfg);
          const Value opt = brute_force_opt(inst.profile, cfg).welfare;
          ++runs;
          if (out.welfare * m < opt * k) ++violations;
          const std::uint64_t bound =
              static_cast<std::uint64_t>(out.achieved_z) * (std::uint64_t{1} << (4 * k)) +
              1;
          for (std::uint64_t q : out.query_counts)
            if (q > bound) ++query_violations;
        }
      }
  acceptance_line(1, "chunking welfare*(m/k) >= OPT", violations == 0,
                  std::to_string(runs) + " runs, " + std::to_string(violations) +
                      " violations");
  acceptance_line(9, "per-bidder queries <= z*2^{4k}+1", query_violations == 0,
                  std::to_string(query_violations) + " violations");
  EXPECT_EQ(violations, 0);
  EXPECT_EQ(query_violations, 0);
}

TEST(Acceptance, C2DpMatchesExhaustiveEnumeration) {
  Rng rng(0xABCDEF);
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 4 + static_cast<int>(rng.below(5));  // 4..8
    const int n = 1 + static_cast<int>(rng.below(3));  // 1..3
    Instance inst = gen_instance(kMonotoneKinds[trial % 5], m, n, rng.fork());

    ChunkInstance ci;
    for (int j = 0; j < m; ++j) ci.chunks.push_back(ItemSet::single(j));
    for (int i = 0; i < n; ++i) ci.bidders.push_back(i);
    const Value dp = dp_optimize(ci, inst.profile).welfare;

    Value best = 0;
    std::vector<int> owner(m, -1);
    for (;;) {
      Allocation a(n, m);
      for (int j = 0; j < m; ++j) a.owner[j] = static_cast<std::int16_t>(owner[j]);
      best = std::max(best, welfare_of(a, inst.profile));
      int j = 0;
      while (j < m && ++owner[j] == n) owner[j++] = -1;
      if (j == m) break;
    }
    if (dp != best) ++mismatches;
  }
  acceptance_line(2, "dp_optimize == exhaustive enumeration", mismatches == 0,
                  "500 instances, " + std::to_string(mismatches) + " mismatches");
  EXPECT_EQ(mismatches, 0);
}

TEST(Acceptance, C3TruthfulnessAndC4IndividualRationality) {
  struct MechSpec {
    const char* name;
    int m, n, k, y;  // y < 0: not the efficient variant
  };
  const MechSpec specs[] = {{"chunking", 8, 3, 1, -1},
                            {"bucket-shattering", 6, 3, 1, -1},
                            {"efficient-bs", 6, 3, 1, 4}};
  int untruthful = 0, ir_violations = 0;
  std::uint64_t vcg_runs = 0;
  for (const auto& spec : specs) {
    Rng rng(std::string_view(spec.name).size() * 7919 + 5);
    for (int trial = 0; trial < 100; ++trial) {
      Instance inst =
          gen_instance(kMonotoneKinds[trial % 5], spec.m, spec.n, rng.fork());
      const std::uint64_t bank_seed = rng.fork();
      AllocationBank bank =
          spec.y < 0
              ? (std::string(spec.name) == "chunking"
                     ? build_chunking_bank(spec.m, spec.n, spec.k, bank_seed)
                     : build_bucket_shattering_bank(spec.m, spec.n, spec.k, bank_seed))
              : build_p_bucketing_bank(spec.m, spec.n, spec.k, spec.y, bank_seed);

      // The IR audit sees every VCG run check_truthful performs; payments are
      // judged against the profile as reported in that run.
      const RunAudit audit = [&](const Profile& as_run, const MechanismOutcome& out) {
        ++vcg_runs;
        for (int i = 0; i < as_run.n(); ++i) {
          if (out.payments[i] < 0 ||
              out.payments[i] > as_run.bidders[i].value(out.allocation.awarded(i)))
            ++ir_violations;
        }
      };
      if (!check_truthful(bank, inst.profile,
                          sample_deviations(inst.profile, 100, rng.fork()), Config{},
                          audit))
        ++untruthful;
    }
  }
  acceptance_line(3, "check_truthful over 100x100 deviations", untruthful == 0,
                  std::to_string(vcg_runs) + " VCG runs, " +
                      std::to_string(untruthful) + " instances with a profitable lie");
  acceptance_line(4, "0 <= p_i <= v_i(A_i) in every run", ir_violations == 0,
                  std::to_string(ir_violations) + " violations");
  EXPECT_EQ(untruthful, 0);
  EXPECT_EQ(ir_violations, 0);
}

TEST(Acceptance, C5ChunkingBankShattersSmallSets) {
  const int m = 10, r = 4, n = 3;
  auto list = find_r_itemizing(m, r, r, 100000, 2024u);
  auto bank = chunking_bank(list, n);
  int failures = 0, checked = 0;
  for (int size = 1; size <= r; ++size) {
    for (std::uint64_t s = first_combination(size);;) {
      auto w = check_d_shatters(bank, ItemSet(s), BidderSet::full(n), n, 50'000'000);
      ++checked;
      if (!w.verified) ++failures;
      if (!next_combination(s, m)) break;
    }
  }
  acceptance_line(5, "d=n shattering of all size<=4 sets at m=10", failures == 0,
                  std::to_string(checked) + " subsets, " + std::to_string(failures) +
                      " failures");
  EXPECT_EQ(failures, 0);
}

TEST(Acceptance, C6SetDisjointnessEmbeddingIff) {
  int failures = 0, cases = 0;
  for (int n : {2, 3}) {
    std::vector<Allocation> base;
    if (n == 2) {
      Allocation b1(2, 4), b2(2, 4);
      b1.award(0, make_set({0, 1}));
      b1.award(1, make_set({2, 3}));
      b2.award(0, make_set({0, 2}));
      b2.award(1, make_set({1, 3}));
      base = {b1, b2};
    } else {
      Allocation b1(3, 6), b2(3, 6);
      b1.award(0, make_set({0, 1}));
      b1.award(1, make_set({2, 3}));
      b1.award(2, make_set({4, 5}));
      b2.award(0, make_set({0, 2}));
      b2.award(1, make_set({1, 4}));
      b2.award(2, make_set({3, 5}));
      base = {b1, b2};
    }
    ASSERT_TRUE(check_no_mixing(base, BidderSet::full(n)));
    auto bank = shattering_product_bank(base);
    std::vector<std::uint64_t> xs(n, 1);
    for (;;) {
      auto inst = build_disjointness_instance(base, xs, BidderSet::full(n));
      ++cases;
      if (!verify_embedding(bank, inst)) ++failures;
      int i = 0;
      while (i < n && ++xs[i] == 4) xs[i++] = 1;
      if (i == n) break;
    }
  }
  acceptance_line(6, "welfare = 2s iff the X_i intersect", failures == 0,
                  std::to_string(cases) + " X-tuples, " + std::to_string(failures) +
                      " exceptions");
  EXPECT_EQ(failures, 0);
}

TEST(Acceptance, C7ItemizingSamplerConvergesAndRecertifies) {
  int certified = 0, recertify_failures = 0;
  for (int seed = 0; seed < 100; ++seed) {
    try {
      PartitionList l = find_r_itemizing(16, 8, 4, 4096, 9000u + seed);
      ++certified;
      PartitionList fresh;
      fresh.m = l.m;
      fresh.t = l.t;
      fresh.parts = l.parts;
      if (!certify_r_itemizing(fresh, 4)) ++recertify_failures;
    } catch (const SearchFailedError&) {
    }
  }
  acceptance_line(7, "find_r_itemizing(16,8,4) within z<=4096",
                  certified >= 95 && recertify_failures == 0,
                  std::to_string(certified) + "/100 certified, " +
                      std::to_string(recertify_failures) + " re-verify failures");
  EXPECT_GE(certified, 95);
  EXPECT_EQ(recertify_failures, 0);
}

TEST(Acceptance, C8BucketShatteringSanity) {
  const int m = 16, k = 1;
  int guarantee_hits = 0, pair_violations = 0;
  double worst_c = 0.0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 2 + trial % 3;
    const std::uint64_t seed = 0xB00Bull + 31 * trial;
    Instance inst = gen_instance(kSubadditiveKinds[trial % 3], m, n, seed);
    const MechanismOutcome full = bucket_shattering_mechanism(inst.profile, k, seed);
    const MechanismOutcome eff =
        efficient_bucket_shattering_mechanism(inst.profile, k, 6, seed);
    const Value opt = brute_force_opt(inst.profile).welfare;
    // welfare >= OPT / (c * sqrt(m/k)) with c = 4 and sqrt(16) = 4 exact.
    if (full.welfare * 16 >= opt) ++guarantee_hits;
    if (full.welfare > 0)
      worst_c = std::max(worst_c, static_cast<double>(opt) /
                                      (4.0 * static_cast<double>(full.welfare)));
    if (eff.welfare > full.welfare) ++pair_violations;
  }
  const bool pass = guarantee_hits >= (trials * 95) / 100 && pair_violations == 0;
  char cbuf[32];
  std::snprintf(cbuf, sizeof cbuf, "%.3f", worst_c);
  acceptance_line(8, "subadditive welfare >= OPT/(4*sqrt(m/k)), efficient <= full",
                  pass,
                  std::to_string(guarantee_hits) + "/" + std::to_string(trials) +
                      " within c=4 (worst empirical c=" + cbuf + "), " +
                      std::to_string(pair_violations) + " pairing violations");
  EXPECT_GE(guarantee_hits, (trials * 95) / 100);
  EXPECT_EQ(pair_violations, 0);
}

// ---- criterion 10: byte-identical CLI outputs at fixed seeds ----

namespace fs = std::filesystem;

struct CliRun {
  int exit_code;
  std::string out;
};

CliRun cli(const std::string& args, const fs::path& dir, const std::string& tag) {
  const fs::path out_file = dir / (tag + ".stdout");
  const std::string cmd = std::string(MIR_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Acceptance, C10EverySubcommandIsByteDeterministic) {
  const fs::path dir = fs::temp_directory_path() / "mir_acceptance_c10";
  fs::remove_all(dir);
  fs::create_directories(dir);

  int diffs = 0, failures = 0;
  auto check = [&](const std::string& tag, const std::string& args_template) {
    for (int round = 0; round < 2; ++round) {
      std::string args = args_template;
      const std::string token = "{OUT}";
      const std::string out_name =
          (dir / (tag + "_r" + std::to_string(round) + ".out")).string();
      for (std::size_t at = args.find(token); at != std::string::npos;
           at = args.find(token))
        args.replace(at, token.size(), out_name);
      auto r = cli(args, dir, tag + "_r" + std::to_string(round));
      if (r.exit_code != 0) ++failures;
    }
    const std::string a = slurp(dir / (tag + "_r0.out"));
    const std::string b = slurp(dir / (tag + "_r1.out"));
    const std::string sa = slurp(dir / (tag + "_r0.stdout"));
    const std::string sb = slurp(dir / (tag + "_r1.stdout"));
    // stdout mentions the output path (differs per round); compare files only,
    // plus stdout with the path scrubbed.
    if (a != b || a.empty()) ++diffs;
    std::string sa2 = sa, sb2 = sb;
    auto scrub = [&](std::string& s, int round) {
      const std::string needle = "_r" + std::to_string(round) + ".out";
      for (std::size_t at = s.find(needle); at != std::string::npos;
           at = s.find(needle))
        s.replace(at, needle.size(), "_rX.out");
    };
    scrub(sa2, 0);
    scrub(sb2, 1);
    if (sa2 != sb2) ++diffs;
  };

  // Shared fixtures.
  const std::string inst = (dir / "inst.json").string();
  const std::string inst16 = (dir / "inst16.json").string();
  const std::string parts = (dir / "parts.txt").string();
  ASSERT_EQ(cli("gen --kind explicit --m 8 --n 3 --seed 5 --out " + inst, dir, "fix1")
                .exit_code,
            0);
  ASSERT_EQ(cli("gen --kind coverage --m 16 --n 2 --seed 6 --out " + inst16, dir,
                "fix2")
                .exit_code,
            0);

  check("gen", "gen --kind coverage --m 8 --n 3 --seed 7 --out {OUT}");
  check("partition-find", "partition-find --m 12 --t 4 --r 4 --seed 3 --out {OUT}");
  check("run-chunking",
        "run --mechanism chunking --instance " + inst + " --k 2 --seed 5 --opt --out {OUT}");
  check("run-bs",
        "run --mechanism bucket-shattering --instance " + inst16 +
            " --k 1 --seed 5 --out {OUT}");
  check("run-effbs",
        "run --mechanism efficient-bs --instance " + inst16 +
            " --k 1 --y 4 --seed 5 --format jsonl --out {OUT}");
  check("opt", "opt --instance " + inst + " --out {OUT}");
  check("verify-embed", "verify --suite embedding --n 3 --out {OUT}");
  check("verify-decomp",
        "verify --suite decomposition --instance " + inst + " --k 1 --out {OUT}");
  check("sweep",
        "sweep --m 6,8 --k 1 --n 2 --kinds explicit --mechanisms chunking --trials 2 "
        "--seed 1 --out {OUT}");

  // report: fixed input, two re-emissions.
  ASSERT_EQ(cli("run --mechanism chunking --instance " + inst +
                    " --k 1 --seed 2 --opt --out " + (dir / "base.csv").string(),
                dir, "fix3")
                .exit_code,
            0);
  check("report", "report --in " + (dir / "base.csv").string() +
                      " --format jsonl --out {OUT}");

  acceptance_line(10, "byte-identical reports per subcommand", diffs == 0 && failures == 0,
                  std::to_string(diffs) + " diffs, " + std::to_string(failures) +
                      " nonzero exits");
  EXPECT_EQ(diffs, 0);
  EXPECT_EQ(failures, 0);
  fs::remove_all(dir);
}

}  // namespace
