// mir: maximal-in-range combinatorial-auction mechanisms at desk scale.
//
// Subcommands: gen, partition-find, run, opt, verify, sweep, report.
// Exit codes: 0 all asserts passed, 1 assertion failure, 2 scale/search
// refusal or malformed input.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mir/bank.hpp"
#include "mir/config.hpp"
#include "mir/errors.hpp"
#include "mir/instance.hpp"
#include "mir/mechanisms.hpp"
#include "mir/partition.hpp"
#include "mir/report.hpp"
#include "mir/valuation.hpp"
#include "mir/verify.hpp"
#include "mir/welfare.hpp"

namespace {

using namespace mir;

struct CommonFlags {
  int budget_dp = 20;
  std::uint64_t budget_enum = 20'000'000;
  int z_max = 4096;
  std::string constants;  // "c1,c2,c_bal"
  bool timings = false;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--budget-dp", flags.budget_dp, "chunk-count cap for the subset DP");
  cmd->add_option("--budget-enum", flags.budget_enum, "explicit-enumeration cap");
  cmd->add_option("--z-max", flags.z_max, "sample cap per itemizing-list search");
  cmd->add_option("--constants", flags.constants,
                  "c1,c2,c_bal regularity/balance constants");
  cmd->add_flag("--timings", flags.timings, "include wall-clock times in reports");
}

Config to_config(const CommonFlags& flags) {
  Config cfg;
  cfg.dp_budget = flags.budget_dp;
  cfg.enum_budget = flags.budget_enum;
  cfg.itemizing_z_max = flags.z_max;
  if (!flags.constants.empty()) {
    std::istringstream ss(flags.constants);
    std::string cell;
    std::vector<int> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stoi(cell));
    if (vals.size() != 3 && vals.size() != 4)
      throw MalformedInputError("--constants expects c1,c2,c_bal[,c_bal_ratio]");
    cfg.c1 = vals[0];
    cfg.c2 = vals[1];
    cfg.c_bal = vals[2];
    if (vals.size() == 4) cfg.c_bal_ratio = vals[3];
  }
  return cfg;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInputError("cannot open instance file: " + path);
  return read_instance(in);
}

void write_records(const std::string& path, const std::string& format,
                   const std::vector<ReportRecord>& records) {
  std::ofstream out(path);
  if (!out) throw MalformedInputError("cannot write: " + path);
  if (format == "csv")
    write_report_csv(out, records);
  else if (format == "jsonl")
    write_report_jsonl(out, records);
  else
    throw MalformedInputError("unknown report format: " + format);
}

ReportRecord make_record(const std::string& mechanism, const Instance& inst,
                         std::uint64_t seed, int k, const MechanismOutcome& out,
                         bool has_opt, Value opt, bool timings, std::int64_t wall_ms) {
  ReportRecord r;
  r.mechanism = mechanism;
  r.instance = inst.name;
  r.seed = seed;
  r.k = k;
  r.welfare = out.welfare;
  r.has_opt = has_opt;
  r.opt = opt;
  r.payments = out.payments;
  r.queries = out.query_counts;
  r.z = out.achieved_z;
  r.has_wall = timings;
  r.wall_ms = wall_ms;
  return r;
}

MechanismOutcome dispatch_mechanism(const std::string& name, const Profile& profile,
                                    int k, int y, std::uint64_t seed,
                                    const Config& cfg) {
  if (name == "chunking") return chunking_mechanism(profile, k, seed, cfg);
  if (name == "bucket-shattering") return bucket_shattering_mechanism(profile, k, seed, cfg);
  if (name == "efficient-bs")
    return efficient_bucket_shattering_mechanism(profile, k, y, seed, cfg);
  throw MalformedInputError("unknown mechanism: " + name);
}

int cmd_gen(const std::string& kind, int m, int n, std::uint64_t seed,
            const std::string& out_path) {
  Instance inst = gen_instance(kind, m, n, seed);
  std::ofstream out(out_path);
  if (!out) throw MalformedInputError("cannot write: " + out_path);
  write_instance(out, inst);
  std::cout << "wrote " << inst.name << " to " << out_path << "\n";
  return 0;
}

int cmd_partition_find(int m, int t, int r, int z_max, int z_cap, std::uint64_t seed,
                       const std::string& out_path) {
  int budget = z_max;
  for (;;) {
    try {
      PartitionList l = find_r_itemizing(m, t, r, budget, seed);
      std::ofstream out(out_path);
      if (!out) throw MalformedInputError("cannot write: " + out_path);
      write_partition_list(out, l);
      std::cout << "certified r=" << r << " with z=" << l.z() << " (drew "
                << l.samples_drawn << " samples)\n";
      return 0;
    } catch (const SearchFailedError& e) {
      if (budget >= z_cap) {
        std::cerr << "search failed: " << e.what() << "\n";
        if (e.witness)
          std::cerr << "uncovered witness: " << ItemSet(*e.witness).to_string() << "\n";
        return 2;
      }
      budget = std::min(z_cap, budget * 2);
      std::cout << "retrying with z-max=" << budget << "\n";
    }
  }
}

int cmd_run(const std::string& mechanism, const std::string& instance_path, int k,
            int y, std::uint64_t seed, bool seed_set, bool with_opt,
            const std::string& partitions_path, const std::string& out_path,
            const CommonFlags& flags) {
  const Config cfg = to_config(flags);
  Instance inst = load_instance(instance_path);
  const std::uint64_t use_seed = seed_set ? seed : inst.seed;

  const auto t0 = std::chrono::steady_clock::now();
  MechanismOutcome out;
  if (!partitions_path.empty()) {
    if (mechanism != "chunking")
      throw MalformedInputError("--partitions applies to the chunking mechanism");
    std::ifstream pin(partitions_path);
    if (!pin) throw MalformedInputError("cannot open partitions: " + partitions_path);
    out = run_mechanism(chunking_bank(read_partition_list(pin), inst.profile.n()),
                        inst.profile, cfg);
  } else {
    out = dispatch_mechanism(mechanism, inst.profile, k, y, use_seed, cfg);
  }
  const auto wall =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - t0)
          .count();

  bool has_opt = false;
  Value opt = 0;
  if (with_opt) {
    opt = brute_force_opt(inst.profile, cfg).welfare;
    has_opt = true;
  }
  write_records(out_path, flags.format,
                {make_record(mechanism, inst, use_seed, k, out, has_opt, opt,
                             flags.timings, wall)});
  std::cout << "welfare=" << out.welfare;
  if (has_opt) std::cout << " opt=" << opt;
  std::cout << " z=" << out.achieved_z << "\n";
  return 0;
}

int cmd_opt(const std::string& instance_path, const std::string& bank_path,
            const std::string& out_path, const CommonFlags& flags) {
  const Config cfg = to_config(flags);
  Instance inst = load_instance(instance_path);
  const Value opt = brute_force_opt(inst.profile, cfg).welfare;
  ReportRecord r;
  r.mechanism = "opt";
  r.instance = inst.name;
  r.seed = inst.seed;
  r.welfare = opt;
  r.has_opt = true;
  r.opt = opt;
  if (!bank_path.empty()) {
    std::ifstream bin(bank_path);
    if (!bin) throw MalformedInputError("cannot open bank: " + bank_path);
    AllocationBank bank = read_bank(bin);
    r.mechanism = "bank-opt";
    r.welfare = optimize_over_bank(bank, inst.profile, nullptr, cfg).welfare;
  }
  write_records(out_path, flags.format, {r});
  std::cout << "welfare=" << r.welfare << " opt=" << r.opt << "\n";
  return 0;
}

// One pass/fail line per verify check, JSONL.
struct CheckLog {
  std::vector<nlohmann::json> lines;
  bool all_pass = true;

  void add(const std::string& suite, const std::string& check, bool pass,
           nlohmann::json detail = {}) {
    nlohmann::json j;
    j["suite"] = suite;
    j["check"] = check;
    j["pass"] = pass;
    if (!detail.is_null() && !detail.empty()) j["detail"] = detail;
    lines.push_back(j);
    all_pass = all_pass && pass;
  }

  int finish(const std::string& out_path) const {
    std::ofstream out(out_path);
    if (!out) throw MalformedInputError("cannot write: " + out_path);
    for (const auto& j : lines) out << j.dump() << "\n";
    for (const auto& j : lines)
      std::cout << (j["pass"].get<bool>() ? "PASS " : "FAIL ")
                << j["suite"].get<std::string>() << "/"
                << j["check"].get<std::string>() << "\n";
    return all_pass ? 0 : 1;
  }
};

int cmd_verify(const std::string& suite, const std::string& instance_path,
               const std::string& mechanism, int k, int y, int d, int deviations,
               int embed_n, std::uint64_t seed, const std::string& out_path,
               const CommonFlags& flags) {
  const Config cfg = to_config(flags);
  CheckLog log;

  if (suite == "truthful") {
    Instance inst = load_instance(instance_path);
    AllocationBank bank =
        mechanism == "chunking"
            ? build_chunking_bank(inst.profile.m, inst.profile.n(), k, seed, cfg)
        : mechanism == "bucket-shattering"
            ? build_bucket_shattering_bank(inst.profile.m, inst.profile.n(), k, seed, cfg)
            : build_p_bucketing_bank(inst.profile.m, inst.profile.n(), k, y, seed, cfg);
    const auto devs = sample_deviations(inst.profile, deviations, seed + 1);
    const bool ok = check_truthful(bank, inst.profile, devs, cfg);
    log.add("truthful", mechanism + "@" + inst.name, ok,
            {{"deviations", devs.size()}});
  } else if (suite == "shatter") {
    Instance inst = load_instance(instance_path);
    const int r = 4 * k;
    AllocationBank bank =
        build_chunking_bank(inst.profile.m, inst.profile.n(), k, seed, cfg);
    const int dd = d > 0 ? d : inst.profile.n();
    bool all = true;
    for (int size = 1; size <= std::min(r, inst.profile.m); ++size) {
      for (std::uint64_t s = first_combination(size);;) {
        auto w = check_d_shatters(bank, ItemSet(s), BidderSet::full(inst.profile.n()),
                                  dd, cfg.enum_budget);
        all = all && w.verified;
        if (!next_combination(s, inst.profile.m)) break;
      }
    }
    log.add("shatter", "chunking r=" + std::to_string(r) + " d=" + std::to_string(dd),
            all);
  } else if (suite == "embedding") {
    // Built-in hand-verified no-mixing family at z = 2.
    std::vector<Allocation> base;
    if (embed_n == 2) {
      Allocation b1(2, 4), b2(2, 4);
      b1.award(0, make_set({0, 1}));
      b1.award(1, make_set({2, 3}));
      b2.award(0, make_set({0, 2}));
      b2.award(1, make_set({1, 3}));
      base = {b1, b2};
    } else if (embed_n == 3) {
      Allocation b1(3, 6), b2(3, 6);
      b1.award(0, make_set({0, 1}));
      b1.award(1, make_set({2, 3}));
      b1.award(2, make_set({4, 5}));
      b2.award(0, make_set({0, 2}));
      b2.award(1, make_set({1, 4}));
      b2.award(2, make_set({3, 5}));
      base = {b1, b2};
    } else {
      throw MalformedInputError("embedding suite supports --n 2 or 3");
    }
    auto bank = shattering_product_bank(base, cfg.enum_budget);
    const int n = base[0].n;
    bool all = true;
    std::uint64_t cases = 0;
    std::vector<std::uint64_t> xs(n, 1);
    for (;;) {
      auto inst = build_disjointness_instance(base, xs, BidderSet::full(n));
      all = all && verify_embedding(bank, inst, cfg);
      ++cases;
      int i = 0;
      while (i < n && ++xs[i] == 4) xs[i++] = 1;
      if (i == n) break;
    }
    log.add("embedding", "z=2 n=" + std::to_string(n), all, {{"cases", cases}});
  } else if (suite == "decomposition") {
    Instance inst = load_instance(instance_path);
    auto opt = brute_force_opt(inst.profile, cfg);
    for (bool sqrt_mode : {false, true}) {
      auto rep = decomposition_report(inst.profile, opt, k, sqrt_mode);
      const bool ok = rep.opt_n0 + rep.opt_rest == rep.opt_total &&
                      2 * std::max(rep.opt_n0, rep.opt_rest) >= rep.opt_total;
      log.add("decomposition", sqrt_mode ? "sqrt-thresholds" : "general-thresholds", ok,
              {{"opt_n0", rep.opt_n0},
               {"opt_rest", rep.opt_rest},
               {"branch", rep.grand_bundle_branch ? "grand-bundle" : "shattering"}});
    }
  } else {
    throw MalformedInputError("unknown verify suite: " + suite);
  }
  return log.finish(out_path);
}

int cmd_sweep(const std::vector<int>& ms, const std::vector<int>& ks,
              const std::vector<int>& ns, const std::vector<std::string>& kinds,
              const std::vector<std::string>& mechanisms, int trials,
              std::uint64_t seed, int y, const std::string& out_path,
              const CommonFlags& flags) {
  const Config cfg = to_config(flags);
  std::vector<ReportRecord> records;
  bool asserts_ok = true;
  int cell = 0;
  for (int m : ms)
    for (int k : ks)
      for (int n : ns)
        for (const auto& kind : kinds) {
          ++cell;
          double worst = 1.0, sum = 0.0;
          int done = 0;
          for (int trial = 0; trial < trials; ++trial) {
            const std::uint64_t s =
                seed + 1000003ull * cell + static_cast<std::uint64_t>(trial);
            Instance inst = gen_instance(kind, m, n, s);
            Value opt = 0;
            try {
              opt = brute_force_opt(inst.profile, cfg).welfare;
            } catch (const ScaleRefusedError& e) {
              std::cout << "cell " << cell << " scale-refused (oracle): " << e.what()
                        << "\n";
              break;
            }
            for (const auto& mech : mechanisms) {
              const auto t0 = std::chrono::steady_clock::now();
              MechanismOutcome out;
              try {
                out = dispatch_mechanism(mech, inst.profile, k, y, s, cfg);
              } catch (const ScaleRefusedError& e) {
                std::cout << "cell " << cell << " scale-refused: " << e.what() << "\n";
                continue;
              } catch (const SearchFailedError& e) {
                std::cout << "cell " << cell << " search-failed: " << e.what() << "\n";
                continue;
              }
              const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
              records.push_back(make_record(mech, inst, s, k, out, true, opt,
                                            flags.timings, wall));
              if (out.welfare > 0) {
                const double ratio =
                    static_cast<double>(opt) / static_cast<double>(out.welfare);
                worst = std::max(worst, ratio);
                sum += ratio;
                ++done;
              }
              // Hard guarantee: the chunking mechanism keeps welfare*(m/k) >= OPT.
              if (mech == "chunking" && out.welfare * m < opt * k) {
                asserts_ok = false;
                std::cout << "VIOLATION cell " << cell << " " << inst.name
                          << ": welfare " << out.welfare << " * " << m << "/" << k
                          << " < opt " << opt << "\n";
              }
            }
          }
          if (done > 0)
            std::cout << "cell " << cell << " m=" << m << " k=" << k << " n=" << n
                      << " kind=" << kind << " worst=" << worst
                      << " mean=" << sum / done << "\n";
        }
  write_records(out_path, flags.format, records);
  return asserts_ok ? 0 : 1;
}

int cmd_report(const std::string& in_path, const std::string& format,
               const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw MalformedInputError("cannot open report: " + in_path);
  std::string first;
  std::getline(in, first);
  in.seekg(0);
  std::vector<ReportRecord> records = first.rfind("mechanism,", 0) == 0
                                          ? read_report_csv(in)
                                          : read_report_jsonl(in);
  write_records(out_path, format, records);
  std::cout << "rewrote " << records.size() << " records as " << format << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maximal-in-range combinatorial-auction mechanisms"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a reproducible instance file");
  std::string gen_kind = "additive", gen_out = "instance.json";
  int gen_m = 8, gen_n = 2;
  std::uint64_t gen_seed = 0;
  gen->add_option("--kind", gen_kind,
                  "additive|coverage|mild_desires|single_minded|explicit");
  gen->add_option("--m", gen_m, "items")->required();
  gen->add_option("--n", gen_n, "bidders")->required();
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "output path")->required();

  // partition-find
  auto* pfind = app.add_subcommand("partition-find", "search a certified itemizing list");
  int pf_m = 8, pf_t = 4, pf_r = 4, pf_zmax = 4096, pf_zcap = 1 << 20;
  std::uint64_t pf_seed = 0;
  std::string pf_out = "partitions.txt";
  pfind->add_option("--m", pf_m)->required();
  pfind->add_option("--t", pf_t)->required();
  pfind->add_option("--r", pf_r)->required();
  pfind->add_option("--z-max", pf_zmax, "initial sample budget");
  pfind->add_option("--z-cap", pf_zcap, "budget ceiling for doubling retries");
  pfind->add_option("--seed", pf_seed);
  pfind->add_option("--out", pf_out)->required();

  // run
  auto* run = app.add_subcommand("run", "run a mechanism on an instance");
  CommonFlags run_flags;
  std::string run_mech = "chunking", run_instance, run_out = "report.csv",
              run_partitions;
  int run_k = 1, run_y = 8;
  std::uint64_t run_seed = 0;
  bool run_opt = false;
  run->add_option("--mechanism", run_mech, "chunking|bucket-shattering|efficient-bs");
  run->add_option("--instance", run_instance)->required();
  run->add_option("--k", run_k, "budget exponent");
  run->add_option("--y", run_y, "bidder bucketings for efficient-bs");
  auto* run_seed_opt = run->add_option("--seed", run_seed);
  run->add_flag("--opt", run_opt, "also run the brute-force oracle");
  run->add_option("--partitions", run_partitions, "pre-built partition list (chunking)");
  run->add_option("--out", run_out)->required();
  run->add_option("--format", run_flags.format, "csv|jsonl");
  add_common(run, run_flags);

  // opt
  auto* opt = app.add_subcommand("opt", "brute-force optimum (optionally in-bank)");
  CommonFlags opt_flags;
  std::string opt_instance, opt_bank, opt_out = "opt.csv";
  opt->add_option("--instance", opt_instance)->required();
  opt->add_option("--bank", opt_bank, "bank descriptor file");
  opt->add_option("--out", opt_out)->required();
  opt->add_option("--format", opt_flags.format, "csv|jsonl");
  add_common(opt, opt_flags);

  // verify
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  CommonFlags verify_flags;
  std::string verify_suite, verify_instance, verify_mech = "chunking",
              verify_out = "verify.jsonl";
  int verify_k = 1, verify_y = 8, verify_d = 0, verify_devs = 100, verify_n = 2;
  std::uint64_t verify_seed = 0;
  verify->add_option("--suite", verify_suite,
                     "truthful|shatter|embedding|decomposition")->required();
  verify->add_option("--instance", verify_instance);
  verify->add_option("--mechanism", verify_mech);
  verify->add_option("--k", verify_k);
  verify->add_option("--y", verify_y);
  verify->add_option("--d", verify_d, "shattering degree (default n)");
  verify->add_option("--deviations", verify_devs, "misreports per bidder");
  verify->add_option("--n", verify_n, "embedding bidder count (2 or 3)");
  verify->add_option("--seed", verify_seed);
  verify->add_option("--out", verify_out)->required();
  add_common(verify, verify_flags);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "ratio sweep over a parameter grid");
  CommonFlags sweep_flags;
  std::vector<int> sweep_m{8}, sweep_k{1}, sweep_n{2};
  std::vector<std::string> sweep_kinds{"explicit"}, sweep_mechs{"chunking"};
  int sweep_trials = 10, sweep_y = 8;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out = "sweep.csv";
  sweep->add_option("--m", sweep_m, "item counts")->delimiter(',');
  sweep->add_option("--k", sweep_k, "budget exponents")->delimiter(',');
  sweep->add_option("--n", sweep_n, "bidder counts")->delimiter(',');
  sweep->add_option("--kinds", sweep_kinds)->delimiter(',');
  sweep->add_option("--mechanisms", sweep_mechs)->delimiter(',');
  sweep->add_option("--trials", sweep_trials);
  sweep->add_option("--y", sweep_y);
  sweep->add_option("--seed", sweep_seed);
  sweep->add_option("--out", sweep_out)->required();
  sweep->add_option("--format", sweep_flags.format, "csv|jsonl");
  add_common(sweep, sweep_flags);

  // report
  auto* report = app.add_subcommand("report", "re-emit a report in another format");
  std::string report_in, report_format = "jsonl", report_out = "report.out";
  report->add_option("--in", report_in)->required();
  report->add_option("--format", report_format, "csv|jsonl");
  report->add_option("--out", report_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_kind, gen_m, gen_n, gen_seed, gen_out);
    if (pfind->parsed())
      return cmd_partition_find(pf_m, pf_t, pf_r, pf_zmax, pf_zcap, pf_seed, pf_out);
    if (run->parsed())
      return cmd_run(run_mech, run_instance, run_k, run_y, run_seed,
                     run_seed_opt->count() > 0, run_opt, run_partitions, run_out,
                     run_flags);
    if (opt->parsed()) return cmd_opt(opt_instance, opt_bank, opt_out, opt_flags);
    if (verify->parsed())
      return cmd_verify(verify_suite, verify_instance, verify_mech, verify_k, verify_y,
                        verify_d, verify_devs, verify_n, verify_seed, verify_out,
                        verify_flags);
    if (sweep->parsed())
      return cmd_sweep(sweep_m, sweep_k, sweep_n, sweep_kinds, sweep_mechs,
                       sweep_trials, sweep_seed, sweep_y, sweep_out, sweep_flags);
    if (report->parsed()) return cmd_report(report_in, report_format, report_out);
  } catch (const ScaleRefusedError& e) {
    std::cerr << "scale-refused: " << e.what() << "\n";
    return 2;
  } catch (const SearchFailedError& e) {
    std::cerr << "search-failed: " << e.what() << "\n";
    return 2;
  } catch (const MalformedInputError& e) {
    std::cerr << "malformed input: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionFailedError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
