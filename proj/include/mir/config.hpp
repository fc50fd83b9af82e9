#pragma once

#include <cstdint>

namespace mir {

// Every tunable the mechanisms and checkers consume. Defaults follow the
// documented analysis constants; the CLI exposes each as a flag.
struct Config {
  // Largest chunk count dp_optimize accepts (3^n subset iteration).
  int dp_budget = 20;
  // Cap on explicit enumeration work (bank materialization, shattering).
  std::uint64_t enum_budget = 20'000'000;
  // Cap on samples drawn by one itemizing-list search.
  int itemizing_z_max = 4096;
  // Regularity constants: a bucket is light when |B_s| <= c1*m/t, and a
  // regular partition keeps every light-bucket/chunk intersection <= c2*m/t^2.
  int c1 = 2;
  int c2 = 6;
  // Light-bucket threshold for balance reports: |B*_s(P)| <= c_bal*m/t.
  int c_bal = 4;
  // A bucketing counts as balanced when OPT(N_P) >= OPT(N_1) * 1/c_bal_ratio.
  int c_bal_ratio = 4;
  // Outer regular-list length for bucket shattering; <=0 means use m.
  int regular_z = 0;
  // Default number of sampled bidder bucketings for the efficient variant.
  int default_y = 8;
};

}  // namespace mir
