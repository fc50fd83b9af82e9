#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mir::detail {

using Rational = boost::multiprecision::cpp_rational;

// max sum(x) s.t. A x <= b, x >= 0, with b >= 0 so the all-slack basis is
// feasible. Dense tableau simplex with Bland's rule (terminates on any input).
// Exact rational arithmetic: the caller compares the optimum for equality.
inline Rational maximize_sum(const std::vector<std::vector<std::int64_t>>& a,
                             const std::vector<std::int64_t>& b, int nvars) {
  const int rows = static_cast<int>(a.size());
  const int cols = nvars + rows + 1;  // vars, slacks, rhs
  std::vector<std::vector<Rational>> t(rows, std::vector<Rational>(cols, 0));
  std::vector<int> basis(rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < nvars; ++j) t[i][j] = a[i][j];
    t[i][nvars + i] = 1;
    t[i][cols - 1] = b[i];
    basis[i] = nvars + i;
  }
  // Objective coefficients: 1 for the structural variables, 0 for slacks.
  auto cost = [&](int j) { return j < nvars ? 1 : 0; };

  for (;;) {
    // Reduced cost r_j = c_j - c_B . column_j; Bland: lowest improving index.
    int enter = -1;
    for (int j = 0; j < cols - 1 && enter < 0; ++j) {
      Rational r = cost(j);
      for (int i = 0; i < rows; ++i)
        if (cost(basis[i]) != 0) r -= t[i][j];
      if (r > 0) enter = j;
    }
    if (enter < 0) break;

    int leave = -1;
    Rational best;
    for (int i = 0; i < rows; ++i) {
      if (t[i][enter] <= 0) continue;
      Rational ratio = t[i][cols - 1] / t[i][enter];
      if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave < 0) break;  // unbounded; cannot happen with the T={j} rows present

    Rational piv = t[leave][enter];
    for (auto& x : t[leave]) x /= piv;
    for (int i = 0; i < rows; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      Rational f = t[i][enter];
      for (int j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  Rational opt = 0;
  for (int i = 0; i < rows; ++i)
    if (cost(basis[i]) != 0) opt += t[i][cols - 1];
  return opt;
}

}  // namespace mir::detail
