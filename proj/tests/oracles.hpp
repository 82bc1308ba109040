// Reference implementations and frozen values the tests compare against.
// Nothing here calls into the library.

#ifndef CONTAB_TESTS_ORACLES_HPP
#define CONTAB_TESTS_ORACLES_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <gmpxx.h>

namespace oracle {

// Cell-by-cell backtracking in row-major order, tracking what every row and
// column still needs. Each cell is bounded by both, so only exact completions
// survive to the last cell.
inline void fill(int cell, int m, int n, std::vector<int>& row, std::vector<int>& col, mpz_class& hits) {
  if (cell == m * n) {
    ++hits;
    return;
  }
  const int i = cell / n;
  const int j = cell % n;
  const bool last_in_row = j == n - 1;
  const bool last_in_col = i == m - 1;
  const int hi = std::min(row[i], col[j]);
  for (int x = 0; x <= hi; ++x) {
    if (last_in_row && x != row[i]) continue;
    if (last_in_col && x != col[j]) continue;
    row[i] -= x;
    col[j] -= x;
    fill(cell + 1, m, n, row, col, hits);
    row[i] += x;
    col[j] += x;
  }
}

inline mpz_class count(int m, int s, int n, int t) {
  if (m * s != n * t) return 0;
  std::vector<int> row(m, s);
  std::vector<int> col(n, t);
  mpz_class hits = 0;
  fill(0, m, n, row, col, hits);
  return hits;
}

// Partial tables: `cols` columns of `rows` entries, each column summing to
// t and each row to at most s, grouped by the nonincreasing sequence of
// what every row still needs.
inline std::map<std::vector<int>, mpz_class> partial_tables(int rows, int s, int t, int cols) {
  std::map<std::vector<int>, mpz_class> out;
  std::vector<int> left(rows, s);
  std::function<void(int, int, int)> place = [&](int col, int row, int col_left) {
    if (col == cols) {
      std::vector<int> key = left;
      std::sort(key.rbegin(), key.rend());
      ++out[key];
      return;
    }
    if (row == rows) {
      if (col_left == 0) place(col + 1, 0, t);
      return;
    }
    for (int x = 0; x <= std::min(left[row], col_left); ++x) {
      left[row] -= x;
      place(col, row + 1, col_left - x);
      left[row] += x;
    }
  };
  place(0, 0, t);
  return out;
}

// Pascal's triangle, row by row.
inline std::vector<std::vector<mpz_class>> pascal(int rows) {
  std::vector<std::vector<mpz_class>> c(rows + 1);
  for (int a = 0; a <= rows; ++a) {
    c[a].assign(a + 1, 1);
    for (int b = 1; b < a; ++b) c[a][b] = c[a - 1][b - 1] + c[a - 1][b];
  }
  return c;
}

inline mpz_class choose(long a, long b) {
  if (b < 0 || a < b) return 0;
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(b));
  return out;
}

// Probability that the sequential proposal (columns left to right, rows top
// to bottom, entry x weighted by C(r-x+c-1, c-1) C(left-x+b-1, b-1) on the
// values that keep the table completable) produces `table`.
inline mpq_class proposal_probability(const std::vector<std::vector<int>>& table, int s, int t) {
  const int m = static_cast<int>(table.size());
  const int n = static_cast<int>(table[0].size());
  std::vector<int> row(m, s);
  mpq_class prob = 1;
  for (int k = 0; k < n; ++k) {
    int left = t;
    const int c = n - k - 1;
    for (int j = 0; j < m; ++j) {
      const int b = m - j - 1;
      int below = 0;
      for (int i = j + 1; i < m; ++i) below += row[i];
      const int lo = std::max(0, left - below);
      const int hi = std::min(row[j], left);
      const int x = table[j][k];
      if (c > 0 && b > 0) {
        auto weight = [&](int v) -> mpz_class { return choose(row[j] - v + c - 1, c - 1) * choose(left - v + b - 1, b - 1); };
        mpz_class total = 0;
        for (int v = lo; v <= hi; ++v) total += weight(v);
        prob *= mpq_class(weight(x), total);
        prob.canonicalize();
      }
      row[j] -= x;
      left -= x;
    }
  }
  return prob;
}

// Natural logs evaluated in 40-digit arithmetic, frozen.
struct FrozenRow {
  int m, s, n, t;
  double ln_good;
  double ln_closed;
  double ln_cor1;
  double ln_conj_low;
  double ln_conj_high;
};

inline const std::vector<FrozenRow>& frozen_rows() {
  static const std::vector<FrozenRow> rows = {
      {3, 100, 3, 100, 16.137137601978861339, 16.627274935219075221, 16.637056703968068932,
       16.212501746882423194, 16.545835080215756528},
      {3, 98, 49, 6, 156.30057937998275109, 156.79458598919813747, 156.97877640432738709,
       156.57312642805499878, 156.61158796651653724},
      {3, 99, 9, 33, 49.103588066253347444, 49.599568183828796039, 49.60377352961669732,
       49.312712201336433577, 49.479378868003100244},
      {10, 20, 10, 20, 135.55602561823017217, 136.05499311849768533, 136.37067337585974452,
       135.91381723646909591, 136.01381723646909591},
      {18, 13, 18, 13, 294.06857554016652126, 294.56805234036760469, 301.02827010875173562,
       294.48771830176120931, 294.54327385731676486},
      {30, 3, 30, 3, 212.17735760528777024, 212.67043060574610784, 317.87698498232725836,
       212.62826246715450548, 212.66159580048783882},
      {2, 2, 2, 2, 0.83910109318302508587, 1.3054938934656809765, 1.310930216216328764,
       0.74456620129118946785, 1.2445662012911894679},
      {2, 3, 3, 2, 1.7654421609106815922, 2.2424310145534286386, 2.2272209480904838291,
       1.7558567874165447107, 2.1558567874165447107},
      {200, 200, 200, 200, 53892.219954967606655, 53892.719951582191941, 54636.135451055248531,
       53892.712475728303431, 53892.717475728303431},
  };
  return rows;
}

// The published table as printed: G, thm1, conj1 midpoint and half-width, exact.
struct TableOneRow {
  int m, s, n, t;
  const char* good;
  const char* thm1;
  const char* conj1;
  const char* exact;
};

inline const std::vector<TableOneRow>& table_one() {
  static const std::vector<TableOneRow> rows = {
      {3, 100, 3, 100, "1.019e7", "1.680e7", "(1.316 ± 0.217)e7", "1.32690e7"},
      {3, 98, 49, 6, "7.594e67", "1.252e68", "(1.017 ± 0.020)e68", "1.01100e68"},
      {3, 99, 9, 33, "2.116e21", "3.488e21", "(2.844 ± 0.236)e21", "2.79207e21"},
      {10, 20, 10, 20, "7.434e58", "1.226e59", "(1.119 ± 0.056)e59", "1.09747e59"},
      {18, 13, 18, 13, "5.157e127", "8.502e127", "(8.065 ± 0.224)e127", "7.94500e127"},
      {30, 3, 30, 3, "1.404e92", "2.315e92", "(2.242 ± 0.037)e92", "2.22931e92"},
  };
  return rows;
}

// The exact 10 x 10 count with line sums 20.
inline const char* kTenByTen = "109747013267158785094707802642987987584407810644214477122435";

}  // namespace oracle

#endif  // CONTAB_TESTS_ORACLES_HPP
