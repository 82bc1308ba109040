// Exact counting of constant-margin contingency tables.
//
// count_exact runs a column-by-column dynamic program over the multiset of
// remaining row sums ("deficits"). Rows are exchangeable because every row
// sum is s, so a state is a sorted deficit sequence. Each column is split into
// single-row steps processed in ascending deficit order; the intermediate
// state is (new deficits of processed rows, old deficits of the rest), and
// because processed values never exceed the smallest unprocessed one the pair
// collapses into a single sorted sequence. The forward pass stops halfway and
// the two halves are joined through the complementary state S - D.

#ifndef CONTAB_EXACT_HPP
#define CONTAB_EXACT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "contab/core.hpp"

namespace contab {

struct CountOptions {
  /// Cap on simultaneously stored DP states; exceeding it throws
  /// ResourceLimitError rather than thrashing.
  std::uint64_t max_states = std::uint64_t{1} << 28;
};

/// Remaining row sums after some columns have been filled.
struct DpState {
  std::vector<std::int64_t> sorted_deficits;  // nonincreasing, each in [0, s]
  std::int64_t columns_remaining = 0;
};

/// M(m, s; n, t). The DP always tracks min(m, n) rows.
BigInt count_exact(const TableSpec& spec, const CountOptions& options = {});

/// The weighted states after `columns` column steps, in the normalized
/// orientation (rows = min(m, n)). The weight of a state counts pairs
/// (labelled deficit vector with that multiset, partial table reaching it).
std::vector<std::pair<DpState, BigInt>> count_layer(const TableSpec& spec, std::int64_t columns,
                                                    const CountOptions& options = {});

/// Independent oracle: enumerates every matrix row by row.
/// Only for m*n <= 12 and s <= 20.
BigInt count_bruteforce(const TableSpec& spec);

inline constexpr std::int64_t kBruteforceMaxCells = 12;
inline constexpr std::int64_t kBruteforceMaxLineSum = 20;

}  // namespace contab

#endif  // CONTAB_EXACT_HPP
