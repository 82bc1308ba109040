// Sequential importance sampling for M(m, s; n, t).
//
// Columns are filled left to right and each column top to bottom. Entry x of
// row j is drawn with probability proportional to
//
//   C(r_j - x + c - 1, c - 1) * C(t_rem - x + b - 1, b - 1)
//
// where r_j is the remaining row sum, c the number of columns after this one,
// t_rem what is left of the current column and b the number of rows below.
// The support is restricted to values that keep the table completable, so the
// sampler never dead-ends and every valid table has positive probability;
// the mean of 1/q(table) is therefore an unbiased estimate of M.

#ifndef CONTAB_MONTECARLO_HPP
#define CONTAB_MONTECARLO_HPP

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "contab/core.hpp"

namespace contab {

using Table = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct SampledTable {
  Table table;
  double log_weight = 0.0;  // ln(1/q(table))
};

/// Draws one table. Reuses its log-factorial table across calls.
class ImportanceSampler {
 public:
  explicit ImportanceSampler(const TableSpec& spec);

  SampledTable operator()(std::mt19937_64& rng) const;
  const TableSpec& spec() const noexcept { return spec_; }

 private:
  double log_choose(std::int64_t a, std::int64_t b) const;

  TableSpec spec_;
  std::vector<double> log_fact_;
};

SampledTable sample_table(const TableSpec& spec, std::mt19937_64& rng);

/// The generator for sample `index` of a run seeded with `seed`. Each sample
/// is a pure function of (seed, index).
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

/// True when every row sums to s and every column to t.
bool has_margins(const Table& table, const TableSpec& spec);

struct McEstimate {
  LogEstimate mean;
  double log_standard_error = 0.0;  // -inf when every weight is identical
  std::uint64_t sample_count = 0;
  std::uint64_t seed = 0;
  double effective_sample_size = 0.0;

  LogEstimate standard_error() const { return LogEstimate(log_standard_error); }
};

/// Mean and standard error of `samples` importance weights. Deterministic in
/// (spec, samples, seed) for any thread count. Throws DomainError when
/// samples < 2 or lambda == 0.
McEstimate mc_estimate(const TableSpec& spec, std::uint64_t samples, std::uint64_t seed,
                       unsigned threads = 1);

/// Exact expectation of the importance weight, summed over every proposal
/// path with rational probabilities. Equals M iff the estimator is unbiased.
/// Intended for tiny instances.
Rational proposal_expected_weight(const TableSpec& spec);

}  // namespace contab

#endif  // CONTAB_MONTECARLO_HPP
