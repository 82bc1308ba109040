#include "contab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <span>
#include <stdexcept>
#include <thread>

namespace contab {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Feasible values for the entry at (row, column) given what is left.
struct Support {
  std::int64_t lo;
  std::int64_t hi;
  bool forced;
};

Support support(std::int64_t row_left, std::int64_t col_left, std::int64_t below_sum,
                std::int64_t cols_after, std::int64_t rows_below) {
  if (cols_after == 0) return {row_left, row_left, true};
  if (rows_below == 0) return {col_left, col_left, true};
  const std::int64_t lo = std::max<std::int64_t>(0, col_left - below_sum);
  const std::int64_t hi = std::min(row_left, col_left);
  return {lo, hi, lo == hi};
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 64) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace

ImportanceSampler::ImportanceSampler(const TableSpec& spec) : spec_(spec) {
  require_positive_density(spec_);
  const auto top = static_cast<std::size_t>(std::max(spec_.s + spec_.n, spec_.t + spec_.m)) + 1;
  log_fact_.resize(top + 1);
  for (std::size_t k = 0; k <= top; ++k) log_fact_[k] = std::lgamma(static_cast<double>(k) + 1.0);
}

double ImportanceSampler::log_choose(std::int64_t a, std::int64_t b) const {
  return log_fact_[static_cast<std::size_t>(a)] - log_fact_[static_cast<std::size_t>(b)] -
         log_fact_[static_cast<std::size_t>(a - b)];
}

SampledTable ImportanceSampler::operator()(std::mt19937_64& rng) const {
  const std::int64_t m = spec_.m;
  const std::int64_t n = spec_.n;
  SampledTable out{Table::Zero(m, n), 0.0};
  std::vector<std::int64_t> row_left(static_cast<std::size_t>(m), spec_.s);
  std::vector<double> logw;

  for (std::int64_t k = 0; k < n; ++k) {
    std::int64_t col_left = spec_.t;
    std::int64_t below_sum = spec_.total() - k * spec_.t;  // sum of row_left over all rows
    for (std::int64_t j = 0; j < m; ++j) {
      const std::int64_t r = row_left[static_cast<std::size_t>(j)];
      below_sum -= r;
      const std::int64_t cols_after = n - k - 1;
      const std::int64_t rows_below = m - j - 1;
      const Support sup = support(r, col_left, below_sum, cols_after, rows_below);
      std::int64_t x = sup.lo;
      if (!sup.forced) {
        logw.resize(static_cast<std::size_t>(sup.hi - sup.lo + 1));
        double top = kNegInf;
        for (std::int64_t v = sup.lo; v <= sup.hi; ++v) {
          const double lw = log_choose(r - v + cols_after - 1, cols_after - 1) +
                            log_choose(col_left - v + rows_below - 1, rows_below - 1);
          logw[static_cast<std::size_t>(v - sup.lo)] = lw;
          top = std::max(top, lw);
        }
        double total = 0.0;
        for (double& lw : logw) {
          lw = std::exp(lw - top);
          total += lw;
        }
        const double u = uniform01(rng) * total;
        double acc = 0.0;
        std::size_t pick = logw.size() - 1;
        for (std::size_t i = 0; i < logw.size(); ++i) {
          acc += logw[i];
          if (u < acc) {
            pick = i;
            break;
          }
        }
        x = sup.lo + static_cast<std::int64_t>(pick);
        out.log_weight += std::log(total) - std::log(logw[pick]);
      }
      out.table(j, k) = x;
      row_left[static_cast<std::size_t>(j)] = r - x;
      col_left -= x;
    }
  }
  return out;
}

SampledTable sample_table(const TableSpec& spec, std::mt19937_64& rng) {
  return ImportanceSampler(spec)(rng);
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

bool has_margins(const Table& table, const TableSpec& spec) {
  if (table.rows() != spec.m || table.cols() != spec.n) return false;
  if ((table.array() < 0).any()) return false;
  return (table.rowwise().sum().array() == spec.s).all() &&
         (table.colwise().sum().array() == spec.t).all();
}

McEstimate mc_estimate(const TableSpec& spec, std::uint64_t samples, std::uint64_t seed,
                       unsigned threads) {
  if (samples < 2) throw DomainError("mc_estimate needs at least 2 samples for a variance");
  const ImportanceSampler sampler(spec);
  std::vector<double> log_weights(samples);

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      auto rng = sample_rng(seed, i);
      const SampledTable draw = sampler(rng);
      if (!has_margins(draw.table, spec)) {
        throw std::logic_error("importance sampler produced a table with wrong margins");
      }
      log_weights[i] = draw.log_weight;
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(samples)));
  if (threads == 1) {
    work(0, samples);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::uint64_t chunk = (samples + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t begin = std::min<std::uint64_t>(samples, w * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(samples, begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> scaled(samples);
  std::vector<double> squared(samples);
  for (std::uint64_t i = 0; i < samples; ++i) {
    scaled[i] = std::exp(log_weights[i] - top);
    squared[i] = scaled[i] * scaled[i];
  }
  const double s1 = pairwise_sum(scaled);
  const double s2 = pairwise_sum(squared);
  const auto count = static_cast<double>(samples);

  McEstimate est;
  est.sample_count = samples;
  est.seed = seed;
  est.mean = LogEstimate(top + std::log(s1 / count));
  const double variance = (s2 - s1 * s1 / count) / (count - 1.0);
  est.log_standard_error = variance > 0.0 ? top + 0.5 * std::log(variance / count) : kNegInf;
  est.effective_sample_size = std::min(count, s1 * s1 / s2);
  return est;
}

// ---------------------------------------------------------------------------

namespace {

struct PathEnumerator {
  const TableSpec& spec;
  std::vector<std::int64_t> row_left;
  Rational expectation = 0;

  void visit(std::int64_t j, std::int64_t k, std::int64_t col_left, const Rational& prob,
             const Rational& weight) {
    if (k == spec.n) {
      expectation += prob * weight;
      return;
    }
    if (j == spec.m) {
      visit(0, k + 1, spec.t, prob, weight);
      return;
    }
    std::int64_t below_sum = 0;
    for (std::int64_t i = j + 1; i < spec.m; ++i) below_sum += row_left[static_cast<std::size_t>(i)];
    const std::int64_t r = row_left[static_cast<std::size_t>(j)];
    const std::int64_t cols_after = spec.n - k - 1;
    const std::int64_t rows_below = spec.m - j - 1;
    const Support sup = support(r, col_left, below_sum, cols_after, rows_below);

    std::vector<BigInt> w;
    BigInt total = 0;
    for (std::int64_t v = sup.lo; v <= sup.hi; ++v) {
      BigInt wv = 1;
      if (!sup.forced) {
        wv = binomial(static_cast<std::uint64_t>(r - v + cols_after - 1),
                      static_cast<std::uint64_t>(cols_after - 1)) *
             binomial(static_cast<std::uint64_t>(col_left - v + rows_below - 1),
                      static_cast<std::uint64_t>(rows_below - 1));
      }
      total += wv;
      w.push_back(wv);
    }
    for (std::int64_t v = sup.lo; v <= sup.hi; ++v) {
      const BigInt& wv = w[static_cast<std::size_t>(v - sup.lo)];
      if (sgn(wv) == 0) continue;
      Rational p(wv, total);
      p.canonicalize();
      row_left[static_cast<std::size_t>(j)] = r - v;
      visit(j + 1, k, col_left - v, prob * p, weight / p);
      row_left[static_cast<std::size_t>(j)] = r;
    }
  }
};

}  // namespace

Rational proposal_expected_weight(const TableSpec& spec) {
  require_positive_density(spec);
  PathEnumerator e{spec, std::vector<std::int64_t>(static_cast<std::size_t>(spec.m), spec.s), 0};
  e.visit(0, 0, spec.t, Rational(1), Rational(1));
  return e.expectation;
}

}  // namespace contab
