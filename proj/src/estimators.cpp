#include "contab/estimators.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace contab {
namespace {

std::uint64_t u64(std::int64_t v) { return static_cast<std::uint64_t>(v); }

Rational ratio(std::int64_t a, std::int64_t b) {
  Rational q(BigInt(static_cast<long>(a)), BigInt(static_cast<long>(b)));
  q.canonicalize();
  return q;
}

// ln[(1+1/m)^{(m-1)/2} (1+1/n)^{(n-1)/2}]
double oblong_log_factor(const TableSpec& spec) {
  const double m = static_cast<double>(spec.m);
  const double n = static_cast<double>(spec.n);
  return 0.5 * (m - 1.0) * std::log1p(1.0 / m) + 0.5 * (n - 1.0) * std::log1p(1.0 / n);
}

}  // namespace

SaddleParams saddle_params(const Rational& lambda) {
  if (sgn(lambda) <= 0) throw DomainError("saddle parameters need lambda > 0");
  SaddleParams p;
  p.lambda = lambda;
  p.A = lambda * (1 + lambda) / 2;
  p.r_squared = lambda / (1 + lambda);
  p.A.canonicalize();
  p.r_squared.canonicalize();
  p.r = std::sqrt(to_double(p.r_squared));
  return p;
}

SaddleParams saddle_params(const TableSpec& spec) {
  require_positive_density(spec);
  return saddle_params(density(spec));
}

LogEstimate good_estimate(const TableSpec& spec) {
  require_positive_density(spec);
  const std::int64_t cells = spec.m * spec.n;
  const std::int64_t total = spec.total();  // lambda * m * n
  const double rows = static_cast<double>(spec.m) * log_binomial(u64(spec.n + spec.s - 1), u64(spec.s));
  const double cols = static_cast<double>(spec.n) * log_binomial(u64(spec.m + spec.t - 1), u64(spec.t));
  const double all = log_binomial(u64(cells + total - 1), u64(total));
  return LogEstimate(rows + cols - all);
}

LogEstimate thm1_estimate(const TableSpec& spec) {
  return LogEstimate(good_estimate(spec).log() + 0.5);
}

LogEstimate thm1_closed_estimate(const TableSpec& spec) {
  const SaddleParams p = saddle_params(spec);
  const std::int64_t cells = spec.m * spec.n;
  const std::int64_t total = spec.total();
  const double m = static_cast<double>(spec.m);
  const double n = static_cast<double>(spec.n);

  // mn((1+lambda) ln(1+lambda) - lambda ln lambda), with mn*lambda = total.
  const double entropy = static_cast<double>(cells + total) * log_rational(1 + p.lambda) -
                         static_cast<double>(total) * log_rational(p.lambda);
  const double gauss = 0.5 * (m + n - 1.0) * (std::log(4.0 * std::numbers::pi) + log_rational(p.A));
  const double aspect = 0.5 * (n - 1.0) * std::log(m) + 0.5 * (m - 1.0) * std::log(n);
  Rational correction = (1 + 2 * p.A) / (24 * p.A) * (ratio(spec.m, spec.n) + ratio(spec.n, spec.m));
  correction.canonicalize();
  return LogEstimate(entropy - gauss - aspect + 0.5 - to_double(correction));
}

LogEstimate cor1_estimate(const TableSpec& spec) {
  require_positive_density(spec);
  Rational shifted = density(spec) + Rational(1, 2);
  shifted.canonicalize();
  const double dof = static_cast<double>((spec.m - 1) * (spec.n - 1));
  const double value = dof * log_rational(shifted) + log_factorial(u64(spec.m * spec.n)) -
                       static_cast<double>(spec.n) * log_factorial(u64(spec.m)) -
                       static_cast<double>(spec.m) * log_factorial(u64(spec.n)) + 0.5;
  return LogEstimate(value);
}

LogEstimate conj1_value(const TableSpec& spec, double delta) {
  const double base = good_estimate(spec).log() + oblong_log_factor(spec) - 0.5;
  return LogEstimate(base + delta / static_cast<double>(spec.m + spec.n));
}

EstimateInterval conj1_interval(const TableSpec& spec) {
  return EstimateInterval{conj1_value(spec, 0.0), conj1_value(spec, 2.0)};
}

double conj1_delta(const TableSpec& spec, const LogEstimate& count) {
  const double base = good_estimate(spec).log() + oblong_log_factor(spec) - 0.5;
  return static_cast<double>(spec.m + spec.n) * (count.log() - base);
}

double conj1_delta(const TableSpec& spec, const BigInt& count) {
  if (sgn(count) <= 0) throw DomainError("conj1_delta needs a positive count");
  return conj1_delta(spec, LogEstimate::from_count(count));
}

Remark1Decomposition remark1_decompose(const TableSpec& spec, const BigInt& count) {
  require_positive_density(spec);
  if (sgn(count) <= 0) throw DomainError("remark1_decompose needs a positive count");
  const std::int64_t total = spec.total();
  Remark1Decomposition d;
  d.N = binomial(u64(spec.m * spec.n + total - 1), u64(total));

  BigInt rows;
  BigInt cols;
  const BigInt row_ways = binomial(u64(spec.n + spec.s - 1), u64(spec.s));
  const BigInt col_ways = binomial(u64(spec.m + spec.t - 1), u64(spec.t));
  mpz_pow_ui(rows.get_mpz_t(), row_ways.get_mpz_t(), static_cast<unsigned long>(spec.m));
  mpz_pow_ui(cols.get_mpz_t(), col_ways.get_mpz_t(), static_cast<unsigned long>(spec.n));

  d.P1 = Rational(rows, d.N);
  d.P2 = Rational(cols, d.N);
  d.P1.canonicalize();
  d.P2.canonicalize();
  // N P1 P2 = rows * cols / N
  d.E = Rational(count * d.N, rows * cols);
  d.E.canonicalize();
  return d;
}

bool HypothesisReport::holds_for(double a) const { return min_a <= a; }

HypothesisReport hypothesis_lhs(const TableSpec& spec) {
  require_positive_density(spec);
  const Rational lambda = density(spec);
  const Rational spread = 1 + Rational(5, 6) * (ratio(spec.m, spec.n) + ratio(spec.n, spec.m));
  HypothesisReport r;
  r.lhs = (1 + 2 * lambda) * (1 + 2 * lambda) / (4 * lambda * (1 + lambda)) * spread;
  r.lhs.canonicalize();
  r.lhs_value = to_double(r.lhs);
  r.min_a = spec.n > 1 ? r.lhs_value / std::log(static_cast<double>(spec.n))
                       : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace contab
