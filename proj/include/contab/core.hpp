// Domain types and numeric helpers shared by every contab module.
//
// A TableSpec (m, s, n, t) names the set of m x n nonnegative integer
// matrices whose rows all sum to s and whose columns all sum to t. Counts are
// arbitrary-precision integers; estimates are carried as natural logarithms
// and only converted to base 10 when rendered.

#ifndef CONTAB_CORE_HPP
#define CONTAB_CORE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace contab {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Invalid input: balance violation, nonpositive dimension, zero density, ...
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured resource cap (stored DP states, quadrature evaluations) was hit.
class ResourceLimitError : public std::runtime_error {
 public:
  ResourceLimitError(const std::string& what, std::uint64_t cap)
      : std::runtime_error(what), cap_(cap) {}
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t cap_;
};

struct TableSpec {
  std::int64_t m = 1;  // rows
  std::int64_t s = 0;  // common row sum
  std::int64_t n = 1;  // columns
  std::int64_t t = 0;  // common column sum

  /// Sum of all entries, m*s == n*t.
  std::int64_t total() const noexcept { return m * s; }
  friend bool operator==(const TableSpec&, const TableSpec&) = default;
};

/// Validates (m, s, n, t). Throws DomainError unless m, n >= 1, s, t >= 0 and
/// m*s == n*t.
TableSpec make_spec(std::int64_t m, std::int64_t s, std::int64_t n, std::int64_t t);

/// (m, s, n, t) -> (n, t, m, s). Transposition is a bijection on the tables.
TableSpec transpose(const TableSpec& spec) noexcept;

/// The average entry lambda = s/n = t/m, exact and canonicalized.
Rational density(const TableSpec& spec);

/// Throws DomainError when lambda == 0; the estimators need lambda > 0.
void require_positive_density(const TableSpec& spec);

std::string to_string(const TableSpec& spec);
std::string to_string(const Rational& q);

// ---------------------------------------------------------------------------
// Exact combinatorics and log-space helpers

BigInt binomial(std::uint64_t a, std::uint64_t b);
BigInt factorial(std::uint64_t k);

/// Natural log of a positive big integer, accurate to double precision
/// regardless of magnitude.
double log_big(const BigInt& x);
double log_rational(const Rational& q);
double to_double(const Rational& q);

/// ln C(a, b). Exact big-integer evaluation while a <= 10^4, log-gamma in
/// extended precision beyond. Throws DomainError if b > a.
double log_binomial(std::uint64_t a, std::uint64_t b);

/// ln k!, same evaluation policy as log_binomial.
double log_factorial(std::uint64_t k);

/// Arguments up to this bound are evaluated exactly in log_binomial.
inline constexpr std::uint64_t kExactBinomialLimit = 10000;

// ---------------------------------------------------------------------------
// Log-space values

/// A decimal rendering mantissa x 10^exponent with mantissa in [1, 10).
struct Scientific {
  std::string mantissa;   // fixed digits, e.g. "1.019"
  std::int64_t exponent;  // e.g. 7
  std::string str() const;  // "1.019e7"
};

/// Positive quantity stored as its natural logarithm.
class LogEstimate {
 public:
  LogEstimate() = default;
  explicit LogEstimate(double log_value) : log_(log_value) {}

  static LogEstimate from_count(const BigInt& value);
  static LogEstimate from_log10(double log10_value);

  double log() const noexcept { return log_; }
  double log10() const noexcept;

  /// Round-half-even rendering with `digits` significant digits.
  Scientific scientific(int digits = 4) const;
  std::string str(int digits = 4) const { return scientific(digits).str(); }

  friend auto operator<=>(const LogEstimate&, const LogEstimate&) = default;

 private:
  double log_ = 0.0;
};

/// (low, high) bracket, rendered as midpoint +- half-width on a shared
/// decimal exponent: "(1.316 ± 0.217)e7".
struct EstimateInterval {
  LogEstimate low;
  LogEstimate high;

  LogEstimate midpoint() const;
  LogEstimate half_width() const;

  struct Rendering {
    std::string midpoint;    // "1.316"
    std::string half_width;  // "0.217"
    std::int64_t exponent;   // 7
    std::string str() const;
  };
  Rendering render(int digits = 4) const;
};

/// ln(exp(a) + exp(b)) without overflow.
double log_add(double a, double b) noexcept;

}  // namespace contab

#endif  // CONTAB_CORE_HPP
