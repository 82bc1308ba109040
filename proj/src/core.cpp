#include "contab/core.hpp"

#include <cfenv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace contab {

TableSpec make_spec(std::int64_t m, std::int64_t s, std::int64_t n, std::int64_t t) {
  if (m < 1 || n < 1) {
    throw DomainError("dimensions must be positive: m=" + std::to_string(m) +
                      ", n=" + std::to_string(n));
  }
  if (s < 0 || t < 0) {
    throw DomainError("line sums must be nonnegative: s=" + std::to_string(s) +
                      ", t=" + std::to_string(t));
  }
  // m*s and n*t both fit comfortably for any instance we could count.
  if (m * s != n * t) {
    throw DomainError("balance violation: " + std::to_string(m) + "·" + std::to_string(s) +
                      " ≠ " + std::to_string(n) + "·" + std::to_string(t) + " (" +
                      std::to_string(m * s) + " vs " + std::to_string(n * t) + ")");
  }
  return TableSpec{m, s, n, t};
}

TableSpec transpose(const TableSpec& spec) noexcept {
  return TableSpec{spec.n, spec.t, spec.m, spec.s};
}

Rational density(const TableSpec& spec) {
  Rational lambda(BigInt(static_cast<long>(spec.s)), BigInt(static_cast<long>(spec.n)));
  lambda.canonicalize();
  return lambda;
}

void require_positive_density(const TableSpec& spec) {
  if (spec.s == 0) {
    throw DomainError("density is zero for " + to_string(spec) +
                      "; estimators require lambda > 0");
  }
}

std::string to_string(const TableSpec& spec) {
  return "(" + std::to_string(spec.m) + ", " + std::to_string(spec.s) + ", " +
         std::to_string(spec.n) + ", " + std::to_string(spec.t) + ")";
}

std::string to_string(const Rational& q) { return q.get_str(); }

BigInt binomial(std::uint64_t a, std::uint64_t b) {
  BigInt out;
  if (b > a) return out;
  mpz_bin_uiui(out.get_mpz_t(), a, b);
  return out;
}

BigInt factorial(std::uint64_t k) {
  BigInt out;
  mpz_fac_ui(out.get_mpz_t(), k);
  return out;
}

double log_big(const BigInt& x) {
  if (sgn(x) <= 0) {
    throw DomainError("logarithm of a nonpositive integer");
  }
  long exp2 = 0;
  const double mant = mpz_get_d_2exp(&exp2, x.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp2) * std::numbers::ln2;
}

double log_rational(const Rational& q) {
  return log_big(q.get_num()) - log_big(q.get_den());
}

double to_double(const Rational& q) { return q.get_d(); }

namespace {

long double lgamma_int(std::uint64_t k) {
  return std::lgamma(static_cast<long double>(k) + 1.0L);
}

}  // namespace

double log_binomial(std::uint64_t a, std::uint64_t b) {
  if (b > a) {
    throw DomainError("log_binomial: b=" + std::to_string(b) + " exceeds a=" + std::to_string(a));
  }
  if (b == 0 || b == a) return 0.0;
  if (a <= kExactBinomialLimit) return log_big(binomial(a, b));
  return static_cast<double>(lgamma_int(a) - lgamma_int(b) - lgamma_int(a - b));
}

double log_factorial(std::uint64_t k) {
  if (k < 2) return 0.0;
  if (k <= kExactBinomialLimit) return log_big(factorial(k));
  return static_cast<double>(lgamma_int(k));
}

double log_add(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// ---------------------------------------------------------------------------

namespace {

// Rounds `scaled` to an integer, ties to even. nearbyint honours the current
// rounding mode, which we pin for the duration of the call.
long double round_half_even(long double scaled) {
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const long double r = std::nearbyint(scaled);
  std::fesetround(saved);
  return r;
}

std::string fixed_digits(long double rounded, int digits) {
  // rounded is an integer with exactly `digits` digits; insert the point.
  std::ostringstream os;
  os.precision(0);
  os << std::fixed << rounded;
  std::string body = os.str();
  if (digits <= 1) return body;
  return body.substr(0, 1) + "." + body.substr(1);
}

std::string fraction_digits(long double value, int decimals) {
  std::ostringstream os;
  const long double scale = std::pow(10.0L, decimals);
  const long double rounded = round_half_even(value * scale);
  os.precision(decimals);
  os << std::fixed << rounded / scale;
  return os.str();
}

}  // namespace

std::string Scientific::str() const { return mantissa + "e" + std::to_string(exponent); }

LogEstimate LogEstimate::from_count(const BigInt& value) { return LogEstimate(log_big(value)); }

LogEstimate LogEstimate::from_log10(double log10_value) {
  return LogEstimate(log10_value * std::numbers::ln10);
}

double LogEstimate::log10() const noexcept { return log_ / std::numbers::ln10; }

Scientific LogEstimate::scientific(int digits) const {
  if (digits < 1) digits = 1;
  if (!std::isfinite(log_)) {
    return Scientific{log_ > 0 ? "inf" : "0", 0};
  }
  const long double l10 = static_cast<long double>(log_) / std::numbers::ln10_v<long double>;
  auto exponent = static_cast<std::int64_t>(std::floor(l10));
  const long double mant = std::pow(10.0L, l10 - static_cast<long double>(exponent));
  const long double unit = std::pow(10.0L, digits - 1);
  long double rounded = round_half_even(mant * unit);
  if (rounded >= 10.0L * unit) {
    rounded = unit;
    ++exponent;
  } else if (rounded < unit) {
    // mant slightly below 1 after floating error in floor().
    rounded = round_half_even(mant * unit * 10.0L);
    --exponent;
  }
  return Scientific{fixed_digits(rounded, digits), exponent};
}

LogEstimate EstimateInterval::midpoint() const {
  return LogEstimate(log_add(low.log(), high.log()) - std::numbers::ln2);
}

LogEstimate EstimateInterval::half_width() const {
  const double gap = low.log() - high.log();
  if (gap >= 0.0) return LogEstimate(-std::numeric_limits<double>::infinity());
  return LogEstimate(high.log() + std::log(-std::expm1(gap)) - std::numbers::ln2);
}

EstimateInterval::Rendering EstimateInterval::render(int digits) const {
  if (digits < 1) digits = 1;
  const Scientific mid = midpoint().scientific(digits);
  const LogEstimate half = half_width();
  long double half_mant = 0.0L;
  if (std::isfinite(half.log())) {
    half_mant = std::exp(static_cast<long double>(half.log()) -
                         static_cast<long double>(mid.exponent) * std::numbers::ln10_v<long double>);
  }
  return Rendering{mid.mantissa, fraction_digits(half_mant, digits - 1), mid.exponent};
}

std::string EstimateInterval::Rendering::str() const {
  return "(" + midpoint + " ± " + half_width + ")e" + std::to_string(exponent);
}

}  // namespace contab
