#include "contab/ehrhart.hpp"

#include <numeric>
#include <stdexcept>

#include "contab/exact.hpp"

namespace contab {
namespace {

// Coefficients of C(q, k) = q(q-1)...(q-k+1)/k! in the monomial basis.
std::vector<Rational> falling_binomial(std::int64_t k) {
  std::vector<Rational> poly{Rational(1)};
  for (std::int64_t j = 0; j < k; ++j) {
    std::vector<Rational> next(poly.size() + 1, Rational(0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= poly[i] * j;
    }
    poly = std::move(next);
  }
  const Rational scale(BigInt(1), factorial(static_cast<std::uint64_t>(k)));
  for (auto& c : poly) {
    c *= scale;
    c.canonicalize();
  }
  return poly;
}

}  // namespace

TableSpec dilation(const EhrhartPolynomial& poly, std::int64_t q) {
  return make_spec(poly.m, q * poly.s0, poly.n, q * poly.t0);
}

EhrhartPolynomial ehrhart_polynomial(std::int64_t m, std::int64_t n, const ExactCounter& counter) {
  if (m < 1 || n < 1) throw DomainError("ehrhart_polynomial: dimensions must be positive");
  const ExactCounter count = counter ? counter : [](const TableSpec& s) { return count_exact(s); };

  EhrhartPolynomial poly;
  poly.m = m;
  poly.n = n;
  BigInt l;
  mpz_lcm(l.get_mpz_t(), BigInt(static_cast<long>(m)).get_mpz_t(),
          BigInt(static_cast<long>(n)).get_mpz_t());
  poly.s0 = BigInt(l / m).get_si();
  poly.t0 = BigInt(l / n).get_si();
  poly.d = (m - 1) * (n - 1);
  const auto d = static_cast<std::size_t>(poly.d);

  // Exact counts at q = 0..d+1; the last one only validates.
  std::vector<Rational> values;
  values.reserve(d + 2);
  for (std::int64_t q = 0; q <= poly.d + 1; ++q) values.emplace_back(count(dilation(poly, q)));

  // Newton forward differences: diffs[k] = Delta^k L(0).
  std::vector<Rational> table(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(d + 1));
  std::vector<Rational> diffs;
  diffs.reserve(d + 1);
  for (std::size_t k = 0; k <= d; ++k) {
    diffs.push_back(table[0]);
    for (std::size_t i = 0; i + 1 < table.size(); ++i) table[i] = table[i + 1] - table[i];
    table.pop_back();
  }

  poly.coeffs.assign(d + 1, Rational(0));
  for (std::size_t k = 0; k <= d; ++k) {
    if (sgn(diffs[k]) == 0) continue;
    const auto basis = falling_binomial(static_cast<std::int64_t>(k));
    for (std::size_t i = 0; i < basis.size(); ++i) poly.coeffs[i] += diffs[k] * basis[i];
  }
  for (auto& c : poly.coeffs) c.canonicalize();

  if (evaluate_rational(poly, Rational(poly.d + 1)) != values[d + 1]) {
    throw std::logic_error("ehrhart_polynomial: interpolant disagrees with the exact count at q = d+1");
  }
  if (sgn(poly.coeffs[d]) == 0) {
    throw std::logic_error("ehrhart_polynomial: degree is below (m-1)(n-1)");
  }

  // L(j) = sum_{k <= j} h_k C(j + d - k, d): triangular in j.
  poly.h.assign(d + 1, Rational(0));
  for (std::size_t j = 0; j <= d; ++j) {
    Rational acc = values[j];
    for (std::size_t k = 0; k < j; ++k) {
      acc -= poly.h[k] * Rational(binomial(j + d - k, d));
    }
    acc.canonicalize();
    if (sgn(acc) < 0) {
      throw std::logic_error("ehrhart_polynomial: negative h-vector entry h_" + std::to_string(j));
    }
    poly.h[j] = acc;
  }
  return poly;
}

Rational evaluate_rational(const EhrhartPolynomial& poly, const Rational& q) {
  Rational acc = 0;
  for (auto it = poly.coeffs.rbegin(); it != poly.coeffs.rend(); ++it) acc = acc * q + *it;
  acc.canonicalize();
  return acc;
}

BigInt evaluate(const EhrhartPolynomial& poly, std::int64_t q) {
  if (q < 0) throw DomainError("evaluate: q must be nonnegative");
  const Rational v = evaluate_rational(poly, Rational(BigInt(static_cast<long>(q))));
  if (v.get_den() != 1 || sgn(v) < 0) {
    throw std::logic_error("evaluate: L_P(" + std::to_string(q) + ") = " + v.get_str() +
                           " is not a nonnegative integer");
  }
  return v.get_num();
}

Rational leading_coefficient(const EhrhartPolynomial& poly) { return poly.coeffs.back(); }

}  // namespace contab
