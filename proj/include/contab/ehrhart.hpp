// Ehrhart polynomial of the constant-margin transportation polytope.
//
// P is the polytope of nonnegative real m x n matrices with row sums s0 and
// column sums t0, where s0 = lcm(m,n)/m and t0 = lcm(m,n)/n. Every balanced
// (s, t) is (q s0, q t0) for an integer q and M(m, s; n, t) = L_P(q), a
// polynomial of degree d = (m-1)(n-1).

#ifndef CONTAB_EHRHART_HPP
#define CONTAB_EHRHART_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "contab/core.hpp"

namespace contab {

struct EhrhartPolynomial {
  std::int64_t m = 1;
  std::int64_t n = 1;
  std::int64_t s0 = 1;
  std::int64_t t0 = 1;
  std::int64_t d = 0;
  /// Monomial coefficients, coeffs[k] multiplies q^k.
  std::vector<Rational> coeffs;
  /// h[k] = h_k in L_P(q) = sum_{i=0}^{d} h_{d-i} C(q+i, d).
  std::vector<Rational> h;
};

using ExactCounter = std::function<BigInt(const TableSpec&)>;

/// Interpolates L_P through the exact counts at q = 0..d and checks the
/// prediction at q = d+1. `counter` defaults to count_exact. Throws
/// std::logic_error if the check fails or an h entry is negative.
EhrhartPolynomial ehrhart_polynomial(std::int64_t m, std::int64_t n,
                                     const ExactCounter& counter = {});

/// L_P(q); throws std::logic_error unless the value is a nonnegative integer.
BigInt evaluate(const EhrhartPolynomial& poly, std::int64_t q);

/// Exact rational value at q, without the integrality check.
Rational evaluate_rational(const EhrhartPolynomial& poly, const Rational& q);

/// coeffs[d]: the relative volume of P.
Rational leading_coefficient(const EhrhartPolynomial& poly);

/// The spec counted by L_P(q): (m, q s0, n, q t0).
TableSpec dilation(const EhrhartPolynomial& poly, std::int64_t q);

}  // namespace contab

#endif  // CONTAB_EHRHART_HPP
