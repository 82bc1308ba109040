// Closed-form estimates of M(m, s; n, t).
//
// Every estimator drops its asymptotic error term; callers that serialize a
// result record this as "error_terms": "omitted". All estimators require a
// positive density and throw DomainError otherwise.

#ifndef CONTAB_ESTIMATORS_HPP
#define CONTAB_ESTIMATORS_HPP

#include "contab/core.hpp"

namespace contab {

/// Saddle-point quantities for density lambda: A = lambda(1 + lambda)/2 and
/// the contour radius r = sqrt(lambda / (1 + lambda)).
struct SaddleParams {
  Rational lambda;
  Rational A;
  Rational r_squared;  // lambda / (1 + lambda), exact
  double r = 0.0;
};

SaddleParams saddle_params(const TableSpec& spec);
SaddleParams saddle_params(const Rational& lambda);

/// Good's binomial-ratio estimate
///   G = C(n+s-1, s)^m C(m+t-1, t)^n / C(mn + lambda*mn - 1, lambda*mn).
LogEstimate good_estimate(const TableSpec& spec);

/// G * e^{1/2}.
LogEstimate thm1_estimate(const TableSpec& spec);

/// The fully closed saddle-point form
///   (lambda^-lambda (1+lambda)^(1+lambda))^{mn}
///   / ((4 pi A)^{(m+n-1)/2} m^{(n-1)/2} n^{(m-1)/2})
///   * exp(1/2 - (1+2A)/(24A) (m/n + n/m)).
LogEstimate thm1_closed_estimate(const TableSpec& spec);

/// (lambda + 1/2)^{(m-1)(n-1)} (mn)! / (m!^n n!^m) * e^{1/2}, the large-density
/// limit.
LogEstimate cor1_estimate(const TableSpec& spec);

/// V(delta) = G (1+1/m)^{(m-1)/2} (1+1/n)^{(n-1)/2} exp(-1/2 + delta/(m+n)).
LogEstimate conj1_value(const TableSpec& spec, double delta);

/// [V(0), V(2)]: the range the conjectured correction delta in (0, 2) spans.
EstimateInterval conj1_interval(const TableSpec& spec);

/// Inverts conj1_value: the delta for which V(delta) equals `count`.
double conj1_delta(const TableSpec& spec, const BigInt& count);
double conj1_delta(const TableSpec& spec, const LogEstimate& count);

/// M = N * P1 * P2 * E with N the number of tables with total lambda*mn,
/// P1 / P2 the probabilities that row / column sums all come out right when
/// such a table is uniform, and E the correction for their dependence.
struct Remark1Decomposition {
  BigInt N;
  Rational P1;
  Rational P2;
  Rational E;
};

Remark1Decomposition remark1_decompose(const TableSpec& spec, const BigInt& count);

/// Left-hand side of the growth hypothesis
///   (1+2 lambda)^2 / (4 lambda (1+lambda)) * (1 + 5m/(6n) + 5n/(6m)),
/// exact, together with the smallest a for which lhs <= a ln n.
struct HypothesisReport {
  Rational lhs;
  double lhs_value = 0.0;
  double min_a = 0.0;  // lhs / ln n; +inf when n == 1

  /// True when lhs <= a ln n.
  bool holds_for(double a) const;
};

HypothesisReport hypothesis_lhs(const TableSpec& spec);

}  // namespace contab

#endif  // CONTAB_ESTIMATORS_HPP
