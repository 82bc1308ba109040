// Cauchy-integral representation of M(m, s; n, t) on the torus.
//
// With contours |x_j| = |y_k| = r = sqrt(lambda/(1+lambda)),
//
//   M = (2 pi)^{-(m+n)} (lambda^-lambda (1+lambda)^{1+lambda})^{mn} I(m, n),
//
//   I(m, n) = int_{[-pi, pi]^{m+n}} F(theta, phi),
//   F = exp(-i s sum(theta) - i t sum(phi)) prod_{j,k} (1 - lambda(e^{i(theta_j+phi_k)} - 1))^{-1}.
//
// This module evaluates F, integrates it on a periodic tensor grid at tiny
// sizes, and checks the two envelope bounds used to control |F|.

#ifndef CONTAB_INTEGRAL_HPP
#define CONTAB_INTEGRAL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "contab/core.hpp"

namespace contab {

template <typename Scalar>
using AngleVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Angles theta (one per row) and phi (one per column), each in (-pi, pi].
template <typename Scalar = double>
struct TorusPoint {
  AngleVector<Scalar> theta;
  AngleVector<Scalar> phi;
};

/// Reduces an angle into (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  using std::remainder;
  const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  Scalar r = remainder(a, two_pi);
  if (r <= -std::numbers::pi_v<Scalar>) r += two_pi;
  return r;
}

template <typename Scalar>
TorusPoint<Scalar> make_torus_point(AngleVector<Scalar> theta, AngleVector<Scalar> phi) {
  theta = theta.unaryExpr([](Scalar a) { return wrap_angle(a); });
  phi = phi.unaryExpr([](Scalar a) { return wrap_angle(a); });
  return TorusPoint<Scalar>{std::move(theta), std::move(phi)};
}

/// F(theta, phi). The phase angle is reduced modulo 2 pi before the complex
/// exponential.
template <typename Scalar>
std::complex<Scalar> integrand_F(const TableSpec& spec, const TorusPoint<Scalar>& p) {
  require_positive_density(spec);
  if (p.theta.size() != spec.m || p.phi.size() != spec.n) {
    throw DomainError("integrand_F: torus point has the wrong dimensions");
  }
  const Scalar lambda = static_cast<Scalar>(spec.s) / static_cast<Scalar>(spec.n);
  const Scalar phase = wrap_angle(static_cast<Scalar>(spec.s) * p.theta.sum()) +
                       wrap_angle(static_cast<Scalar>(spec.t) * p.phi.sum());
  std::complex<Scalar> value = std::polar(Scalar(1), -wrap_angle(phase));
  for (Eigen::Index j = 0; j < p.theta.size(); ++j) {
    for (Eigen::Index k = 0; k < p.phi.size(); ++k) {
      // 1 - lambda(e^{iz} - 1) = (1 + lambda) - lambda e^{iz}; modulus >= 1.
      const std::complex<Scalar> factor =
          Scalar(1) + lambda - lambda * std::polar(Scalar(1), p.theta(j) + p.phi(k));
      if (factor == std::complex<Scalar>(0)) {
        throw std::logic_error("integrand_F: vanishing denominator factor");
      }
      value /= factor;
    }
  }
  return value;
}

/// f(z) = (1 + 4A(1 - cos z))^{-1/2}; |F| is the product of f over theta_j + phi_k.
template <typename Scalar>
Scalar lemma3_f(const Scalar& A, const Scalar& z) {
  using std::log1p;
  using std::exp;
  using std::sin;
  const Scalar half_sin = sin(z / 2);
  // 1 - cos z = 2 sin^2(z/2), avoiding cancellation near 0.
  return exp(-log1p(8 * A * half_sin * half_sin) / 2);
}

/// ln f(z), the quantity the envelope check compares.
template <typename Scalar>
Scalar lemma3_log_f(const Scalar& A, const Scalar& z) {
  using std::log1p;
  using std::sin;
  const Scalar half_sin = sin(z / 2);
  return -log1p(8 * A * half_sin * half_sin) / 2;
}

/// ln of the envelope exp(-A z^2 + (A/12 + A^2) z^4).
template <typename Scalar>
Scalar lemma3_log_envelope(const Scalar& A, const Scalar& z) {
  const Scalar z2 = z * z;
  return -A * z2 + (A / 12 + A * A) * z2 * z2;
}

/// prod_{j,k} f(theta_j + phi_k).
double abs_F_product(const TableSpec& spec, const TorusPoint<double>& p);

struct IntegralOptions {
  std::int64_t max_dimension = 6;         // m + n
  std::uint64_t max_evals = 1000000000;   // integrand evaluations actually performed
  unsigned threads = 1;
};

/// Periodic trapezoidal rule with `grid_points` nodes per angle. F is
/// invariant under theta -> theta + c, phi -> phi - c (because ms = nt), and
/// a grid shift maps the grid to itself, so the full (m+n)-dimensional grid
/// sum equals grid_points times the sum over the slice phi_n = 0: the rule is
/// evaluated exactly on that slice, grid_points^(m+n-1) evaluations.
std::complex<double> integral_numeric(const TableSpec& spec, int grid_points,
                                      const IntegralOptions& options = {});

/// Number of integrand evaluations integral_numeric performs.
std::uint64_t integral_evaluations(const TableSpec& spec, int grid_points);

/// (2 pi)^{-(m+n)} (lambda^-lambda (1+lambda)^{1+lambda})^{mn} Re(I).
double reconstruct_M(const TableSpec& spec, std::complex<double> integral);

// ---------------------------------------------------------------------------
// Envelope bounds

struct Lemma3Report {
  Rational lambda;
  double z_max = 0.0;                // (1/10)(1+lambda)^{-1}
  std::uint64_t samples = 0;
  std::uint64_t escalations = 0;     // comparisons re-decided in 50-digit arithmetic
  std::vector<double> violations;    // z with f(z) above the envelope
  double min_log_slack = 0.0;        // min over samples of ln(envelope) - ln f
  double max_log_slack = 0.0;

  bool ok() const noexcept { return violations.empty(); }
};

/// Samples z uniformly in |z| <= z_max and checks 0 <= f(z) <= envelope(z).
/// Comparisons closer than double rounding are re-decided in 50-digit
/// floating point.
Lemma3Report lemma3_bound_check(const Rational& lambda, std::uint64_t sample_count,
                                std::uint64_t seed = 1);

/// Largest relative deviation between |F| and prod f(theta_j + phi_k) over
/// `points` uniformly random torus points.
double lemma3_product_identity_error(const TableSpec& spec, int points, std::uint64_t seed = 1);

struct Lemma4Params {
  Rational A;
  std::int64_t N_arc = 0;  // ceil(6000 (1 + lambda))
  double delta = 0.0;      // 2 pi / N_arc
  double quadratic = 0.0;  // A
  double quartic = 0.0;    // 9A/4 + 27 A^2

  /// g(x) = -A x^2 + (9A/4 + 27 A^2) x^4
  double g(double x) const;
};

Lemma4Params lemma4_params(const Rational& lambda);

struct Lemma4Report {
  Lemma4Params params;
  std::int64_t K = 1;
  double integral = 0.0;    // int_{-30 delta}^{30 delta} exp(K g(x)) dx
  double gaussian = 0.0;    // sqrt(pi / (A K))
  double ratio = 0.0;
  double envelope_constant = 10.0;
  double bound = 0.0;       // exp(C (1/K + 1/(A K)))
  bool within = false;      // ratio <= bound
};

/// Adaptive Gauss-Kronrod quadrature of exp(K g) compared with the Gaussian
/// integral. The O() constant is unknown, so exceedance is reported, not thrown.
Lemma4Report lemma4_bound_check(const Rational& lambda, std::int64_t K,
                                double envelope_constant = 10.0);

}  // namespace contab

#endif  // CONTAB_INTEGRAL_HPP
