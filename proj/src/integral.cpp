#include "contab/integral.hpp"

#include <algorithm>
#include <exception>
#include <random>
#include <span>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace contab {
namespace {

using Complex = std::complex<double>;
using Float50 = boost::multiprecision::cpp_bin_float_50;

constexpr std::uint64_t kBlock = 4096;

Complex pairwise_sum(std::span<const Complex> xs) {
  if (xs.size() <= 16) {
    Complex acc = 0.0;
    for (const auto& x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// lambda^-lambda (1+lambda)^{1+lambda}, raised to mn, as a log.
double log_contour_factor(const TableSpec& spec) {
  const Rational lambda = density(spec);
  const std::int64_t cells = spec.m * spec.n;
  const std::int64_t total = spec.total();
  return static_cast<double>(cells + total) * log_rational(1 + lambda) -
         static_cast<double>(total) * log_rational(lambda);
}

}  // namespace

double abs_F_product(const TableSpec& spec, const TorusPoint<double>& p) {
  const double A = to_double(Rational(density(spec) * (1 + density(spec)) / 2));
  double log_prod = 0.0;
  for (Eigen::Index j = 0; j < p.theta.size(); ++j) {
    for (Eigen::Index k = 0; k < p.phi.size(); ++k) {
      log_prod += lemma3_log_f(A, p.theta(j) + p.phi(k));
    }
  }
  return std::exp(log_prod);
}

std::uint64_t integral_evaluations(const TableSpec& spec, int grid_points) {
  std::uint64_t evals = 1;
  for (std::int64_t d = 0; d < spec.m + spec.n - 1; ++d) {
    if (evals > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(grid_points)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    evals *= static_cast<std::uint64_t>(grid_points);
  }
  return evals;
}

std::complex<double> integral_numeric(const TableSpec& spec, int grid_points,
                                      const IntegralOptions& options) {
  require_positive_density(spec);
  if (spec.m + spec.n > options.max_dimension) {
    throw DomainError("integral_numeric: dimension m+n = " + std::to_string(spec.m + spec.n) +
                      " exceeds the cap of " + std::to_string(options.max_dimension));
  }
  if (grid_points < 8) throw DomainError("integral_numeric: need at least 8 grid points per angle");
  const std::uint64_t evals = integral_evaluations(spec, grid_points);
  if (evals > options.max_evals) {
    throw ResourceLimitError("integral_numeric: " + std::to_string(evals) +
                                 " evaluations exceed the cap of " + std::to_string(options.max_evals),
                             options.max_evals);
  }

  const auto G = static_cast<std::int64_t>(grid_points);
  const double lambda = to_double(density(spec));
  const double step = 2.0 * std::numbers::pi / static_cast<double>(G);

  // Grid angles are 2 pi a / G, so every angle sum reduces modulo 2 pi in
  // exact integer arithmetic before it reaches a complex exponential.
  std::vector<Complex> inverse_factor(static_cast<std::size_t>(G));
  std::vector<Complex> row_phase(static_cast<std::size_t>(G));
  std::vector<Complex> col_phase(static_cast<std::size_t>(G));
  for (std::int64_t a = 0; a < G; ++a) {
    const auto idx = static_cast<std::size_t>(a);
    inverse_factor[idx] = 1.0 / (1.0 + lambda - lambda * std::polar(1.0, step * static_cast<double>(a)));
    row_phase[idx] = std::polar(1.0, -step * static_cast<double>((spec.s * a) % G));
    col_phase[idx] = std::polar(1.0, -step * static_cast<double>((spec.t * a) % G));
  }

  const auto m = static_cast<std::size_t>(spec.m);
  const auto n = static_cast<std::size_t>(spec.n);
  const std::size_t dims = m + n - 1;  // phi_n pinned to 0
  const std::uint64_t blocks = (evals + kBlock - 1) / kBlock;
  std::vector<Complex> block_sums(blocks);

  auto run_block = [&](std::uint64_t b) {
    const std::uint64_t begin = b * kBlock;
    const std::uint64_t end = std::min(evals, begin + kBlock);
    std::vector<std::int64_t> digit(dims + 1, 0);  // digit[dims] stays 0: phi_n
    std::uint64_t rest = begin;
    for (std::size_t d = 0; d < dims; ++d) {
      digit[d] = static_cast<std::int64_t>(rest % static_cast<std::uint64_t>(G));
      rest /= static_cast<std::uint64_t>(G);
    }
    Complex acc = 0.0;
    for (std::uint64_t i = begin; i < end; ++i) {
      Complex value = 1.0;
      for (std::size_t j = 0; j < m; ++j) value *= row_phase[static_cast<std::size_t>(digit[j])];
      for (std::size_t k = 0; k < n; ++k) value *= col_phase[static_cast<std::size_t>(digit[m + k])];
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          value *= inverse_factor[static_cast<std::size_t>((digit[j] + digit[m + k]) % G)];
        }
      }
      acc += value;
      for (std::size_t d = 0; d < dims; ++d) {
        if (++digit[d] < G) break;
        digit[d] = 0;
      }
    }
    block_sums[b] = acc;
  };

  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(std::min<std::uint64_t>(blocks, 1024))));
  if (threads == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t b = w; b < blocks; b += threads) run_block(b);
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

  // Full grid sum = G * slice sum; each node carries weight step^(m+n).
  const double weight = std::pow(step, static_cast<double>(m + n)) * static_cast<double>(G);
  return pairwise_sum(block_sums) * weight;
}

double reconstruct_M(const TableSpec& spec, std::complex<double> integral) {
  require_positive_density(spec);
  const double log_scale =
      log_contour_factor(spec) - static_cast<double>(spec.m + spec.n) * std::log(2.0 * std::numbers::pi);
  return std::exp(log_scale) * integral.real();
}

// ---------------------------------------------------------------------------

Lemma3Report lemma3_bound_check(const Rational& lambda, std::uint64_t sample_count,
                                std::uint64_t seed) {
  if (sgn(lambda) <= 0) throw DomainError("lemma3_bound_check needs lambda > 0");
  Rational A_exact = lambda * (1 + lambda) / 2;
  A_exact.canonicalize();
  Rational z_max_exact = 1 / (10 * (1 + lambda));
  z_max_exact.canonicalize();

  Lemma3Report report;
  report.lambda = lambda;
  report.samples = sample_count;
  report.z_max = to_double(z_max_exact);
  report.min_log_slack = std::numeric_limits<double>::infinity();
  report.max_log_slack = -std::numeric_limits<double>::infinity();

  const double A = to_double(A_exact);
  const Float50 A50 = Float50(A_exact.get_num().get_str()) / Float50(A_exact.get_den().get_str());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(-report.z_max, report.z_max);
  for (std::uint64_t i = 0; i < sample_count; ++i) {
    const double z = draw(rng);
    const double log_f = lemma3_log_f(A, z);
    const double log_env = lemma3_log_envelope(A, z);
    double slack = log_env - log_f;
    const double resolution =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(log_f), std::abs(log_env));
    if (slack <= resolution) {
      ++report.escalations;
      const Float50 z50(z);  // exact: every double is representable
      const Float50 precise = lemma3_log_envelope(A50, z50) - lemma3_log_f(A50, z50);
      slack = precise.convert_to<double>();
      if (precise < 0) report.violations.push_back(z);
    }
    if (!(std::exp(log_f) >= 0.0)) report.violations.push_back(z);
    report.min_log_slack = std::min(report.min_log_slack, slack);
    report.max_log_slack = std::max(report.max_log_slack, slack);
  }
  return report;
}

double lemma3_product_identity_error(const TableSpec& spec, int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    AngleVector<double> theta(spec.m);
    AngleVector<double> phi(spec.n);
    for (auto& a : theta) a = angle(rng);
    for (auto& a : phi) a = angle(rng);
    const auto p = make_torus_point(std::move(theta), std::move(phi));
    const double direct = std::abs(integrand_F(spec, p));
    const double product = abs_F_product(spec, p);
    worst = std::max(worst, std::abs(direct - product) / product);
  }
  return worst;
}

double Lemma4Params::g(double x) const {
  const double x2 = x * x;
  return -quadratic * x2 + quartic * x2 * x2;
}

Lemma4Params lemma4_params(const Rational& lambda) {
  if (sgn(lambda) <= 0) throw DomainError("lemma4_params needs lambda > 0");
  Lemma4Params p;
  p.A = lambda * (1 + lambda) / 2;
  p.A.canonicalize();
  Rational arcs = 6000 * (1 + lambda);
  arcs.canonicalize();
  BigInt ceiling;
  mpz_cdiv_q(ceiling.get_mpz_t(), arcs.get_num_mpz_t(), arcs.get_den_mpz_t());
  p.N_arc = ceiling.get_si();
  p.delta = 2.0 * std::numbers::pi / static_cast<double>(p.N_arc);
  p.quadratic = to_double(p.A);
  p.quartic = to_double(Rational(Rational(9, 4) * p.A + 27 * p.A * p.A));
  return p;
}

Lemma4Report lemma4_bound_check(const Rational& lambda, std::int64_t K, double envelope_constant) {
  if (K < 1) throw DomainError("lemma4_bound_check needs K >= 1");
  Lemma4Report r;
  r.params = lemma4_params(lambda);
  r.K = K;
  r.envelope_constant = envelope_constant;
  const double a = to_double(r.params.A);
  const double k = static_cast<double>(K);
  const auto integrand = [&](double x) { return std::exp(k * r.params.g(x)); };
  // Even integrand: twice the half-interval.
  r.integral = 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                         integrand, 0.0, 30.0 * r.params.delta, 15, 1e-12);
  r.gaussian = std::sqrt(std::numbers::pi / (a * k));
  r.ratio = r.integral / r.gaussian;
  r.bound = std::exp(envelope_constant * (1.0 / k + 1.0 / (a * k)));
  r.within = r.ratio <= r.bound;
  return r;
}

}  // namespace contab
