#include <cmath>

#include <doctest.h>

#include "contab/exact.hpp"
#include "contab/montecarlo.hpp"
#include "oracles.hpp"

using namespace contab;

namespace {

std::vector<std::vector<int>> to_rows(const Table& table) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(table.rows()));
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.cols(); ++j) out[i].push_back(static_cast<int>(table(i, j)));
  }
  return out;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("a single row is deterministic") {
  const TableSpec spec = make_spec(1, 6, 3, 2);
  auto rng = sample_rng(1, 0);
  const SampledTable st = sample_table(spec, rng);
  CHECK(st.table.rows() == 1);
  CHECK(st.table.cols() == 3);
  CHECK((st.table.array() == 2).all());
  CHECK(st.log_weight == 0.0);
}

TEST_CASE("permutation matrices each carry weight 2") {
  const TableSpec spec = make_spec(2, 1, 2, 1);
  int identity = 0;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    auto rng = sample_rng(9, i);
    const SampledTable st = sample_table(spec, rng);
    CHECK(st.log_weight == doctest::Approx(std::log(2.0)));
    identity += st.table(0, 0) == 1;
  }
  CHECK(identity > 900);
  CHECK(identity < 1100);
}

TEST_CASE("sampled weights match the independently computed proposal probability") {
  for (const TableSpec spec : {make_spec(2, 2, 2, 2), make_spec(3, 4, 4, 3), make_spec(4, 5, 2, 10),
                               make_spec(3, 3, 3, 3)}) {
    CAPTURE(to_string(spec));
    ImportanceSampler sampler(spec);
    for (std::uint64_t i = 0; i < 300; ++i) {
      auto rng = sample_rng(3, i);
      const SampledTable st = sampler(rng);
      REQUIRE(has_margins(st.table, spec));
      const mpq_class q = oracle::proposal_probability(to_rows(st.table), static_cast<int>(spec.s),
                                                       static_cast<int>(spec.t));
      CHECK(st.log_weight == doctest::Approx(-std::log(q.get_d())).epsilon(1e-12));
    }
  }
}

TEST_CASE("margins hold on every sample of a larger spec") {
  const TableSpec spec = make_spec(7, 12, 6, 14);
  ImportanceSampler sampler(spec);
  for (std::uint64_t i = 0; i < 500; ++i) {
    auto rng = sample_rng(11, i);
    const SampledTable st = sampler(rng);
    CHECK(has_margins(st.table, spec));
    CHECK((st.table.array() >= 0).all());
  }
}

TEST_CASE("has_margins rejects wrong tables") {
  Table t(2, 2);
  t << 1, 1, 1, 1;
  CHECK(has_margins(t, make_spec(2, 2, 2, 2)));
  t(0, 0) = 2;
  CHECK_FALSE(has_margins(t, make_spec(2, 2, 2, 2)));
  CHECK_FALSE(has_margins(Table(3, 2), make_spec(2, 2, 2, 2)));
}

TEST_CASE("(2,2,2,2) estimate lies within 3 SE of 3") {
  // On 2 x 2 tables the proposal is uniform over the three tables, so every
  // weight is 3 and the standard error vanishes; only rounding is left.
  const McEstimate est = mc_estimate(make_spec(2, 2, 2, 2), 100000, 42);
  const double mean = std::exp(est.mean.log());
  const double se = std::exp(est.log_standard_error);
  CHECK(se == 0.0);
  CHECK(std::abs(mean - 3.0) <= 3.0 * se + 1e-12);
  CHECK(est.sample_count == 100000);
  CHECK(est.seed == 42);
  CHECK(est.effective_sample_size == doctest::Approx(100000.0));
}

TEST_CASE("(3,3,3,3) estimate lies within 3 SE of 55") {
  const McEstimate est = mc_estimate(make_spec(3, 3, 3, 3), 100000, 42);
  const double mean = std::exp(est.mean.log());
  const double se = std::exp(est.log_standard_error);
  CHECK(count_exact(make_spec(3, 3, 3, 3)) == 55);
  CHECK(se > 0.0);
  CHECK(se < 1.0);
  CHECK(std::abs(mean - 55.0) <= 3.0 * se);
  CHECK(est.effective_sample_size <= 100000.0);
  CHECK(est.effective_sample_size > 1000.0);
}

TEST_CASE("constant weights give zero standard error") {
  const McEstimate est = mc_estimate(make_spec(2, 1, 2, 1), 100, 1);
  CHECK(std::exp(est.mean.log()) == doctest::Approx(2.0));
  CHECK(std::isinf(est.log_standard_error));
  CHECK(est.effective_sample_size == doctest::Approx(100.0));
}

TEST_CASE("seeded determinism across runs and thread counts") {
  const TableSpec spec = make_spec(5, 6, 6, 5);
  const McEstimate a = mc_estimate(spec, 20000, 123, 1);
  const McEstimate b = mc_estimate(spec, 20000, 123, 1);
  const McEstimate c = mc_estimate(spec, 20000, 123, 4);
  const McEstimate d = mc_estimate(spec, 20000, 124, 1);
  CHECK(a.mean.log() == b.mean.log());
  CHECK(a.mean.log() == c.mean.log());
  CHECK(a.log_standard_error == c.log_standard_error);
  CHECK(a.effective_sample_size == c.effective_sample_size);
  CHECK(a.mean.log() != d.mean.log());
}

TEST_CASE("the proposal is exactly unbiased on small specs") {
  for (std::int64_t m = 1; m <= 6; ++m) {
    for (std::int64_t n = 1; m * n <= 6; ++n) {
      for (std::int64_t s = 1; s <= 4; ++s) {
        if ((m * s) % n != 0) continue;
        const TableSpec spec = make_spec(m, s, n, m * s / n);
        CAPTURE(to_string(spec));
        CHECK(proposal_expected_weight(spec) == Rational(count_exact(spec)));
      }
    }
  }
}

TEST_CASE("mc_estimate rejects bad input") {
  CHECK_THROWS_AS(mc_estimate(make_spec(2, 2, 2, 2), 1, 1), DomainError);
  CHECK_THROWS_AS(mc_estimate(make_spec(2, 0, 2, 0), 100, 1), DomainError);
}

}  // TEST_SUITE
