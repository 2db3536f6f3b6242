#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gpx/correlation.hpp"
#include "gpx/rng.hpp"

using gpx::correlation::CorrelationModel;

TEST_SUITE("correlation") {

TEST_CASE("powered-exponential evaluation") {
  const auto m = CorrelationModel::powered_exponential(1.0, 1.0, 1.0);
  CHECK(m.evaluate(0.0) == 1.0);
  CHECK(m.evaluate(0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(m.evaluate(0.5) == doctest::Approx(0.606531).epsilon(1e-5));

  const auto g = CorrelationModel::powered_exponential(1.0, 2.0, 1.0);
  CHECK(g.evaluate(-0.5) == g.evaluate(0.5));
  CHECK(g.evaluate(-0.5) == doctest::Approx(0.778801).epsilon(1e-5));
}

TEST_CASE("evaluate is an even function") {
  const auto m = CorrelationModel::cauchy(0.7, 1.3, 2.0);
  gpx::rng::CounterRng gen(5, 0, 0);
  for (int i = 0; i < 200; ++i) {
    const double t = 20.0 * (gen.uniform() - 0.5);
    CHECK(m.evaluate(t) == m.evaluate(-t));
  }
}

TEST_CASE("local expansion validation") {
  const auto m = CorrelationModel::powered_exponential(1.0, 1.0, 1.0);
  Eigen::ArrayXd seq(3);
  seq << 0.1, 0.05, 0.01;
  const auto rep = gpx::correlation::validate_local(m, seq);
  // oracle: (1 - e^{-t}) / t series
  CHECK(rep.final_ratio == doctest::Approx((1.0 - std::exp(-0.01)) / 0.01).epsilon(1e-12));
  CHECK(rep.final_ratio == doctest::Approx(0.995017).epsilon(1e-5));
  CHECK(rep.pass);

  const auto q = CorrelationModel::powered_exponential(2.0, 2.0, 1.0);
  Eigen::ArrayXd tiny(4);
  tiny << 1e-2, 1e-3, 1e-4, 1e-5;
  CHECK(gpx::correlation::validate_local(q, tiny).pass);
}

TEST_CASE("declared scale off by 1.5x fails the local check") {
  // true local scale of this cauchy is gamma * c' = 1; declare 1.5
  const auto m = CorrelationModel::cauchy(0.5, 1.0, 2.0, 1.5);
  CHECK(m.c() == 1.5);
  Eigen::ArrayXd seq(3);
  seq << 1e-2, 1e-3, 1e-4;
  const auto rep = gpx::correlation::validate_local(m, seq);
  CHECK(!rep.pass);
  CHECK(rep.final_ratio == doctest::Approx(1.0 / 1.5).epsilon(1e-3));

  const auto honest = CorrelationModel::cauchy(0.5, 1.0, 2.0);
  CHECK(gpx::correlation::validate_local(honest, seq).pass);
}

TEST_CASE("local validation rejects bad sequences") {
  const auto m = CorrelationModel::powered_exponential(1.0, 1.0, 1.0);
  CHECK_THROWS_AS(gpx::correlation::validate_local(m, Eigen::ArrayXd()),
                  std::invalid_argument);
  Eigen::ArrayXd increasing(2);
  increasing << 0.01, 0.1;
  CHECK_THROWS_AS(gpx::correlation::validate_local(m, increasing),
                  std::invalid_argument);
}

TEST_CASE("decay validation") {
  const auto m = CorrelationModel::powered_exponential(1.0, 1.0, 1.0);
  const auto rep = gpx::correlation::validate_decay(m, 1.0, 100.0);
  // oracle: max of t e^{-t} is e^{-1} at t = 1
  CHECK(rep.sup == doctest::Approx(std::exp(-1.0)).epsilon(2e-3));
  CHECK(rep.sup_at == doctest::Approx(1.0).epsilon(0.1));
  CHECK(rep.bounded);
  CHECK(rep.monotone_tail);

  CHECK(gpx::correlation::validate_decay(m, 0.5, 100.0).bounded);

  // constant correlation cannot decay
  const auto flat = CorrelationModel::tabulated({0.0, 1e-6, 500.0}, {1.0, 0.5, 0.5},
                                                1.0, 1.0, 1.0);
  const auto bad = gpx::correlation::validate_decay(flat, 1.0, 100.0);
  CHECK(!bad.bounded);
  CHECK(!bad.monotone_tail);
}

TEST_CASE("tabulated models") {
  const char* path = "corr_table_test.csv";
  {
    std::ofstream out(path);
    out << "t,r\n0,1\n0.5,0.6\n1.0,0.2\n";
  }
  const auto m = CorrelationModel::tabulated_from_csv(path, 0.8, 1.0, 1.0);
  CHECK(m.evaluate(0.0) == 1.0);
  CHECK(m.evaluate(0.25) == doctest::Approx(0.8));
  CHECK(m.evaluate(-0.75) == doctest::Approx(0.4));
  CHECK_THROWS_AS(m.evaluate(1.5), std::domain_error);
  std::remove(path);

  CHECK_THROWS_AS(CorrelationModel::tabulated({0.0, 1.0}, {0.9, 0.1}, 1, 1, 1),
                  std::invalid_argument);  // r(0) != 1
  CHECK_THROWS_AS(CorrelationModel::tabulated({0.0, 1.0, 0.5}, {1.0, 0.5, 0.2}, 1, 1, 1),
                  std::invalid_argument);  // non-increasing lags
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(CorrelationModel::powered_exponential(0.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(CorrelationModel::powered_exponential(1.0, 0.0, 1.0),
                  std::invalid_argument);  // alpha = 0 unsupported
  CHECK_THROWS_AS(CorrelationModel::powered_exponential(1.0, 2.5, 1.0),
                  std::invalid_argument);
}

}  // TEST_SUITE
