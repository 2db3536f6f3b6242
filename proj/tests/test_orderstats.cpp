#include <doctest.h>

#include <cmath>

#include "gpx/orderstats.hpp"

using gpx::GridSpec;
using gpx::correlation::CorrelationModel;
namespace os = gpx::orderstats;

namespace {

gpx::gaussim::PathEnsemble make_ensemble(const Eigen::MatrixXd& values, double mesh) {
  gpx::gaussim::PathEnsemble ens;
  ens.grid = GridSpec(0.0, mesh * static_cast<double>(values.cols() - 1), mesh);
  ens.n = values.rows();
  ens.seed = 0;
  ens.model = CorrelationModel::powered_exponential(1.0, 1.0, 1.0);
  ens.values = values;
  return ens;
}

}  // namespace

TEST_SUITE("orderstats") {

TEST_CASE("pointwise order statistics") {
  Eigen::MatrixXd v(3, 2);
  v << 0.5, 1.0, -1.2, -2.0, 0.3, 0.0;
  const auto ens = make_ensemble(v, 1.0);
  CHECK(os::order_statistic_path(ens, 2).values[0] == doctest::Approx(0.3));
  CHECK(os::order_statistic_path(ens, 1).values[0] == doctest::Approx(-1.2));
  CHECK(os::order_statistic_path(ens, 3).values[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(os::order_statistic_path(ens, 0), std::invalid_argument);
  CHECK_THROWS_AS(os::order_statistic_path(ens, 4), std::invalid_argument);

  Eigen::MatrixXd single(1, 2);
  single << 0.7, -0.1;
  const auto one = make_ensemble(single, 1.0);
  CHECK(os::order_statistic_path(one, 1).values[1] == doctest::Approx(-0.1));
}

TEST_CASE("the order-statistics fan is sorted pointwise, exactly") {
  const auto model = CorrelationModel::powered_exponential(1.0, 1.0, 1.0);
  const auto ens =
      gpx::gaussim::sample_stationary(model, GridSpec(0.0, 3.0, 0.25), 6, 31);
  std::vector<os::OrderStatPath> fan;
  for (int r = 1; r <= 6; ++r) fan.push_back(os::order_statistic_path(ens, r));
  for (long j = 0; j < ens.grid.count(); ++j)
    for (int r = 1; r < 6; ++r)
      CHECK(fan[r - 1].values[j] <= fan[r].values[j]);
}

TEST_CASE("interval suprema with outward snapping") {
  Eigen::MatrixXd v(1, 5);
  v << 1.0, 1.0, 1.0, 1.0, 1.0;
  auto path = os::order_statistic_path(make_ensemble(v, 0.5), 1);
  CHECK(os::sup_on_interval(path, 0.0, 2.0) == doctest::Approx(1.0));

  Eigen::MatrixXd spike(1, 5);
  spike << 0.0, 0.0, 3.5, 0.0, 0.0;
  path = os::order_statistic_path(make_ensemble(spike, 0.5), 1);
  CHECK(os::sup_on_interval(path, 0.8, 1.2) == doctest::Approx(3.5));
  CHECK(os::sup_on_interval(path, 1.0, 1.0) == doctest::Approx(3.5));
  CHECK(os::sup_on_interval(path, 1.6, 1.9) == doctest::Approx(0.0));
  CHECK_THROWS_AS(os::sup_on_interval(path, 5.0, 6.0), std::invalid_argument);
  CHECK_THROWS_AS(os::sup_on_interval(path, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("tail estimates at unreachable levels") {
  const auto model = CorrelationModel::powered_exponential(1.0, 1.0, 1.0);
  const auto low = os::empirical_tail(model, 1, 1, -10.0, 0.5, 1000, 3);
  CHECK(low.p_hat == doctest::Approx(1.0));
  CHECK(!low.below_resolution);

  const auto high = os::empirical_tail(model, 1, 1, 50.0, 0.5, 1000, 3);
  CHECK(high.p_hat == 0.0);
  CHECK(high.below_resolution);
}

TEST_CASE("exceedance is monotone in r and in mesh refinement") {
  const auto model = CorrelationModel::powered_exponential(1.0, 2.0, 1.0);
  const double u = 1.0;
  double previous = -1.0;
  for (int r = 1; r <= 3; ++r) {
    const auto est = os::empirical_tail(model, 3, r, u, 0.5, 4000, 11);
    CHECK(est.p_hat >= previous);
    previous = est.p_hat;
    // half-mesh estimate rides the same paths, so it can only grow
    CHECK(est.p_hat_half >= est.p_hat);
  }
}

TEST_CASE("replicate floor is enforced") {
  const auto model = CorrelationModel::powered_exponential(1.0, 1.0, 1.0);
  CHECK_THROWS_AS(os::empirical_tail(model, 1, 1, 1.0, 0.5, 10, 3),
                  std::invalid_argument);
}

}  // TEST_SUITE
