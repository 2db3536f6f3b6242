#pragma once

// Order-statistics processes X_{r:n} built from path ensembles, with grid
// suprema and Monte Carlo exceedance probabilities on [0, 1].

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "gpx/extremes.hpp"
#include "gpx/gaussim.hpp"
#include "gpx/grid.hpp"

namespace gpx::orderstats {

/// Pointwise r-th smallest of n paths on a common grid.
struct OrderStatPath {
  GridSpec grid;
  int r = 1;
  long n = 1;
  Eigen::VectorXd values;

  int rhat() const { return static_cast<int>(n) - r + 1; }
};

OrderStatPath order_statistic_path(const gaussim::PathEnsemble& ensemble, int r);

/// Max of the path over grid points in [a, b], endpoints snapped outward to
/// the nearest grid points. Throws if [a, b] misses the grid range entirely.
double sup_on_interval(const OrderStatPath& path, double a, double b);

/// Estimates P(sup_{[0,1]} X_{r:n} > u) on the level-adapted mesh
/// q = theta * u^(-2/alpha) (one fine simulation at q/2 also scores the
/// coupled half-mesh estimate used by the stability rule). `pickands_h`
/// overrides the closed-form constant in the paired asymptotic value.
extremes::TailEstimate empirical_tail(const correlation::CorrelationModel& model,
                                      long n, int r, double u, double theta,
                                      long replicates, std::uint64_t seed,
                                      unsigned threads = 1,
                                      std::optional<double> pickands_h = std::nullopt);

}  // namespace gpx::orderstats
