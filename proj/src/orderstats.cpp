#include "gpx/orderstats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gpx/parallel.hpp"

namespace gpx::orderstats {

OrderStatPath order_statistic_path(const gaussim::PathEnsemble& ensemble, int r) {
  if (r < 1 || r > ensemble.n)
    throw std::invalid_argument("order_statistic_path: r must be in [1, n]");
  OrderStatPath path;
  path.grid = ensemble.grid;
  path.r = r;
  path.n = ensemble.n;
  const long count = ensemble.grid.count();
  path.values.resize(count);
  std::vector<double> column(static_cast<std::size_t>(ensemble.n));
  for (long j = 0; j < count; ++j) {
    for (long i = 0; i < ensemble.n; ++i)
      column[static_cast<std::size_t>(i)] = ensemble.values(i, j);
    std::nth_element(column.begin(), column.begin() + (r - 1), column.end());
    path.values[j] = column[static_cast<std::size_t>(r - 1)];
  }
  return path;
}

double sup_on_interval(const OrderStatPath& path, double a, double b) {
  if (a > b) throw std::invalid_argument("sup_on_interval: need a <= b");
  const GridSpec& g = path.grid;
  if (b < g.t0 || a > g.t_end())
    throw std::invalid_argument("sup_on_interval: [a, b] misses the grid range");
  long lo = static_cast<long>(std::floor((a - g.t0) / g.mesh + 1e-9));
  long hi = static_cast<long>(std::ceil((b - g.t0) / g.mesh - 1e-9));
  lo = std::clamp<long>(lo, 0, g.count() - 1);
  hi = std::clamp<long>(hi, 0, g.count() - 1);
  double best = path.values[lo];
  for (long j = lo + 1; j <= hi; ++j) best = std::max(best, path.values[j]);
  return best;
}

extremes::TailEstimate empirical_tail(const correlation::CorrelationModel& model,
                                      long n, int r, double u, double theta,
                                      long replicates, std::uint64_t seed,
                                      unsigned threads,
                                      std::optional<double> pickands_h) {
  if (n < 1 || r < 1 || r > n)
    throw std::invalid_argument("empirical_tail: need 1 <= r <= n");
  if (theta <= 0.0 || theta > 1.0)
    throw std::invalid_argument("empirical_tail: theta must be in (0, 1]");
  if (replicates < 1000)
    throw std::invalid_argument("empirical_tail: need >= 1000 replicates");

  const double alpha = model.alpha();
  // level-adapted mesh; levels inside one unit never exceed 1/theta
  const PickandsGrid level_grid(std::max(1.0, std::abs(u)), alpha, theta);
  const double mesh = level_grid.q;
  const long coarse_levels = level_grid.levels;
  const double fine_mesh = 0.5 * mesh;
  const long fine_levels = 2 * coarse_levels;  // even fine indices = coarse grid
  const GridSpec fine_grid(0.0, fine_levels * fine_mesh, fine_mesh);

  const gaussim::SpectralWeights sw = gaussim::circulant_embed(model, fine_grid);
  const int rhat = static_cast<int>(n) - r + 1;

  std::atomic<long> coarse_hits{0}, fine_hits{0};
  parallel_for(replicates, threads, [&](std::int64_t rep) {
    Eigen::MatrixXd paths;
    gaussim::sample_ensemble_rows(sw, fine_grid.count(), n, seed,
                                  static_cast<std::uint64_t>(rep), 0, paths);
    bool coarse = false, fine = false;
    for (long j = 0; j <= fine_levels && !(coarse && fine); ++j) {
      int above = 0;
      for (long i = 0; i < n; ++i) above += paths(i, j) > u;
      if (above >= rhat) {
        fine = true;
        if (j % 2 == 0) coarse = true;
      }
    }
    if (coarse) coarse_hits.fetch_add(1, std::memory_order_relaxed);
    if (fine) fine_hits.fetch_add(1, std::memory_order_relaxed);
  });

  extremes::TailEstimate est;
  est.u = u;
  est.replicates = replicates;
  est.theta = theta;
  est.mesh = mesh;
  const double reps = static_cast<double>(replicates);
  est.p_hat = static_cast<double>(coarse_hits.load()) / reps;
  est.p_hat_half = static_cast<double>(fine_hits.load()) / reps;
  est.se = std::sqrt(std::max(est.p_hat * (1.0 - est.p_hat), 0.0) / reps);
  est.mesh_stable = std::abs(est.p_hat - est.p_hat_half) <= 2.0 * est.se;
  est.below_resolution = coarse_hits.load() == 0;
  if (u > 0.0) {
    std::optional<double> h = pickands_h;
    if (!h) h = extremes::pickands_closed_form(alpha, rhat);
    if (h) {
      est.asymptotic_value =
          extremes::tail_asymptotic(u, static_cast<int>(n), r, alpha, model.c(), *h);
      est.ratio = est.p_hat / est.asymptotic_value;
    }
  }
  return est;
}

}  // namespace gpx::orderstats
