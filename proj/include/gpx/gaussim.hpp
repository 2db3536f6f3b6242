#pragma once

// Exact simulation of stationary Gaussian processes on uniform grids via
// circulant embedding, and of fractional Brownian motion via embedding of the
// increment (fractional Gaussian noise) covariance.

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>

#include "gpx/correlation.hpp"
#include "gpx/grid.hpp"

namespace gpx::gaussim {

struct EmbeddingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Nonnegative spectral weights of the circulant extension of a stationary
/// covariance row. `size` >= 2 * (count - 1) and is a power of two.
struct SpectralWeights {
  Eigen::ArrayXd weights;      // clipped eigenvalues, length `size`
  long size = 0;               // circulant order M
  int doublings = 0;           // padding doublings applied
  double worst_eigenvalue = 0; // most negative raw eigenvalue seen
};

/// Embeds the covariance sequence cov(k), k = 0..  Retries with padding
/// doubled up to `max_doublings` times before failing.
SpectralWeights embed_covariance(const std::function<double(long)>& cov, long count,
                                 int max_doublings = 4, double clip_tol = 1e-8);

/// Circulant embedding of `model` sampled at the grid mesh.
SpectralWeights circulant_embed(const correlation::CorrelationModel& model,
                                const GridSpec& grid, int max_doublings = 4);

/// n stationary paths on a common grid; row i is path i. Regeneration from
/// the same (seed, grid, model, n) is bit-identical for any worker count.
struct PathEnsemble {
  GridSpec grid;
  long n = 0;
  std::uint64_t seed = 0;
  correlation::CorrelationModel model;
  Eigen::MatrixXd values;  // n x count
};

PathEnsemble sample_stationary(const correlation::CorrelationModel& model,
                               const GridSpec& grid, long n, std::uint64_t seed,
                               unsigned threads = 1);

/// Fills `out` (n x count) with n independent stationary paths for replicate
/// `replicate`; used by replicate-parallel estimators so each replicate owns
/// its RNG streams.
void sample_ensemble_rows(const SpectralWeights& weights, long count, long n,
                          std::uint64_t seed, std::uint64_t replicate,
                          std::uint32_t stream_base, Eigen::MatrixXd& out);

/// Fractional Brownian motion B_{alpha/2} with B(0) = 0 on a grid starting at
/// t0 = 0; Var B(t) = t^alpha.
Eigen::VectorXd sample_fbm(double alpha, const GridSpec& grid, std::uint64_t seed);

/// Reusable fractional-Gaussian-noise sampler: one embedding, many paths.
class FgnEngine {
 public:
  FgnEngine(double alpha, long steps, double mesh);

  long steps() const { return steps_; }
  double mesh() const { return mesh_; }

  /// Fills `out` (resized to steps()) with one fGn sequence for the stream
  /// keyed by (seed, replicate, stream).
  void sample(std::uint64_t seed, std::uint64_t replicate, std::uint32_t stream,
              Eigen::VectorXd& out) const;

 private:
  double alpha_;
  long steps_;
  double mesh_;
  Eigen::ArrayXd sqrt_weights_;
  long m_ = 0;
};

// Ensemble persistence: columnar CSV (t, path_1..path_n) and the compact
// binary format (magic "GPX1", little-endian, header N, n, mesh, seed).
void write_csv(const PathEnsemble& ensemble, const std::string& path);
void write_gpx(const PathEnsemble& ensemble, const std::string& path);
PathEnsemble read_gpx(const std::string& path);

}  // namespace gpx::gaussim
