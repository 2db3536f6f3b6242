#include "gpx/gaussim.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "gpx/parallel.hpp"
#include "gpx/rng.hpp"

namespace gpx::gaussim {

namespace {

long next_pow2(long n) {
  long m = 1;
  while (m < n) m <<= 1;
  return m;
}

Eigen::FFT<double>& thread_fft() {
  static thread_local Eigen::FFT<double> fft;
  return fft;
}

// Two paths of length `count` from one complex FFT block: with eigenvalues
// lambda and i.i.d. standard normal (U, V),
//   x = sqrt(M) * ifft(sqrt(lambda) .* (U + iV))
// has independent real and imaginary parts, each N(0, Sigma).
void sample_pair(const SpectralWeights& sw, long count, rng::CounterRng& gen,
                 Eigen::VectorXd* re_path, Eigen::VectorXd* im_path) {
  const long m = sw.size;
  std::vector<std::complex<double>> freq(static_cast<std::size_t>(m));
  for (long k = 0; k < m; ++k) {
    const double s = std::sqrt(sw.weights[k]);
    const double a = gen.normal();
    const double b = gen.normal();
    freq[static_cast<std::size_t>(k)] = {s * a, s * b};
  }
  std::vector<std::complex<double>> time;
  thread_fft().inv(time, freq);
  const double scale = std::sqrt(static_cast<double>(m));
  if (re_path) {
    re_path->resize(count);
    for (long j = 0; j < count; ++j)
      (*re_path)[j] = scale * time[static_cast<std::size_t>(j)].real();
  }
  if (im_path) {
    im_path->resize(count);
    for (long j = 0; j < count; ++j)
      (*im_path)[j] = scale * time[static_cast<std::size_t>(j)].imag();
  }
}

}  // namespace

SpectralWeights embed_covariance(const std::function<double(long)>& cov, long count,
                                 int max_doublings, double clip_tol) {
  if (count < 2) throw std::invalid_argument("embed_covariance: count must be >= 2");
  const long m0 = next_pow2(2 * (count - 1));
  double worst = 0.0;
  for (int d = 0; d <= max_doublings; ++d) {
    const long m = m0 << d;
    std::vector<double> row(static_cast<std::size_t>(m));
    for (long j = 0; j < m; ++j) row[static_cast<std::size_t>(j)] = cov(std::min(j, m - j));
    std::vector<std::complex<double>> freq;
    thread_fft().fwd(freq, row);
    SpectralWeights sw;
    sw.weights.resize(m);
    double min_ev = 0.0, max_ev = 0.0;
    for (long k = 0; k < m; ++k) {
      const double ev = freq[static_cast<std::size_t>(k)].real();
      sw.weights[k] = ev;
      min_ev = std::min(min_ev, ev);
      max_ev = std::max(max_ev, ev);
    }
    worst = std::min(worst, min_ev);
    if (min_ev >= -clip_tol * max_ev) {
      sw.weights = sw.weights.max(0.0);
      sw.size = m;
      sw.doublings = d;
      sw.worst_eigenvalue = min_ev;
      return sw;
    }
  }
  char msg[256];
  std::snprintf(msg, sizeof(msg),
                "circulant embedding failed after %d padding doublings; worst "
                "eigenvalue %.6e (try doubling the padding or coarsening the mesh)",
                max_doublings, worst);
  throw EmbeddingError(msg);
}

SpectralWeights circulant_embed(const correlation::CorrelationModel& model,
                                const GridSpec& grid, int max_doublings) {
  const double mesh = grid.mesh;
  return embed_covariance(
      [&model, mesh](long k) { return model.evaluate(mesh * static_cast<double>(k)); },
      grid.count(), max_doublings);
}

PathEnsemble sample_stationary(const correlation::CorrelationModel& model,
                               const GridSpec& grid, long n, std::uint64_t seed,
                               unsigned threads) {
  if (n < 1) throw std::invalid_argument("sample_stationary: n must be >= 1");
  const SpectralWeights sw = circulant_embed(model, grid);
  PathEnsemble ens;
  ens.grid = grid;
  ens.n = n;
  ens.seed = seed;
  ens.model = model;
  ens.values.resize(n, grid.count());
  const long blocks = (n + 1) / 2;
  parallel_for(blocks, threads, [&](std::int64_t b) {
    rng::CounterRng gen(seed, static_cast<std::uint64_t>(b), 0);
    Eigen::VectorXd re, im;
    const bool want_im = 2 * b + 1 < n;
    sample_pair(sw, grid.count(), gen, &re, want_im ? &im : nullptr);
    ens.values.row(2 * b) = re;
    if (want_im) ens.values.row(2 * b + 1) = im;
  });
  return ens;
}

void sample_ensemble_rows(const SpectralWeights& weights, long count, long n,
                          std::uint64_t seed, std::uint64_t replicate,
                          std::uint32_t stream_base, Eigen::MatrixXd& out) {
  out.resize(n, count);
  Eigen::VectorXd re, im;
  for (long b = 0; 2 * b < n; ++b) {
    rng::CounterRng gen(seed, replicate, stream_base + static_cast<std::uint32_t>(b));
    const bool want_im = 2 * b + 1 < n;
    sample_pair(weights, count, gen, &re, want_im ? &im : nullptr);
    out.row(2 * b) = re;
    if (want_im) out.row(2 * b + 1) = im;
  }
}

FgnEngine::FgnEngine(double alpha, long steps, double mesh)
    : alpha_(alpha), steps_(steps), mesh_(mesh) {
  if (alpha <= 0.0 || alpha > 2.0)
    throw std::invalid_argument("FgnEngine: alpha must be in (0, 2]");
  if (steps < 1) throw std::invalid_argument("FgnEngine: need >= 1 step");
  if (mesh <= 0.0) throw std::invalid_argument("FgnEngine: mesh must be positive");
  const double scale = std::pow(mesh, alpha);
  auto gamma = [alpha, scale](long k) {
    const double kk = static_cast<double>(k);
    return 0.5 * scale *
           (std::pow(std::abs(kk + 1.0), alpha) - 2.0 * std::pow(std::abs(kk), alpha) +
            std::pow(std::abs(kk - 1.0), alpha));
  };
  SpectralWeights sw;
  try {
    sw = embed_covariance(gamma, std::max<long>(steps, 2));
  } catch (const EmbeddingError& e) {
    throw EmbeddingError(std::string("fractional Gaussian noise embedding: ") + e.what());
  }
  sqrt_weights_ = sw.weights.sqrt();
  m_ = sw.size;
}

void FgnEngine::sample(std::uint64_t seed, std::uint64_t replicate, std::uint32_t stream,
                       Eigen::VectorXd& out) const {
  rng::CounterRng gen(seed, replicate, stream);
  std::vector<std::complex<double>> freq(static_cast<std::size_t>(m_));
  for (long k = 0; k < m_; ++k) {
    const double s = sqrt_weights_[k];
    const double a = gen.normal();
    const double b = gen.normal();
    freq[static_cast<std::size_t>(k)] = {s * a, s * b};
  }
  std::vector<std::complex<double>> time;
  thread_fft().inv(time, freq);
  const double scale = std::sqrt(static_cast<double>(m_));
  out.resize(steps_);
  for (long j = 0; j < steps_; ++j)
    out[j] = scale * time[static_cast<std::size_t>(j)].real();
}

Eigen::VectorXd sample_fbm(double alpha, const GridSpec& grid, std::uint64_t seed) {
  if (grid.t0 != 0.0) throw std::invalid_argument("sample_fbm: grid must start at t0 = 0");
  const long count = grid.count();
  FgnEngine engine(alpha, count - 1, grid.mesh);
  Eigen::VectorXd inc;
  engine.sample(seed, 0, 0, inc);
  Eigen::VectorXd path(count);
  path[0] = 0.0;
  for (long j = 1; j < count; ++j) path[j] = path[j - 1] + inc[j - 1];
  return path;
}

void write_csv(const PathEnsemble& ensemble, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "t";
  for (long i = 0; i < ensemble.n; ++i) out << ",path_" << (i + 1);
  out << "\n";
  char buf[32];
  for (long j = 0; j < ensemble.grid.count(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", ensemble.grid.time_at(j));
    out << buf;
    for (long i = 0; i < ensemble.n; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", ensemble.values(i, j));
      out << ',' << buf;
    }
    out << "\n";
  }
}

void write_gpx(const PathEnsemble& ensemble, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_gpx: cannot open " + path);
  const char magic[4] = {'G', 'P', 'X', '1'};
  out.write(magic, 4);
  const std::uint64_t count = static_cast<std::uint64_t>(ensemble.grid.count());
  const std::uint64_t n = static_cast<std::uint64_t>(ensemble.n);
  const double mesh = ensemble.grid.mesh;
  const std::uint64_t seed = ensemble.seed;
  out.write(reinterpret_cast<const char*>(&count), 8);
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&mesh), 8);
  out.write(reinterpret_cast<const char*>(&seed), 8);
  for (long i = 0; i < ensemble.n; ++i)
    for (long j = 0; j < ensemble.grid.count(); ++j) {
      const double v = ensemble.values(i, j);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
}

PathEnsemble read_gpx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_gpx: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "GPX1", 4) != 0)
    throw std::runtime_error("read_gpx: bad magic in " + path);
  std::uint64_t count = 0, n = 0, seed = 0;
  double mesh = 0.0;
  in.read(reinterpret_cast<char*>(&count), 8);
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&mesh), 8);
  in.read(reinterpret_cast<char*>(&seed), 8);
  PathEnsemble ens;
  ens.grid = GridSpec(0.0, mesh * static_cast<double>(count - 1), mesh);
  ens.n = static_cast<long>(n);
  ens.seed = seed;
  ens.values.resize(ens.n, static_cast<long>(count));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < count; ++j) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), 8);
      ens.values(static_cast<long>(i), static_cast<long>(j)) = v;
    }
  if (!in) throw std::runtime_error("read_gpx: truncated file " + path);
  return ens;
}

}  // namespace gpx::gaussim
