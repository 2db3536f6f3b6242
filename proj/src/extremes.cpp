#include "gpx/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gpx/gaussim.hpp"
#include "gpx/parallel.hpp"
#include "gpx/rng.hpp"

namespace gpx::extremes {

double normal_tail(double u) { return 0.5 * std::erfc(u / std::numbers::sqrt2); }

double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::numbers::sqrt2); }

double normal_pdf(double u) {
  return std::exp(-0.5 * u * u) * 0.3989422804014326779;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return std::round(v);
}

double tail_asymptotic(double u, int n, int r, double alpha, double c, double h) {
  if (u <= 0.0) throw std::domain_error("tail_asymptotic: u must be positive");
  if (n < 1 || r < 1 || r > n)
    throw std::invalid_argument("tail_asymptotic: need 1 <= r <= n");
  if (alpha <= 0.0 || alpha > 2.0)
    throw std::invalid_argument("tail_asymptotic: alpha must be in (0, 2]");
  if (c <= 0.0 || h <= 0.0)
    throw std::invalid_argument("tail_asymptotic: C and H must be positive");
  const int rhat = n - r + 1;
  return std::pow(c, 1.0 / alpha) * binomial(n, rhat) * h *
         std::pow(u, 2.0 / alpha) * std::pow(normal_tail(u), rhat);
}

std::optional<double> pickands_closed_form(double alpha, int k) {
  if (k < 1) return std::nullopt;
  if (std::abs(alpha - 2.0) < 1e-12) return k / std::sqrt(std::numbers::pi);
  if (std::abs(alpha - 1.0) < 1e-12 && k == 1) return 1.0;
  return std::nullopt;
}

OrthantUnion::OrthantUnion(int k) : k_(k) {
  if (k != 1 && k != 2)
    throw std::invalid_argument("OrthantUnion: exact sweep supports k <= 2 only");
}

void OrthantUnion::insert(const double* corner) {
  if (k_ == 1) {
    if (corner[0] > best_) {
      best_ = corner[0];
      measure_ = std::exp(best_);
    }
    return;
  }
  const double a = corner[0], b = corner[1];
  auto it = frontier_.lower_bound(a);
  if (it != frontier_.end() && it->second >= b) return;  // dominated by existing

  auto contribution = [this](std::map<double, double>::iterator x) {
    const double ea_prev =
        x == frontier_.begin() ? 0.0 : std::exp(std::prev(x)->first);
    return (std::exp(x->first) - ea_prev) * std::exp(x->second);
  };

  // Existing points with a' <= a and b' <= b are dominated by the new corner;
  // they form a contiguous run ending at the insertion point (an equal-key
  // entry with smaller b included, since std::map will not overwrite it).
  auto right = it;
  if (right != frontier_.end() && right->first == a) ++right;
  auto left = it;
  while (left != frontier_.begin() && std::prev(left)->second <= b) --left;
  for (auto x = left; x != right; ++x) measure_ -= contribution(x);
  if (right != frontier_.end()) measure_ -= contribution(right);
  frontier_.erase(left, right);
  auto inserted = frontier_.emplace(a, b).first;
  measure_ += contribution(inserted);
  if (right != frontier_.end()) measure_ += contribution(right);
}

namespace {

struct ReplicateValues {
  std::vector<double> fine;
  std::vector<double> coarse;
};

// Grid index of the last term belonging to horizon T at the given mesh.
long mark_index(double horizon, double mesh) {
  return static_cast<long>(std::floor(horizon / mesh + 1e-9));
}

void validate_config(const PickandsConfig& cfg) {
  if (cfg.alpha <= 0.0 || cfg.alpha > 2.0)
    throw std::invalid_argument("pickands: alpha must be in (0, 2]");
  if (cfg.k < 1) throw std::invalid_argument("pickands: k must be >= 1");
  if (cfg.horizons.empty()) throw std::invalid_argument("pickands: no horizons");
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
    if (cfg.horizons[i] <= 0.0)
      throw std::invalid_argument("pickands: horizons must be positive");
    if (i > 0 && cfg.horizons[i] <= cfg.horizons[i - 1])
      throw std::invalid_argument("pickands: horizons must be ascending");
  }
  if (cfg.theta <= 0.0) throw std::invalid_argument("pickands: theta must be positive");
  if (cfg.replicates < 1) throw std::invalid_argument("pickands: replicates must be >= 1");
  if (cfg.method == PickandsMethod::kExactSweep && cfg.k > 2)
    throw std::invalid_argument("pickands: exact sweep mode is unsupported for k >= 3");
}

bool use_exact_sweep(const PickandsConfig& cfg) {
  if (cfg.method == PickandsMethod::kExactSweep) return true;
  if (cfg.method == PickandsMethod::kImportance) return false;
  return cfg.k <= 2;
}

std::vector<PickandsEstimate> summarize(const PickandsConfig& cfg,
                                        const std::vector<ReplicateValues>& reps,
                                        bool richardson) {
  const std::size_t n_t = cfg.horizons.size();
  const double divisor = std::exp2(0.5 * cfg.alpha) - 1.0;
  std::vector<PickandsEstimate> out(n_t);
  for (std::size_t ti = 0; ti < n_t; ++ti) {
    const double T = cfg.horizons[ti];
    const bool correct = richardson && mark_index(T, 2.0 * cfg.theta) >= 1;
    double sum = 0.0, sum2 = 0.0, sum_f = 0.0, sum_c = 0.0;
    for (const auto& rep : reps) {
      const double f = rep.fine[ti];
      const double c = rep.coarse[ti];
      const double v = correct ? f + (f - c) / divisor : f;
      sum += v;
      sum2 += v * v;
      sum_f += f;
      sum_c += c;
    }
    const double n = static_cast<double>(reps.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    PickandsEstimate est;
    est.alpha = cfg.alpha;
    est.k = cfg.k;
    est.T = T;
    est.theta = cfg.theta;
    est.replicates = cfg.replicates;
    est.value = mean / T;
    est.ci_half_width = 1.96 * std::sqrt(var / n) / T;
    est.value_fine = sum_f / n / T;
    est.value_coarse = sum_c / n / T;
    out[ti] = est;
  }
  return out;
}

constexpr std::uint32_t kWSampleStream = 0x10000u;

}  // namespace

// Estimates the grid functional H(T) = E nu(union over grid t of the orthants
// with corners Z_i(t)), Z_i(t) = sqrt(2) B_i(t) - t^alpha, by decomposing the
// union measure over the first grid point whose orthant covers w. Tilting each
// term by exp(sum_i Z_i(t)) (unit mean) turns it into the expectation of a
// [0,1] variable driven by the increments D_i(s) = sqrt(2) B~_i(s) - |s|^alpha
// of a two-sided fBm; term j then equals E[1 - nu(union of orthants with
// corners min(D(-m q), 0), m = 1..j)], and one left-window path per replicate
// serves every grid point and every horizon in the ladder.
std::vector<PickandsEstimate> pickands_ladder(const PickandsConfig& cfg) {
  validate_config(cfg);
  const bool exact = use_exact_sweep(cfg);
  const double t_max = cfg.horizons.back();
  const long steps = mark_index(t_max, cfg.theta);

  const std::size_t n_t = cfg.horizons.size();
  std::vector<long> fine_marks(n_t), coarse_marks(n_t);
  for (std::size_t ti = 0; ti < n_t; ++ti) {
    fine_marks[ti] = mark_index(cfg.horizons[ti], cfg.theta);
    coarse_marks[ti] = mark_index(cfg.horizons[ti], 2.0 * cfg.theta);
  }

  std::vector<ReplicateValues> reps(static_cast<std::size_t>(cfg.replicates));
  if (steps == 0) {
    // Only t = 0 contributes: H(T) = 1 exactly.
    for (auto& rep : reps) {
      rep.fine.assign(n_t, 1.0);
      rep.coarse.assign(n_t, 1.0);
    }
    return summarize(cfg, reps, false);
  }

  const gaussim::FgnEngine engine(cfg.alpha, steps, cfg.theta);
  const double sqrt2 = std::numbers::sqrt2;

  parallel_for(cfg.replicates, cfg.threads, [&](std::int64_t r) {
    // Drifted two-sided fBm differences at offsets -m*theta, m = 1..steps.
    Eigen::MatrixXd corners(cfg.k, steps);
    Eigen::VectorXd inc;
    for (int i = 0; i < cfg.k; ++i) {
      engine.sample(cfg.seed, static_cast<std::uint64_t>(r),
                    static_cast<std::uint32_t>(i), inc);
      double b = 0.0;
      for (long m = 1; m <= steps; ++m) {
        b += inc[m - 1];
        const double u = cfg.theta * static_cast<double>(m);
        corners(i, m - 1) = std::min(sqrt2 * b - std::pow(u, cfg.alpha), 0.0);
      }
    }

    auto& rep = reps[static_cast<std::size_t>(r)];
    rep.fine.assign(n_t, 1.0);
    rep.coarse.assign(n_t, 1.0);

    if (exact) {
      auto sweep = [&](long stride, const std::vector<long>& marks,
                       std::vector<double>& out) {
        OrthantUnion frontier(cfg.k);
        double running = 1.0;  // j = 0 term
        std::size_t ti = 0;
        while (ti < n_t && marks[ti] == 0) out[ti++] = running;
        const long last = steps / stride;
        for (long m = 1; m <= last; ++m) {
          frontier.insert(corners.col(m * stride - 1).data());
          running += 1.0 - frontier.measure();
          while (ti < n_t && marks[ti] == m) out[ti++] = running;
        }
        while (ti < n_t) out[ti++] = running;  // guards rounding slack
      };
      sweep(1, fine_marks, rep.fine);
      sweep(2, coarse_marks, rep.coarse);
    } else {
      // Importance sampling over w: draws from exp(sum w) on the negative
      // orthant, i.e. w_i = log U_i, then term j contributes the fraction of
      // samples not yet covered by the first j orthants.
      rng::CounterRng wgen(cfg.seed, static_cast<std::uint64_t>(r), kWSampleStream);
      const long m_w = cfg.is_samples;
      Eigen::MatrixXd w(cfg.k, m_w);
      for (long s = 0; s < m_w; ++s)
        for (int i = 0; i < cfg.k; ++i) w(i, s) = std::log(wgen.uniform());
      auto covers = [&](long corner_idx, long s) {
        for (int i = 0; i < cfg.k; ++i)
          if (w(i, s) >= corners(i, corner_idx)) return false;
        return true;
      };
      auto sweep = [&](long stride, const std::vector<long>& marks,
                       std::vector<double>& out) {
        std::vector<long> cover(static_cast<std::size_t>(m_w));
        const long last = steps / stride;
        for (long s = 0; s < m_w; ++s) {
          long c = last + 1;
          for (long m = 1; m <= last; ++m)
            if (covers(m * stride - 1, s)) {
              c = m;
              break;
            }
          cover[static_cast<std::size_t>(s)] = c;
        }
        for (std::size_t ti = 0; ti < n_t; ++ti) {
          const long lt = std::min(marks[ti], last);
          double sum = 0.0;
          for (long s = 0; s < m_w; ++s)
            sum += static_cast<double>(
                std::min(cover[static_cast<std::size_t>(s)], lt + 1));
          out[ti] = sum / static_cast<double>(m_w);
        }
      };
      sweep(1, fine_marks, rep.fine);
      sweep(2, coarse_marks, rep.coarse);
    }
  });

  return summarize(cfg, reps, cfg.mesh_extrapolate);
}

PickandsEstimate pickands_estimate(double alpha, int k, double T, double theta,
                                   long replicates, std::uint64_t seed,
                                   unsigned threads, PickandsMethod method) {
  PickandsConfig cfg;
  cfg.alpha = alpha;
  cfg.k = k;
  cfg.horizons = {T};
  cfg.theta = theta;
  cfg.replicates = replicates;
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.method = method;
  return pickands_ladder(cfg).front();
}

std::vector<PickandsEstimate> pickands_ladder_direct(const PickandsConfig& cfg) {
  validate_config(cfg);
  const bool exact = use_exact_sweep(cfg);
  const double t_max = cfg.horizons.back();
  const long steps = mark_index(t_max, cfg.theta);
  const std::size_t n_t = cfg.horizons.size();
  std::vector<long> fine_marks(n_t);
  for (std::size_t ti = 0; ti < n_t; ++ti)
    fine_marks[ti] = mark_index(cfg.horizons[ti], cfg.theta);

  std::vector<ReplicateValues> reps(static_cast<std::size_t>(cfg.replicates));
  const double sqrt2 = std::numbers::sqrt2;
  const gaussim::FgnEngine engine(cfg.alpha, std::max<long>(steps, 1), cfg.theta);

  parallel_for(cfg.replicates, cfg.threads, [&](std::int64_t r) {
    Eigen::MatrixXd z(cfg.k, steps + 1);
    Eigen::VectorXd inc;
    for (int i = 0; i < cfg.k; ++i) {
      z(i, 0) = 0.0;
      if (steps > 0) {
        engine.sample(cfg.seed, static_cast<std::uint64_t>(r),
                      static_cast<std::uint32_t>(i), inc);
        double b = 0.0;
        for (long m = 1; m <= steps; ++m) {
          b += inc[m - 1];
          const double u = cfg.theta * static_cast<double>(m);
          z(i, m) = sqrt2 * b - std::pow(u, cfg.alpha);
        }
      }
    }
    auto& rep = reps[static_cast<std::size_t>(r)];
    rep.fine.assign(n_t, 0.0);
    rep.coarse.assign(n_t, 0.0);
    if (exact) {
      OrthantUnion frontier(cfg.k);
      std::size_t ti = 0;
      for (long j = 0; j <= steps; ++j) {
        frontier.insert(z.col(j).data());
        while (ti < n_t && fine_marks[ti] == j) rep.fine[ti++] = frontier.measure();
      }
      while (ti < n_t) rep.fine[ti++] = frontier.measure();
    } else {
      rng::CounterRng wgen(cfg.seed, static_cast<std::uint64_t>(r), kWSampleStream);
      const long m_w = cfg.is_samples;
      Eigen::VectorXd shift = z.rowwise().maxCoeff();
      const double weight = std::exp(shift.sum());
      std::vector<long> cover(static_cast<std::size_t>(m_w));
      for (long s = 0; s < m_w; ++s) {
        Eigen::VectorXd w(cfg.k);
        for (int i = 0; i < cfg.k; ++i) w[i] = shift[i] + std::log(wgen.uniform());
        long c = steps + 1;
        for (long j = 0; j <= steps; ++j) {
          bool inside = true;
          for (int i = 0; i < cfg.k; ++i)
            if (w[i] >= z(i, j)) {
              inside = false;
              break;
            }
          if (inside) {
            c = j;
            break;
          }
        }
        cover[static_cast<std::size_t>(s)] = c;
      }
      for (std::size_t ti = 0; ti < n_t; ++ti) {
        long hits = 0;
        for (long s = 0; s < m_w; ++s)
          if (cover[static_cast<std::size_t>(s)] <= fine_marks[ti]) ++hits;
        rep.fine[ti] = weight * static_cast<double>(hits) / static_cast<double>(m_w);
      }
    }
    rep.coarse = rep.fine;
  });

  return summarize(cfg, reps, false);
}

Extrapolation pickands_extrapolate(const std::vector<PickandsEstimate>& ladder) {
  if (ladder.size() < 3)
    throw std::invalid_argument("pickands_extrapolate: need >= 3 ladder points");
  for (const auto& e : ladder) {
    if (e.alpha != ladder.front().alpha || e.k != ladder.front().k ||
        e.theta != ladder.front().theta)
      throw std::invalid_argument(
          "pickands_extrapolate: ladder must share (alpha, k, theta)");
  }
  double sw = 0.0, swx = 0.0, swxx = 0.0, swy = 0.0, swxy = 0.0;
  for (const auto& e : ladder) {
    const double sigma = std::max(e.ci_half_width / 1.96, 1e-12);
    const double w = 1.0 / (sigma * sigma);
    const double x = 1.0 / e.T;
    sw += w;
    swx += w * x;
    swxx += w * x * x;
    swy += w * e.value;
    swxy += w * x * e.value;
  }
  const double det = sw * swxx - swx * swx;
  if (det <= 0.0)
    throw std::invalid_argument("pickands_extrapolate: degenerate design (equal T?)");
  Extrapolation fit;
  fit.intercept = (swxx * swy - swx * swxy) / det;
  fit.slope = (sw * swxy - swx * swy) / det;
  fit.intercept_ci = 1.96 * std::sqrt(swxx / det);
  fit.residuals.resize(static_cast<Eigen::Index>(ladder.size()));
  for (std::size_t i = 0; i < ladder.size(); ++i)
    fit.residuals[static_cast<Eigen::Index>(i)] =
        ladder[i].value - (fit.intercept + fit.slope / ladder[i].T);
  return fit;
}

}  // namespace gpx::extremes
