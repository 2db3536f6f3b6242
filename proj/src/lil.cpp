#include "gpx/lil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "gpx/parallel.hpp"
#include "gpx/quadrature.hpp"

namespace gpx::lil {

namespace {

constexpr double kEe = 15.154262241479262;  // e^e

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

ThresholdFamily::ThresholdFamily(double p, int n, int r, double alpha, double c,
                                 std::optional<double> pickands_h)
    : p_(p), n_(n), r_(r), alpha_(alpha), c_(c), pickands_h_(pickands_h) {
  if (n_ < 1 || r_ < 1 || r_ > n_)
    throw std::invalid_argument("ThresholdFamily: need 1 <= r <= n");
  if (alpha_ <= 0.0 || alpha_ > 2.0)
    throw std::invalid_argument("ThresholdFamily: alpha must be in (0, 2]");
  if (c_ <= 0.0) throw std::invalid_argument("ThresholdFamily: C must be positive");
  if (pickands_h_ && *pickands_h_ <= 0.0)
    throw std::invalid_argument("ThresholdFamily: Pickands value must be positive");
  const double rhat_d = static_cast<double>(rhat());
  shift_ = (2.0 - rhat_d * alpha_) / (2.0 * alpha_) + 1.0 - p_;

  // Smallest s with log s + shift * log log s positive and increasing.
  if (shift_ == 0.0) {
    s_min_ = 1.0;
  } else {
    auto g = [this](double logs) { return logs + shift_ * std::log(logs); };
    double lo, hi;
    if (shift_ > 0.0) {
      lo = 1e-12;
      hi = 1.0;  // g(1) = 1 > 0
    } else {
      lo = -shift_;  // monotone increasing for log s > -shift
      if (g(lo) >= 0.0) {
        s_min_ = std::exp(lo);
        return;
      }
      hi = lo;
      while (g(hi) < 0.0) hi *= 2.0;
    }
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) < 0.0 ? lo : hi) = mid;
    }
    s_min_ = std::exp(hi);
  }
}

double ThresholdFamily::pickands_h() const {
  if (!pickands_h_)
    throw std::logic_error("ThresholdFamily: no Pickands value supplied");
  return *pickands_h_;
}

double ThresholdFamily::f(double s) const {
  if (s < s_min_ * (1.0 - 1e-12)) {
    throw std::domain_error("f_p: s = " + std::to_string(s) +
                            " below the family domain s_min = " +
                            std::to_string(s_min_));
  }
  const double logs = std::log(std::max(s, s_min_));
  const double inner =
      shift_ == 0.0 ? logs : logs + shift_ * std::log(std::max(logs, 1e-300));
  return std::sqrt(2.0 / static_cast<double>(rhat()) * std::max(inner, 0.0));
}

double ThresholdFamily::gf_constant() const {
  const double rhat_d = static_cast<double>(rhat());
  return std::pow(c_, 1.0 / alpha_) * extremes::binomial(n_, rhat()) * pickands_h() *
         std::pow(2.0 * std::numbers::pi, -0.5 * rhat_d) *
         std::pow(2.0 / rhat_d, (2.0 - rhat_d * alpha_) / (2.0 * alpha_));
}

double ThresholdFamily::tail_z(double t) const {
  if (t <= 1.0) throw std::domain_error("tail_z: t must exceed 1");
  return gf_constant() / t * std::pow(std::log(t), p_ - 1.0);
}

bool ThresholdFamily::within_validity_band(double a, double b) const {
  if (!(a >= std::max(s_min_, std::exp(1.0)) && b >= a)) return false;
  const double rhat_d = static_cast<double>(rhat());
  const int probes = 64;
  for (int i = 0; i <= probes; ++i) {
    const double t = a * std::pow(b / a, static_cast<double>(i) / probes);
    const double f2 = f(t) * f(t);
    const double logt = std::log(t);
    if (f2 < 2.0 / rhat_d * logt * (1.0 - 1e-12)) return false;
    if (f2 > 3.0 / rhat_d * logt * (1.0 + 1e-12)) return false;
  }
  return true;
}

double f_p(const ThresholdFamily& family, double s) { return family.f(s); }

double h_p(const ThresholdFamily& family, double t, double z) {
  if (family.p() <= 0.0)
    throw std::domain_error("h_p: requires p > 0");
  if (t < std::max(family.s_min(), kEe))
    throw std::domain_error("h_p: t must be >= max(s_min, e^e)");
  if (z <= 0.0) throw std::domain_error("h_p: exceedance probability must be positive");
  return family.p() * std::log(std::log(t)) / z;
}

double h_p_asymptotic(const ThresholdFamily& family, double t) {
  if (family.p() <= 0.0)
    throw std::domain_error("h_p: requires p > 0");
  if (t < std::max(family.s_min(), kEe))
    throw std::domain_error("h_p: t must be >= max(s_min, e^e)");
  return h_p(family, t, family.tail_z(t));
}

Dichotomy classify_dichotomy(const ThresholdFamily& family) {
  return family.p() >= 0.0 ? Dichotomy::kOne : Dichotomy::kZero;
}

TailModel TailModel::canonical(double a, double q) {
  if (a <= 0.0) throw std::invalid_argument("TailModel: amplitude must be positive");
  TailModel m;
  m.z = [a, q](double u) { return a / u * std::pow(std::log(u), -q); };
  m.declared = true;
  m.amplitude = a;
  m.u_exponent = 1.0;
  m.log_exponent = q;
  return m;
}

TailModel TailModel::constant(double c) {
  if (c <= 0.0) throw std::invalid_argument("TailModel: constant must be positive");
  TailModel m;
  m.z = [c](double) { return c; };
  m.declared = true;
  m.amplitude = c;
  m.u_exponent = 0.0;
  m.log_exponent = 0.0;
  return m;
}

TailModel TailModel::from_family(const ThresholdFamily& family) {
  return canonical(family.gf_constant(), 1.0 - family.p());
}

TailModel TailModel::function_only(std::function<double(double)> z) {
  TailModel m;
  m.z = std::move(z);
  m.declared = false;
  return m;
}

IfReport integral_If(const TailModel& model, double T, double u_max) {
  if (!(T > 0.0) || !(u_max > T))
    throw std::invalid_argument("integral_If: need 0 < T < u_max");
  if (model.declared && model.u_exponent == 1.0 && T <= 1.0)
    throw std::invalid_argument("integral_If: canonical tails need T > 1");
  IfReport rep;
  rep.numeric_part = quadrature::integrate(model.z, T, u_max, 1e-9);
  if (model.declared) {
    rep.u_exponent = model.u_exponent;
    rep.log_exponent = model.log_exponent;
    const double s = model.u_exponent, q = model.log_exponent;
    if (s < 1.0 || (s == 1.0 && q <= 1.0)) {
      rep.verdict = IfReport::Verdict::kDivergent;
      return rep;
    }
    if (s == 1.0) {
      rep.tail_remainder =
          model.amplitude * std::pow(std::log(u_max), 1.0 - q) / (q - 1.0);
    } else {
      // leading-order remainder for faster-than-1/u decay
      rep.tail_remainder = model.amplitude * std::pow(u_max, 1.0 - s) *
                           std::pow(std::log(u_max), -q) / (s - 1.0);
    }
    rep.value = rep.numeric_part + rep.tail_remainder;
    rep.verdict = IfReport::Verdict::kFinite;
    return rep;
  }
  rep.verdict = IfReport::Verdict::kInconclusive;
  return rep;
}

CrossingRecord track_crossings(const orderstats::OrderStatPath& path,
                               const ThresholdFamily& family, double a, double T,
                               std::span<const double> eta_queries) {
  const GridSpec& g = path.grid;
  if (!(a <= T)) throw std::invalid_argument("track_crossings: need a <= T");
  const double slack = 1e-9 * g.mesh;
  if (a < g.t0 - slack || T > g.t_end() + slack)
    throw std::invalid_argument("track_crossings: scan window outside the grid");
  if (a < family.s_min() * (1.0 - 1e-12))
    throw std::invalid_argument("track_crossings: window starts below s_min");

  CrossingRecord rec;
  rec.window_start = a;
  rec.horizon = T;
  const long j_lo = static_cast<long>(std::ceil((a - g.t0) / g.mesh - 1e-9));
  const long j_hi = std::min<long>(
      g.count() - 1, static_cast<long>(std::floor((T - g.t0) / g.mesh + 1e-9)));
  for (long j = std::max<long>(j_lo, 0); j <= j_hi; ++j) {
    const double t = g.time_at(j);
    if (path.values[j] >= family.f(t)) rec.crossing_times.push_back(t);
  }
  if (!rec.crossing_times.empty()) rec.xi = rec.crossing_times.back();
  for (double z : eta_queries) {
    EtaQuery q;
    q.z = z;
    auto it = std::lower_bound(rec.crossing_times.begin(), rec.crossing_times.end(),
                               z - 1e-12);
    if (it != rec.crossing_times.end()) q.crossing = *it;
    rec.eta_queries.push_back(q);
  }
  return rec;
}

LilReport lil_experiment(const LilConfig& config) {
  if (config.horizon < 1e3)
    throw std::invalid_argument("lil_experiment: horizon must be >= 1e3");
  if (config.p < 0.0) throw std::invalid_argument("lil_experiment: requires p >= 0");
  if (config.runs < 1) throw std::invalid_argument("lil_experiment: runs must be >= 1");

  const double alpha = config.model.alpha();
  std::optional<double> h = config.pickands_h;
  const int rhat = config.n - config.r + 1;
  if (!h) h = extremes::pickands_closed_form(alpha, rhat);
  ThresholdFamily family(config.p, config.n, config.r, alpha, config.model.c(), h);

  const double a = std::max(config.scan_start, family.s_min());
  const double T = config.horizon;
  if (!(a < T)) throw std::invalid_argument("lil_experiment: scan window is empty");

  const double u_max = family.f(T);
  const double mesh = config.theta * std::pow(u_max, -2.0 / alpha);
  const GridSpec grid(a, T - a, mesh);
  const long count = grid.count();
  const gaussim::SpectralWeights sw = gaussim::circulant_embed(config.model, grid);

  // thresholds and normalizers shared by all runs
  Eigen::VectorXd threshold(count), normalizer(count);
  const double half_t = 0.5 * T;
  long half_idx = count;
  for (long j = 0; j < count; ++j) {
    const double t = grid.time_at(j);
    threshold[j] = family.f(t);
    normalizer[j] = std::sqrt(2.0 / static_cast<double>(rhat) * std::log(t));
    if (t >= half_t && half_idx == count) half_idx = j;
  }

  LilReport rep;
  rep.p = config.p;
  rep.n = config.n;
  rep.r = config.r;
  rep.alpha = alpha;
  rep.c = config.model.c();
  rep.horizon = T;
  rep.scan_start = a;
  rep.mesh = mesh;
  rep.theta = config.theta;
  rep.runs = config.runs;
  rep.seed = config.seed;
  rep.per_run.resize(static_cast<std::size_t>(config.runs));

  const long n_windows = static_cast<long>(std::floor(T - a));
  parallel_for(config.runs, config.threads, [&](std::int64_t run) {
    Eigen::MatrixXd paths;
    gaussim::sample_ensemble_rows(sw, count, config.n, config.seed,
                                  static_cast<std::uint64_t>(run), 0, paths);
    LilRun out;
    std::vector<double> crossings;
    std::vector<char> window_hit(static_cast<std::size_t>(n_windows) + 1, 0);
    std::vector<double> col(static_cast<std::size_t>(config.n));
    double running_max = -1e300;
    for (long j = 0; j < count; ++j) {
      double x;
      if (config.n == 1) {
        x = paths(0, j);
      } else {
        for (int i = 0; i < config.n; ++i)
          col[static_cast<std::size_t>(i)] = paths(i, j);
        std::nth_element(col.begin(), col.begin() + (config.r - 1), col.end());
        x = col[static_cast<std::size_t>(config.r - 1)];
      }
      if (j >= half_idx) running_max = std::max(running_max, x / normalizer[j]);
      if (x >= threshold[j]) {
        const double t = grid.time_at(j);
        crossings.push_back(t);
        const long w = std::min<long>(static_cast<long>(t - a), n_windows);
        window_hit[static_cast<std::size_t>(w)] = 1;
      }
    }
    out.normalized_running_max = running_max;
    out.crossings = static_cast<long>(crossings.size());
    for (char hit : window_hit) out.crossing_windows += hit;
    if (!crossings.empty()) {
      out.xi = crossings.back();
      // longest crossing-free stretch within [T/2, T]
      double prev = half_t, longest = 0.0;
      for (double t : crossings) {
        if (t < half_t) continue;
        longest = std::max(longest, t - prev);
        prev = t;
      }
      longest = std::max(longest, T - prev);
      out.max_gap = longest;
      if (config.p > 0.0 && family.has_pickands_h())
        out.gap_to_hp = longest / h_p_asymptotic(family, T);
    }
    rep.per_run[static_cast<std::size_t>(run)] = std::move(out);
  });

  std::vector<double> maxima;
  maxima.reserve(rep.per_run.size());
  double window_sum = 0.0;
  for (const auto& run : rep.per_run) {
    maxima.push_back(run.normalized_running_max);
    window_sum += static_cast<double>(run.crossing_windows);
  }
  std::sort(maxima.begin(), maxima.end());
  rep.mean_normalized_max =
      std::accumulate(maxima.begin(), maxima.end(), 0.0) / maxima.size();
  rep.q05_normalized_max = quantile_sorted(maxima, 0.05);
  rep.q50_normalized_max = quantile_sorted(maxima, 0.50);
  rep.q95_normalized_max = quantile_sorted(maxima, 0.95);
  rep.mean_crossing_windows = window_sum / static_cast<double>(config.runs);
  if (family.has_pickands_h()) {
    const double kc = family.gf_constant();
    const double la = std::log(a), lt = std::log(T);
    rep.predicted_cumulative_crossings =
        config.p > 0.0
            ? kc * (std::pow(lt, config.p) - std::pow(la, config.p)) / config.p
            : kc * std::log(lt / la);
    if (config.p > 0.0 && T >= std::max(family.s_min(), kEe))
      rep.hp_at_horizon = h_p_asymptotic(family, T);
  }
  rep.within_validity_band = family.within_validity_band(a, T);
  return rep;
}

}  // namespace gpx::lil
