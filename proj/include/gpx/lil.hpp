#pragma once

// Threshold family f_p, the zero-one criterion for {X_{r:n}(t) > f(t) i.o.},
// last/next-crossing trackers and the large-horizon experiment harness.

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gpx/correlation.hpp"
#include "gpx/orderstats.hpp"

namespace gpx::lil {

/// Parameters (p, n, r, alpha, C) defining the threshold family
///   f_p(s) = sqrt((2/r_hat) (log s + shift log log s)),
///   shift  = (2 - r_hat alpha) / (2 alpha) + 1 - p,
/// together with the unit-interval exceedance constant of its tail law.
class ThresholdFamily {
 public:
  ThresholdFamily(double p, int n, int r, double alpha, double c,
                  std::optional<double> pickands_h = std::nullopt);

  double p() const { return p_; }
  int n() const { return n_; }
  int r() const { return r_; }
  int rhat() const { return n_ - r_ + 1; }
  double alpha() const { return alpha_; }
  double c() const { return c_; }
  double exponent_shift() const { return shift_; }
  double s_min() const { return s_min_; }
  bool has_pickands_h() const { return pickands_h_.has_value(); }
  double pickands_h() const;

  /// f_p(s); throws std::domain_error below s_min().
  double f(double s) const;

  /// K_c = C^(1/alpha) binom(n, r_hat) H (2 pi)^(-r_hat/2)
  ///       (2/r_hat)^((2 - r_hat alpha) / (2 alpha)); needs a Pickands value.
  double gf_constant() const;

  /// z_p(t) = K_c (t log^(1-p) t)^-1, the asymptotic unit-interval
  /// exceedance probability at level f_p(t).
  double tail_z(double t) const;

  /// True when (2/r_hat) log t <= f(t)^2 <= (3/r_hat) log t over [a, b]
  /// (the band in which the criterion's tail models are calibrated).
  bool within_validity_band(double a, double b) const;

 private:
  double p_;
  int n_, r_;
  double alpha_, c_, shift_, s_min_;
  std::optional<double> pickands_h_;
};

double f_p(const ThresholdFamily& family, double s);

/// Erdos-Revesz window h_p(t) = p z^-1 log log t with a supplied (Monte
/// Carlo plug-in) exceedance probability z; requires p > 0 and t >= e^e.
double h_p(const ThresholdFamily& family, double t, double z);

/// Same window with z taken from the family's asymptotic tail law.
double h_p_asymptotic(const ThresholdFamily& family, double t);

enum class Dichotomy { kZero, kOne };

/// P(X_{r:n}(t) > f_p(t) i.o.) is one iff p >= 0 (the criterion integral
/// behaves like int du / (u log^(1-p) u), divergent exactly for p >= 0).
Dichotomy classify_dichotomy(const ThresholdFamily& family);

/// Declared tail behaviour z(u) ~ a u^(-s) (log u)^(-q) of a nonincreasing
/// integrand; `declared` false means only the raw function is known.
struct TailModel {
  std::function<double(double)> z;
  bool declared = false;
  double amplitude = 0.0;
  double u_exponent = 1.0;    // s
  double log_exponent = 0.0;  // q

  static TailModel canonical(double a, double q);
  static TailModel constant(double c);
  static TailModel from_family(const ThresholdFamily& family);
  static TailModel function_only(std::function<double(double)> z);
};

struct IfReport {
  enum class Verdict { kFinite, kDivergent, kInconclusive };
  Verdict verdict = Verdict::kInconclusive;
  double numeric_part = 0.0;    // quadrature over [T, u_max]
  double tail_remainder = 0.0;  // analytic remainder beyond u_max (finite case)
  double value = 0.0;           // numeric_part + tail_remainder (finite case)
  double u_exponent = 0.0;      // declared growth exponents, when available
  double log_exponent = 0.0;
};

/// Numeric integral of z over [T, u_max] plus the analytic verdict from the
/// declared exponents. Without declared behaviour the verdict is inconclusive.
IfReport integral_If(const TailModel& model, double T, double u_max);

struct EtaQuery {
  double z = 0.0;
  std::optional<double> crossing;  // first crossing time >= z, if any <= T
};

struct CrossingRecord {
  double window_start = 0.0;
  double horizon = 0.0;
  std::optional<double> xi;            // last crossing time <= horizon
  std::vector<double> crossing_times;  // grid times with X >= f_p, in [a, T]
  std::vector<EtaQuery> eta_queries;
};

CrossingRecord track_crossings(const orderstats::OrderStatPath& path,
                               const ThresholdFamily& family, double a, double T,
                               std::span<const double> eta_queries = {});

struct LilConfig {
  correlation::CorrelationModel model =
      correlation::CorrelationModel::powered_exponential(1.0, 2.0, 1.0);
  int n = 1;
  int r = 1;
  double p = 1.0;
  double horizon = 1e4;
  double scan_start = 2.718281828459045;
  double theta = 0.1;  // mesh = theta * f_p(horizon)^(-2/alpha)
  long runs = 50;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::optional<double> pickands_h;
};

struct LilRun {
  double normalized_running_max = 0.0;  // sup_{[T/2,T]} X / sqrt((2/rhat) log t)
  long crossing_windows = 0;            // unit windows in [a, T] with a crossing
  long crossings = 0;                   // grid crossings in [a, T]
  std::optional<double> xi;
  std::optional<double> max_gap;    // longest crossing-free stretch in [T/2, T]
  std::optional<double> gap_to_hp;  // max_gap / h_p(horizon)
};

struct LilReport {
  double p = 0.0;
  int n = 1, r = 1;
  double alpha = 0.0, c = 0.0;
  double horizon = 0.0, scan_start = 0.0, mesh = 0.0, theta = 0.0;
  long runs = 0;
  std::uint64_t seed = 0;
  std::vector<LilRun> per_run;
  double mean_normalized_max = 0.0;
  double q05_normalized_max = 0.0, q50_normalized_max = 0.0, q95_normalized_max = 0.0;
  double mean_crossing_windows = 0.0;
  double predicted_cumulative_crossings = 0.0;  // integral of z_p over [a, T]
  std::optional<double> hp_at_horizon;
  bool within_validity_band = false;
  // Finite-horizon check against almost-sure limit laws; not a reproduction.
  std::string character = "diagnostic";
};

LilReport lil_experiment(const LilConfig& config);

}  // namespace gpx::lil
