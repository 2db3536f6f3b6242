#pragma once

// Closed-form tail asymptotics for suprema of order-statistics processes and
// Monte Carlo estimation of classical and generalized Pickands constants.

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

namespace gpx::extremes {

/// Upper tail Psi(u) = 1 - Phi(u) of the standard normal law.
double normal_tail(double u);

/// Standard normal CDF.
double normal_cdf(double u);

/// Standard normal density.
double normal_pdf(double u);

/// Exact binomial coefficient for small arguments.
double binomial(int n, int k);

/// C^(1/alpha) * binom(n, r_hat) * H * u^(2/alpha) * Psi(u)^r_hat with
/// r_hat = n - r + 1. Throws std::domain_error for u <= 0.
double tail_asymptotic(double u, int n, int r, double alpha, double c, double h);

/// Known closed forms: H_1 = 1 (Brownian case); for alpha = 2 and k
/// independent copies, H_{2,k} = k / sqrt(pi) (Rice upcrossing rate).
std::optional<double> pickands_closed_form(double alpha, int k);

/// Measure of a union of lower-left orthants under the density
/// exp(w_1 + ... + w_k); exact incremental sweep for k <= 2.
class OrthantUnion {
 public:
  explicit OrthantUnion(int k);

  /// Adds the orthant with the given corner (length k).
  void insert(const double* corner);

  double measure() const { return measure_; }

 private:
  int k_;
  double measure_ = 0.0;
  double best_ = -std::numeric_limits<double>::infinity();  // k = 1
  // k = 2: Pareto frontier a -> b (a ascending, b descending).
  std::map<double, double> frontier_;
};

enum class PickandsMethod {
  kAuto,       // exact sweep for k <= 2, importance sampling otherwise
  kExactSweep, // k <= 2 only
  kImportance
};

struct PickandsEstimate {
  double alpha = 0.0;
  int k = 1;
  double T = 0.0;
  double theta = 0.0;
  double value = 0.0;          // estimate of H(T)/T, mesh-extrapolated
  double ci_half_width = 0.0;  // 95% CI
  long replicates = 0;
  double value_fine = 0.0;     // raw estimate at mesh theta
  double value_coarse = 0.0;   // raw estimate at mesh 2*theta
};

struct PickandsConfig {
  double alpha = 1.0;
  int k = 1;
  std::vector<double> horizons;  // ladder of T values, ascending
  double theta = 0.05;           // fBm mesh
  long replicates = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  PickandsMethod method = PickandsMethod::kAuto;
  long is_samples = 128;     // w-samples per replicate when k >= 3
  bool mesh_extrapolate = true;
};

/// Coupled ladder of estimates of H_{alpha,k}(T)/T over config.horizons; one
/// simulation pass serves every T, so the ladder is pathwise nondecreasing
/// in T before division by T.
std::vector<PickandsEstimate> pickands_ladder(const PickandsConfig& config);

/// Single-T convenience wrapper.
PickandsEstimate pickands_estimate(double alpha, int k, double T, double theta,
                                   long replicates, std::uint64_t seed,
                                   unsigned threads = 1,
                                   PickandsMethod method = PickandsMethod::kAuto);

/// Cross-check estimator that averages the per-replicate w-integral itself
/// (exponentially heavy-tailed in T; usable only for small horizons).
std::vector<PickandsEstimate> pickands_ladder_direct(const PickandsConfig& config);

struct Extrapolation {
  double intercept = 0.0;  // estimate of H_{alpha,k}
  double slope = 0.0;      // finite-T correction coefficient
  double intercept_ci = 0.0;
  Eigen::ArrayXd residuals;
};

/// Weighted fit of value ~ intercept + slope / T over >= 3 ladder points
/// sharing (alpha, k, theta).
Extrapolation pickands_extrapolate(const std::vector<PickandsEstimate>& ladder);

/// Monte Carlo tail estimate paired with its closed-form asymptotic value.
struct TailEstimate {
  double u = 0.0;
  double p_hat = 0.0;
  double se = 0.0;
  long replicates = 0;
  double theta = 0.0;
  double mesh = 0.0;
  double asymptotic_value = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double p_hat_half = 0.0;   // coupled estimate at mesh/2
  bool mesh_stable = false;  // |p_hat - p_hat_half| <= 2 se
  bool below_resolution = false;
};

}  // namespace gpx::extremes
