#pragma once

// Numerical stress-testing of the normal-comparison inequality for order
// statistics: exact orthant probabilities on small instances, the comparison
// bound, and batch calibration of the unspecified constant.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gpx::berman {

/// Two covariance structures shared across the n independent copies, plus
/// positive thresholds.
struct ComparisonInstance {
  int d = 1;
  int n = 1;
  int r = 1;
  Eigen::MatrixXd sigma0;
  Eigen::MatrixXd sigma1;
  Eigen::VectorXd u;

  int rhat() const { return n - r + 1; }
};

/// Throws std::invalid_argument unless both matrices are symmetric PSD with
/// unit diagonal, all thresholds are positive and rho_ij < 1 off-diagonal.
void validate(const ComparisonInstance& instance);

enum class OrthantMode { kAuto, kExact, kQmc };

/// Integrand variant of the comparison integral A_ij: the inequality's
/// statement uses (1 + |h|)^((n-r)/2); its displayed proof-side definition
/// uses (1 + |h|)^(2(n-r)). Both are exposed; the statement is the default.
enum class AExponent { kStatement, kProofVariant };

struct OrthantResult {
  double probability = 0.0;
  double error = 0.0;  // reported accuracy (quadrature tol or QMC spread)
  bool exact = false;
};

/// P(for all i: r-th order statistic at coordinate i <= u_i) under sigma0
/// (`which` = 0) or sigma1 (`which` = 1). Exact pattern expansion over
/// Gaussian rectangles for d * n <= 7, lattice-rule Monte Carlo above.
OrthantResult orderstat_orthant(const ComparisonInstance& instance, int which,
                                OrthantMode mode = OrthantMode::kAuto,
                                double tol = 1e-8, long qmc_points = 16384,
                                int qmc_shifts = 8, std::uint64_t qmc_seed = 17);

/// A_ij^(r) = int_{sigma0_ij}^{sigma1_ij} (1+|h|)^e (1-h^2)^(-rhat/2) dh.
double a_integral(double sigma0, double sigma1, int n, int r,
                  AExponent exponent = AExponent::kStatement);

/// Right-hand side of the comparison inequality without its constant:
/// sum_{i<j} (u_i+u_j)^-(n-r) (A_ij)^+ exp(-rhat (u_i^2+u_j^2) / (2 (1+rho_ij))).
double berman_bound(const ComparisonInstance& instance,
                    AExponent exponent = AExponent::kStatement);

struct CheckReport {
  double p0 = 0.0;
  double p1 = 0.0;
  double lhs_diff = 0.0;  // p0 - p1
  double bound = 0.0;
  std::optional<double> ratio;  // (lhs_diff)^+ / bound when bound > 0
  bool bound_zero_no_control = false;  // bound = 0 with positive lhs within tol
  bool violation = false;              // bound = 0 with lhs_diff > 1e-8
};

CheckReport check_instance(const ComparisonInstance& instance,
                           AExponent exponent = AExponent::kStatement,
                           OrthantMode mode = OrthantMode::kAuto);

/// Deterministic randomized instance (unit-diagonal PSD correlations with
/// |off-diagonal| <= 0.9, thresholds in [0.5, 3]).
ComparisonInstance random_instance(int d, int n, int r, std::uint64_t seed,
                                   std::uint64_t index);

struct BatchEntry {
  long instance_id = 0;
  ComparisonInstance instance;
  CheckReport report;
};

struct CalibrationResult {
  int n = 1, r = 1;
  double c_hat = 0.0;  // max ratio over the calibration set
  std::vector<BatchEntry> entries;
};

/// Fits C_hat(n, r) = max ratio over `count` random instances with d drawn
/// from {2..d_max}.
CalibrationResult calibrate_constant(int d_max, int n, int r, int count,
                                     std::uint64_t seed, unsigned threads = 1);

/// Verifies held-out instances against a fitted constant; returns the ids of
/// violating instances (ratio > c_hat).
std::vector<long> holdout_violations(const CalibrationResult& fit, int d_max,
                                     int count, std::uint64_t seed,
                                     unsigned threads = 1);

// JSON (single or array of instances) and CSV batch persistence.
std::vector<ComparisonInstance> load_instances_json(const std::string& path);
void write_batch_csv(const std::vector<BatchEntry>& entries, const std::string& path);

}  // namespace gpx::berman
