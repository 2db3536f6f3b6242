#pragma once

// Stationary correlation models r(t) with a prescribed local expansion
//   1 - r(t) ~ C |t|^alpha  as t -> 0,  alpha in (0, 2],
// and polynomial-rate decay |r(t)| = O(t^-lambda) at infinity.

#include <Eigen/Core>
#include <string>
#include <vector>

namespace gpx::correlation {

enum class Family { kPoweredExponential, kCauchy, kTabulated };

/// Immutable parametric correlation model. Safe to copy and share.
class CorrelationModel {
 public:
  /// Defaults to powered-exponential with C = alpha = lambda = 1.
  CorrelationModel() = default;

  /// r(t) = exp(-C |t|^alpha).
  static CorrelationModel powered_exponential(double c, double alpha, double lambda);

  /// r(t) = (1 + c_prime |t|^alpha)^-gamma; local scale C = gamma * c_prime,
  /// decay exponent alpha * gamma. `declared_c` overrides the local scale the
  /// validation ops check against (deliberate mismatches included).
  static CorrelationModel cauchy(double c_prime, double alpha, double gamma,
                                 double declared_c = 0.0);

  /// Piecewise-linear interpolant of (t, r) pairs; t strictly increasing from
  /// 0 with r(0) = 1. `c`, `alpha`, `lambda` are the *declared* local/decay
  /// parameters the validation ops check against.
  static CorrelationModel tabulated(std::vector<double> t, std::vector<double> r,
                                    double c, double alpha, double lambda);

  /// Loads a two-column CSV "t,r" (with header) into a tabulated model.
  static CorrelationModel tabulated_from_csv(const std::string& path, double c,
                                             double alpha, double lambda);

  double operator()(double t) const { return evaluate(t); }
  double evaluate(double t) const;

  Family family() const { return family_; }
  double c() const { return c_; }
  double alpha() const { return alpha_; }
  double lambda() const { return lambda_; }
  double gamma() const { return gamma_; }

 private:
  Family family_ = Family::kPoweredExponential;
  double c_ = 1.0;       // local scale C
  double alpha_ = 1.0;   // local exponent
  double lambda_ = 1.0;  // declared decay exponent
  double c_prime_ = 1.0; // cauchy scale
  double gamma_ = 1.0;   // cauchy decay power
  std::vector<double> tab_t_;
  std::vector<double> tab_r_;
};

struct LocalValidationReport {
  Eigen::ArrayXd t;       // probe lags, decreasing toward 0
  Eigen::ArrayXd ratio;   // (1 - r(t)) / (C t^alpha)
  double final_ratio = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct DecayValidationReport {
  Eigen::ArrayXd t;          // log-spaced probe lags
  Eigen::ArrayXd statistic;  // |r(t)| * t^lambda
  double sup = 0.0;
  double sup_at = 0.0;
  bool monotone_tail = false;  // nonincreasing over the last half of probes
  bool bounded = false;        // sup not attained at the right edge
};

/// Checks the local expansion on a strictly decreasing positive lag sequence;
/// passes iff the final ratio is within `tol` of 1.
LocalValidationReport validate_local(const CorrelationModel& model,
                                     const Eigen::ArrayXd& t_sequence,
                                     double tol = 1e-2);

/// Samples |r(t)| t^lambda on `n_points` log-spaced lags in [t_max/1e4, t_max].
/// A bounded-sample check, not a proof.
DecayValidationReport validate_decay(const CorrelationModel& model, double lambda,
                                     double t_max, int n_points = 200);

}  // namespace gpx::correlation
