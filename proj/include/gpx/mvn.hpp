#pragma once

// Deterministic multivariate normal rectangle probabilities: closed quadrature
// for the bivariate CDF, recursive conditioning with adaptive Gauss-Kronrod
// for higher dimensions.

#include <Eigen/Core>

namespace gpx::mvn {

/// P(X <= h, Y <= k) for standard bivariate normal with correlation rho.
double bivariate_cdf(double h, double k, double rho);

/// P(lower_i <= X_i <= upper_i) for centered Gaussian X with covariance
/// `sigma` (infinite bounds allowed), to absolute tolerance `tol`.
double rectangle_probability(const Eigen::MatrixXd& sigma,
                             const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, double tol = 1e-8);

}  // namespace gpx::mvn
