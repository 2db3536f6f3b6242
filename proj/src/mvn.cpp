#include "gpx/mvn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gpx/extremes.hpp"
#include "gpx/quadrature.hpp"

namespace gpx::mvn {

namespace {

constexpr double kCut = 8.5;  // integration window in standard deviations

// P(X >= h, Y >= k): Drezner-Wesolowsky identity
//   Phi_bar(h) Phi_bar(k) + (1/2pi) int_0^{asin rho}
//     exp(-(h^2 - 2 h k sin t + k^2) / (2 cos^2 t)) dt.
double bvnu(double h, double k, double rho) {
  using extremes::normal_tail;
  if (rho == 0.0) return normal_tail(h) * normal_tail(k);
  const double base = normal_tail(h) * normal_tail(k);
  const double limit = std::asin(std::clamp(rho, -1.0, 1.0));
  const double integral = quadrature::integrate(
      [h, k](double t) {
        const double s = std::sin(t), c2 = std::cos(t) * std::cos(t);
        return std::exp(-(h * h - 2.0 * h * k * s + k * k) / (2.0 * c2));
      },
      std::min(0.0, limit), std::max(0.0, limit), 5e-16);
  const double sign = limit >= 0.0 ? 1.0 : -1.0;
  return base + sign * integral / (2.0 * std::numbers::pi);
}

struct ConditioningChain {
  // level l integrates x_l; remaining dims are conditioned on it
  std::vector<double> sd;                // conditional sd of x_l
  std::vector<Eigen::VectorXd> beta;     // regression of the rest on x_l
  std::vector<Eigen::MatrixXd> sigma;    // conditional covariance at level l
};

double leaf_probability(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper) {
  if (lower.size() == 1) {
    const double sd = std::sqrt(sigma(0, 0));
    return extremes::normal_cdf(upper[0] / sd) - extremes::normal_cdf(lower[0] / sd);
  }
  const double s0 = std::sqrt(sigma(0, 0)), s1 = std::sqrt(sigma(1, 1));
  const double rho = sigma(0, 1) / (s0 * s1);
  const double a0 = lower[0] / s0, b0 = upper[0] / s0;
  const double a1 = lower[1] / s1, b1 = upper[1] / s1;
  // inclusion-exclusion over the four corners
  return bivariate_cdf(b0, b1, rho) - bivariate_cdf(a0, b1, rho) -
         bivariate_cdf(b0, a1, rho) + bivariate_cdf(a0, a1, rho);
}

}  // namespace

double bivariate_cdf(double h, double k, double rho) {
  if (!(rho > -1.0 - 1e-12 && rho < 1.0 + 1e-12))
    throw std::domain_error("bivariate_cdf: |rho| must not exceed 1");
  rho = std::clamp(rho, -1.0, 1.0);
  // past ten sigmas the mass is < 1e-23, far below any tolerance in use;
  // clamping also keeps infinite rectangle bounds out of the integrand
  h = std::clamp(h, -10.0, 10.0);
  k = std::clamp(k, -10.0, 10.0);
  if (rho == 1.0) return extremes::normal_cdf(std::min(h, k));
  if (rho == -1.0) {
    const double p = extremes::normal_cdf(h) - extremes::normal_tail(k);
    return std::max(0.0, p);
  }
  return bvnu(-h, -k, rho);
}

double rectangle_probability(const Eigen::MatrixXd& sigma,
                             const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, double tol) {
  const Eigen::Index d = sigma.rows();
  if (sigma.cols() != d || lower.size() != d || upper.size() != d)
    throw std::invalid_argument("rectangle_probability: dimension mismatch");
  for (Eigen::Index i = 0; i < d; ++i)
    if (lower[i] > upper[i]) return 0.0;

  // Degenerate (near-zero variance) coordinates resolve to point constraints.
  for (Eigen::Index i = 0; i < d; ++i) {
    if (sigma(i, i) > 1e-14) continue;
    if (lower[i] > 1e-7 || upper[i] < -1e-7) return 0.0;
    // drop coordinate i
    if (d == 1) return 1.0;
    Eigen::MatrixXd s2(d - 1, d - 1);
    Eigen::VectorXd lo2(d - 1), up2(d - 1);
    Eigen::Index a = 0;
    for (Eigen::Index p = 0; p < d; ++p) {
      if (p == i) continue;
      lo2[a] = lower[p];
      up2[a] = upper[p];
      Eigen::Index b = 0;
      for (Eigen::Index q = 0; q < d; ++q) {
        if (q == i) continue;
        s2(a, b++) = sigma(p, q);
      }
      ++a;
    }
    return rectangle_probability(s2, lo2, up2, tol);
  }

  if (d <= 2) return leaf_probability(sigma, lower, upper);

  ConditioningChain chain;
  Eigen::MatrixXd cur = sigma;
  while (cur.rows() > 2) {
    const Eigen::Index m = cur.rows();
    const double var = cur(0, 0);
    const Eigen::VectorXd cov = cur.block(1, 0, m - 1, 1);
    chain.sd.push_back(std::sqrt(var));
    chain.beta.push_back(cov / var);
    chain.sigma.push_back(cur);
    cur = (cur.block(1, 1, m - 1, m - 1) - cov * cov.transpose() / var).eval();
  }
  chain.sigma.push_back(cur);
  chain.sd.push_back(0.0);
  chain.beta.emplace_back();

  // Reuse the chain: level l's sigma entry is only read at the leaf, so the
  // stored matrices are the successive conditional covariances.
  struct Runner {
    const ConditioningChain& chain;
    double tol;
    double run(std::size_t level, Eigen::VectorXd lo, Eigen::VectorXd up) const {
      if (lo.size() <= 2) return leaf_probability(chain.sigma[level], lo, up);
      const double sd = chain.sd[level];
      const double a = std::max(lo[0] / sd, -kCut);
      const double b = std::min(up[0] / sd, kCut);
      if (!(a < b)) return 0.0;
      const Eigen::VectorXd rest_lo = lo.tail(lo.size() - 1);
      const Eigen::VectorXd rest_up = up.tail(up.size() - 1);
      const Eigen::VectorXd& beta = chain.beta[level];
      auto integrand = [&](double s) {
        const Eigen::VectorXd shift = beta * (s * sd);
        return extremes::normal_pdf(s) *
               run(level + 1, rest_lo - shift, rest_up - shift);
      };
      return quadrature::integrate(integrand, a, b, tol);
    }
  };
  return Runner{chain, tol}.run(0, lower, upper);
}

}  // namespace gpx::mvn
