#pragma once

#include <cmath>
#include <stdexcept>

namespace gpx {

/// Uniform ambient grid t_j = t0 + j * mesh, j = 0..count-1.
struct GridSpec {
  double t0 = 0.0;
  double horizon = 1.0;
  double mesh = 0.1;

  GridSpec() = default;
  GridSpec(double t0_, double horizon_, double mesh_)
      : t0(t0_), horizon(horizon_), mesh(mesh_) {
    if (mesh <= 0.0) throw std::invalid_argument("GridSpec: mesh must be positive");
    if (horizon <= 0.0) throw std::invalid_argument("GridSpec: horizon must be positive");
    if (count() < 2) throw std::invalid_argument("GridSpec: grid needs >= 2 points");
  }

  long count() const {
    // tolerate horizons assembled as levels * mesh, where the quotient can
    // land a few ulps under the integer
    const double q = horizon / mesh;
    return static_cast<long>(std::floor(q * (1.0 + 1e-12) + 1e-12)) + 1;
  }
  double time_at(long j) const { return t0 + static_cast<double>(j) * mesh; }
  double t_end() const { return time_at(count() - 1); }
};

/// Level-adapted grid on [0, 1]: spacing q = theta * u^(-2/alpha),
/// points v * q for v = 0..L with L = floor(1/q).
struct PickandsGrid {
  double u = 1.0;
  double alpha = 1.0;
  double theta = 0.1;
  double q = 0.0;
  long levels = 0;  // L

  PickandsGrid(double u_, double alpha_, double theta_)
      : u(u_), alpha(alpha_), theta(theta_) {
    if (alpha <= 0.0 || alpha > 2.0)
      throw std::invalid_argument("PickandsGrid: alpha must be in (0, 2]");
    if (theta <= 0.0) throw std::invalid_argument("PickandsGrid: theta must be positive");
    if (u <= 0.0) throw std::invalid_argument("PickandsGrid: level u must be positive");
    q = theta * std::pow(u, -2.0 / alpha);
    levels = static_cast<long>(std::floor(1.0 / q));
  }
};

}  // namespace gpx
