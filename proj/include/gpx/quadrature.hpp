#pragma once

// Adaptive Gauss-Kronrod (G7, K15) integration on finite intervals.

#include <cmath>
#include <stdexcept>

namespace gpx::quadrature {

namespace detail {

// K15 abscissae/weights on [-1, 1]; even indices embed the G7 rule.
inline constexpr double kNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double kWeightsK[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double kWeightsG[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

template <typename F>
void gk15(const F& f, double a, double b, double& value, double& error) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double k = 0.0, g = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double y = f(c + h * kNodes[i]);
    k += kWeightsK[i] * y;
    if (i % 2 == 1) g += kWeightsG[i / 2] * y;
  }
  value = k * h;
  error = std::abs((k - g) * h);
  // the customary conservative sharpening of the G-K error estimate
  const double scale = std::abs(k) * h;
  if (scale > 0.0 && error > 0.0)
    error = scale * std::min(1.0, std::pow(200.0 * error / scale, 1.5));
}

}  // namespace detail

/// Integrates f over [a, b] to absolute tolerance `tol` by bisection-adaptive
/// Gauss-Kronrod; throws std::runtime_error if the interval budget runs out.
template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-10,
                 int max_depth = 48) {
  if (!(a < b)) return 0.0;
  struct Segment {
    double a, b, value, error;
    int depth;
  };
  double value, error;
  detail::gk15(f, a, b, value, error);
  if (error <= tol) return value;
  // explicit stack of the worst segments
  Segment stack[2048];
  int top = 0;
  stack[top++] = {a, b, value, error, 0};
  double total = value, total_err = error;
  while (top > 0 && total_err > tol) {
    // split the segment with the largest error
    int worst = 0;
    for (int i = 1; i < top; ++i)
      if (stack[i].error > stack[worst].error) worst = i;
    Segment seg = stack[worst];
    stack[worst] = stack[--top];
    if (seg.depth >= max_depth || top + 2 > 2000)
      throw std::runtime_error("quadrature: failed to reach tolerance");
    const double mid = 0.5 * (seg.a + seg.b);
    Segment left{seg.a, mid, 0, 0, seg.depth + 1};
    Segment right{mid, seg.b, 0, 0, seg.depth + 1};
    detail::gk15(f, left.a, left.b, left.value, left.error);
    detail::gk15(f, right.a, right.b, right.value, right.error);
    total += left.value + right.value - seg.value;
    total_err += left.error + right.error - seg.error;
    stack[top++] = left;
    stack[top++] = right;
  }
  return total;
}

}  // namespace gpx::quadrature
