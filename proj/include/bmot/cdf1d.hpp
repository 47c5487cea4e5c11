#pragma once

#include <vector>

#include "bmot/measure.hpp"

namespace bmot {

/// Convex piecewise-linear function on R.
///
/// `slopes[0]` applies on (-inf, breakpoints[0]), `slopes[k]` on
/// (breakpoints[k-1], breakpoints[k]) and the last slope on the right ray.
/// `anchor_value` is the value at `breakpoints[0]`.
struct PiecewiseLinearConvex {
  std::vector<double> breakpoints;
  std::vector<double> slopes;
  double anchor_value = 0.0;

  double operator()(double x) const;
  /// Slope on the open piece containing `x` (right slope at a breakpoint).
  double slope_at(double x) const;
};

/// G(x) = sum_i w_i (x - x_i)_+ for a one-dimensional measure.
PiecewiseLinearConvex g_potential(const DiscreteMeasure& m);

/// Pointwise maximum of two convex piecewise-linear functions. Crossing points
/// become new breakpoints; on pieces where both coincide the first argument's
/// slope is kept.
PiecewiseLinearConvex pointwise_max(const PiecewiseLinearConvex& f1,
                                    const PiecewiseLinearConvex& f2);

/// m1 <=_c m2 for one-dimensional measures with equal barycentres.
bool convex_order_1d(const DiscreteMeasure& m1, const DiscreteMeasure& m2);

/// Least upper bound in convex order: the second derivative of max(G_m1, G_m2).
DiscreteMeasure lub_1d(const DiscreteMeasure& m1, const DiscreteMeasure& m2);

}  // namespace bmot
