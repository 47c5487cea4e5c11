#include "bmot/cdf1d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bmot/error.hpp"

namespace bmot {
namespace {

constexpr double kOrderSlack = 1e-12;
constexpr double kBarycentreTolerance = 1e-10;
constexpr double kMinJump = 1e-13;

void require_1d(const DiscreteMeasure& m) {
  if (m.dim() != 1) throw InputError("one-dimensional measure required");
}

void require_same_barycentre(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const double ba = barycentre(a)[0];
  const double bb = barycentre(b)[0];
  if (std::abs(ba - bb) > kBarycentreTolerance * (1.0 + std::abs(ba))) {
    throw InputError("barycentres differ");
  }
}

std::vector<double> merged_breakpoints(const PiecewiseLinearConvex& f1,
                                       const PiecewiseLinearConvex& f2) {
  std::vector<double> pts;
  pts.reserve(f1.breakpoints.size() + f2.breakpoints.size());
  std::merge(f1.breakpoints.begin(), f1.breakpoints.end(), f2.breakpoints.begin(),
             f2.breakpoints.end(), std::back_inserter(pts));
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

double PiecewiseLinearConvex::operator()(double x) const {
  if (breakpoints.empty()) return anchor_value + slopes.front() * x;
  if (x <= breakpoints.front()) {
    return anchor_value + slopes.front() * (x - breakpoints.front());
  }
  double value = anchor_value;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (x <= breakpoints[k + 1]) return value + slopes[k + 1] * (x - breakpoints[k]);
    value += slopes[k + 1] * (breakpoints[k + 1] - breakpoints[k]);
  }
  return value + slopes.back() * (x - breakpoints.back());
}

double PiecewiseLinearConvex::slope_at(double x) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return slopes[static_cast<std::size_t>(it - breakpoints.begin())];
}

PiecewiseLinearConvex g_potential(const DiscreteMeasure& m) {
  require_1d(m);
  std::vector<std::size_t> order(m.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return m.point(a)[0] < m.point(b)[0]; });
  PiecewiseLinearConvex g;
  g.slopes.push_back(0.0);
  for (std::size_t i : order) {
    const double x = m.point(i)[0];
    if (!g.breakpoints.empty() && g.breakpoints.back() == x) {
      g.slopes.back() += m.weight(i);
    } else {
      g.breakpoints.push_back(x);
      g.slopes.push_back(g.slopes.back() + m.weight(i));
    }
  }
  g.anchor_value = 0.0;
  return g;
}

PiecewiseLinearConvex pointwise_max(const PiecewiseLinearConvex& f1,
                                    const PiecewiseLinearConvex& f2) {
  std::vector<double> pts = merged_breakpoints(f1, f2);
  if (pts.empty()) {
    // two affine functions; only the slopes at -inf/+inf matter here
    PiecewiseLinearConvex out = f1(0.0) >= f2(0.0) ? f1 : f2;
    return out;
  }

  double scale = 1.0;
  for (double p : pts) scale = std::max(scale, std::abs(f1(p)) + std::abs(f2(p)));
  const double tie = 1e-14 * scale;
  auto diff = [&](double t) { return f1(t) - f2(t); };

  std::vector<double> crossings;
  // left ray
  {
    const double d0 = diff(pts.front());
    const double ds = f1.slopes.front() - f2.slopes.front();
    if (std::abs(d0) > tie && ds != 0.0 && d0 / ds > 0.0) {
      crossings.push_back(pts.front() - d0 / ds);
    }
  }
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k];
    const double b = pts[k + 1];
    const double da = diff(a);
    const double db = diff(b);
    if ((da > tie && db < -tie) || (da < -tie && db > tie)) {
      const double t = a + da / (da - db) * (b - a);
      if (t > a && t < b) crossings.push_back(t);
    }
  }
  // right ray
  {
    const double d0 = diff(pts.back());
    const double ds = f1.slopes.back() - f2.slopes.back();
    if (std::abs(d0) > tie && ds != 0.0 && d0 / ds < 0.0) {
      crossings.push_back(pts.back() - d0 / ds);
    }
  }
  if (!crossings.empty()) {
    pts.insert(pts.end(), crossings.begin(), crossings.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  }

  // On every piece one function dominates; copy its slope.
  auto dominant_slope = [&](double probe) {
    const double d = diff(probe);
    return d >= -tie ? f1.slope_at(probe) : f2.slope_at(probe);
  };
  PiecewiseLinearConvex g;
  g.breakpoints = pts;
  g.slopes.reserve(pts.size() + 1);
  g.slopes.push_back(dominant_slope(pts.front() - 1.0));
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    g.slopes.push_back(dominant_slope(0.5 * (pts[k] + pts[k + 1])));
  }
  g.slopes.push_back(dominant_slope(pts.back() + 1.0));
  g.anchor_value = std::max(f1(pts.front()), f2(pts.front()));
  return g;
}

bool convex_order_1d(const DiscreteMeasure& m1, const DiscreteMeasure& m2) {
  require_1d(m1);
  require_1d(m2);
  require_same_barycentre(m1, m2);
  const auto g1 = g_potential(m1);
  const auto g2 = g_potential(m2);
  for (double t : merged_breakpoints(g1, g2)) {
    if (g1(t) > g2(t) + kOrderSlack) return false;
  }
  return true;
}

DiscreteMeasure lub_1d(const DiscreteMeasure& m1, const DiscreteMeasure& m2) {
  require_1d(m1);
  require_1d(m2);
  require_same_barycentre(m1, m2);
  const auto g = pointwise_max(g_potential(m1), g_potential(m2));
  std::vector<double> weights;
  std::vector<double> coords;
  for (std::size_t k = 0; k < g.breakpoints.size(); ++k) {
    const double jump = g.slopes[k + 1] - g.slopes[k];
    if (jump < kMinJump) continue;
    weights.push_back(jump);
    coords.push_back(g.breakpoints[k]);
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  return DiscreteMeasure(1, std::move(weights), std::move(coords));
}

}  // namespace bmot
