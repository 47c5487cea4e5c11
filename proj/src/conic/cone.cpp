#include "bmot/conic/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>

#include "bmot/error.hpp"

namespace bmot::conic {
namespace {

constexpr int kPowerMaxIterations = 200;
constexpr double kPowerResidual = 1e-14;

double weighted_geomean(double a, double b, double alpha) {
  if (a <= 0.0 || b <= 0.0) return 0.0;
  if (alpha == 0.5) return std::sqrt(a * b);
  return std::exp(alpha * std::log(a) + (1.0 - alpha) * std::log(b));
}

// Stationary coordinate of the projection for a given tail radius r:
// 0.5 * (c0 + sqrt(c0^2 + 4 w r (r0 - r))), written to avoid cancellation.
double leg(double c0, double w, double r, double r0) {
  const double delta = 4.0 * w * r * (r0 - r);
  const double root = std::sqrt(c0 * c0 + delta);
  if (c0 >= 0.0) return 0.5 * (c0 + root);
  return root - c0 > 0.0 ? 0.5 * delta / (root - c0) : 0.0;
}

// Projection of (a0, b0, r0), r0 > 0, onto the 3D power cone with scalar tail.
bool project_power3(double& a, double& b, double& r, double alpha) {
  const double a0 = a;
  const double b0 = b;
  const double r0 = r;
  if (a0 >= 0.0 && b0 >= 0.0 && weighted_geomean(a0, b0, alpha) >= r0) return true;
  if (a0 <= 0.0 && b0 <= 0.0) {
    const double polar = weighted_geomean(-a0, -b0, alpha);
    const double factor = std::pow(alpha, alpha) * std::pow(1.0 - alpha, 1.0 - alpha);
    if (polar >= r0 * factor) {
      a = b = r = 0.0;
      return true;
    }
  }
  if (r0 == 0.0) {
    a = std::max(a0, 0.0);
    b = std::max(b0, 0.0);
    return true;
  }

  const double beta = 1.0 - alpha;
  const double tol = kPowerResidual * std::max(1.0, r0);
  double lo = 0.0;
  double hi = r0;
  double t = 0.5 * r0;
  double x = 0.0;
  double y = 0.0;
  for (int it = 0; it < kPowerMaxIterations; ++it) {
    x = leg(a0, alpha, t, r0);
    y = leg(b0, beta, t, r0);
    const double g = weighted_geomean(x, y, alpha);
    const double phi = g - t;
    if (std::abs(phi) <= tol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * r0) {
      a = x;
      b = y;
      r = std::min(t, g);  // land inside, not a root-finder tolerance outside
      return true;
    }
    if (phi > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    double next = 0.5 * (lo + hi);
    if (x > 0.0 && y > 0.0) {
      const double dx = alpha * (r0 - 2.0 * t) / (2.0 * x - a0);
      const double dy = beta * (r0 - 2.0 * t) / (2.0 * y - b0);
      const double dphi = g * (alpha * dx / x + beta * dy / y) - 1.0;
      if (dphi != 0.0 && std::isfinite(dphi)) {
        const double newton = t - phi / dphi;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    t = next;
  }
  return false;
}

}  // namespace

ConeBlock ConeBlock::zero(std::size_t n) { return {ConeKind::Zero, n, 0.5}; }
ConeBlock ConeBlock::nonnegative(std::size_t n) { return {ConeKind::Nonnegative, n, 0.5}; }
ConeBlock ConeBlock::second_order(std::size_t n) { return {ConeKind::SecondOrder, n, 0.5}; }
ConeBlock ConeBlock::power(double alpha, std::size_t n) { return {ConeKind::Power, n, alpha}; }

void ConeBlock::validate() const {
  if (size == 0) throw InputError("cone block of size 0");
  if (kind == ConeKind::Power) {
    if (size < 3) throw InputError("power cone needs at least 3 entries");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("power cone alpha must lie in (0,1)");
  }
}

std::string ConeBlock::describe() const {
  switch (kind) {
    case ConeKind::Zero: return "zero " + std::to_string(size);
    case ConeKind::Nonnegative: return "nonneg " + std::to_string(size);
    case ConeKind::SecondOrder: return "soc " + std::to_string(size);
    case ConeKind::Power: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "power %zu %.17g", size, alpha);
      return buf;
    }
  }
  return "?";
}

bool project_in_place(std::span<double> p, const ConeBlock& block) {
  switch (block.kind) {
    case ConeKind::Zero:
      std::fill(p.begin(), p.end(), 0.0);
      return true;
    case ConeKind::Nonnegative:
      for (double& v : p) v = std::max(v, 0.0);
      return true;
    case ConeKind::SecondOrder: {
      const double t = p[0];
      double nv = 0.0;
      for (std::size_t k = 1; k < p.size(); ++k) nv += p[k] * p[k];
      nv = std::sqrt(nv);
      if (nv <= t) return true;
      if (nv <= -t) {
        std::fill(p.begin(), p.end(), 0.0);
        return true;
      }
      const double s = 0.5 * (t + nv);
      p[0] = s;
      for (std::size_t k = 1; k < p.size(); ++k) p[k] *= s / nv;
      return true;
    }
    case ConeKind::Power: {
      double nv = 0.0;
      for (std::size_t k = 2; k < p.size(); ++k) nv += p[k] * p[k];
      nv = std::sqrt(nv);
      double a = p[0];
      double b = p[1];
      double r = nv;
      if (!project_power3(a, b, r, block.alpha)) return false;
      p[0] = a;
      p[1] = b;
      if (nv > 0.0) {
        const double s = r / nv;
        for (std::size_t k = 2; k < p.size(); ++k) p[k] *= s;
      } else {
        for (std::size_t k = 2; k < p.size(); ++k) p[k] = 0.0;
      }
      return true;
    }
  }
  return false;
}

bool project_dual_in_place(std::span<double> p, const ConeBlock& block) {
  switch (block.kind) {
    case ConeKind::Zero:
      return true;  // dual of {0} is the whole space
    case ConeKind::Nonnegative:
    case ConeKind::SecondOrder:
      return project_in_place(p, block);
    case ConeKind::Power: {
      // Moreau: P_{K*}(w) = w + P_K(-w)
      std::vector<double> neg(p.begin(), p.end());
      for (double& v : neg) v = -v;
      if (!project_in_place(neg, block)) return false;
      for (std::size_t k = 0; k < p.size(); ++k) p[k] += neg[k];
      return true;
    }
  }
  return false;
}

std::vector<double> project_cone(std::span<const double> point, const ConeBlock& block) {
  block.validate();
  if (point.size() != block.size) throw InputError("point size does not match cone block");
  std::vector<double> out(point.begin(), point.end());
  if (!project_in_place(out, block)) throw SolverError("power cone projection did not converge");
  return out;
}

std::vector<double> project_dual_cone(std::span<const double> point, const ConeBlock& block) {
  block.validate();
  if (point.size() != block.size) throw InputError("point size does not match cone block");
  std::vector<double> out(point.begin(), point.end());
  if (!project_dual_in_place(out, block)) {
    throw SolverError("power cone projection did not converge");
  }
  return out;
}

bool in_cone(std::span<const double> p, const ConeBlock& block, double tol) {
  switch (block.kind) {
    case ConeKind::Zero:
      return std::all_of(p.begin(), p.end(), [&](double v) { return std::abs(v) <= tol; });
    case ConeKind::Nonnegative:
      return std::all_of(p.begin(), p.end(), [&](double v) { return v >= -tol; });
    case ConeKind::SecondOrder: {
      double nv = 0.0;
      for (std::size_t k = 1; k < p.size(); ++k) nv += p[k] * p[k];
      return std::sqrt(nv) <= p[0] + tol;
    }
    case ConeKind::Power: {
      if (p[0] < -tol || p[1] < -tol) return false;
      double nv = 0.0;
      for (std::size_t k = 2; k < p.size(); ++k) nv += p[k] * p[k];
      return std::sqrt(nv) <=
             weighted_geomean(std::max(p[0], 0.0), std::max(p[1], 0.0), block.alpha) + tol;
    }
  }
  return false;
}

bool in_dual_cone(std::span<const double> p, const ConeBlock& block, double tol) {
  switch (block.kind) {
    case ConeKind::Zero:
      return true;
    case ConeKind::Nonnegative:
    case ConeKind::SecondOrder:
      return in_cone(p, block, tol);
    case ConeKind::Power: {
      // K* = {(u, v, w) : (u/alpha)^alpha (v/(1-alpha))^(1-alpha) >= |w|}
      if (p[0] < -tol || p[1] < -tol) return false;
      double nv = 0.0;
      for (std::size_t k = 2; k < p.size(); ++k) nv += p[k] * p[k];
      const double u = std::max(p[0], 0.0) / block.alpha;
      const double v = std::max(p[1], 0.0) / (1.0 - block.alpha);
      return std::sqrt(nv) <= weighted_geomean(u, v, block.alpha) + tol;
    }
  }
  return false;
}

}  // namespace bmot::conic
