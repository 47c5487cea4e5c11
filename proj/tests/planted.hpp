#pragma once

#include <cmath>
#include <vector>

#include "bmot/conic/program.hpp"
#include "generators.hpp"

namespace bmot::testing {

using conic::ConeBlock;
using conic::ConeKind;
using conic::ConeSlice;
using conic::ConicProgram;
using conic::Triplet;

inline ConicProgram make(std::size_t n, std::vector<double> c, std::size_t m, std::vector<Triplet> a,
                  std::vector<double> b, std::vector<ConeSlice> cones) {
  ConicProgram p;
  p.nvars = n;
  p.objective = std::move(c);
  p.equalities.resize(static_cast<int>(m), static_cast<int>(n));
  p.equalities.setFromTriplets(a.begin(), a.end());
  p.rhs = std::move(b);
  p.cones = std::move(cones);
  return p;
}

struct Planted {
  ConicProgram program;
  double optimum = 0.0;
};

// Random program with a planted complementary primal-dual pair: x in K,
// s in K*, x's = 0, b = Ax, c = A'y + s. Then c'x = b'y is optimal.
// With strict set, blocks where x = 0 get s inside K*; otherwise s sits on the
// boundary there and the pair is not strictly complementary.
inline Planted plant(Rng& rng, const std::vector<ConeBlock>& blocks, std::size_t m, bool strict = true) {
  std::size_t n = 0;
  std::vector<ConeSlice> cones;
  for (const ConeBlock& b : blocks) {
    cones.push_back({b, n});
    n += b.size;
  }
  std::vector<double> x(n, 0.0), s(n, 0.0);
  for (const ConeSlice& sl : cones) {
    const std::size_t o = sl.offset;
    const ConeBlock& b = sl.block;
    const bool active = uniform(rng, 0, 1) < 0.6;
    switch (b.kind) {
      case ConeKind::Nonnegative:
        for (std::size_t k = 0; k < b.size; ++k) {
          if (uniform(rng, 0, 1) < 0.5) {
            x[o + k] = uniform(rng, 0.1, 2);
          } else {
            s[o + k] = uniform(rng, 0.1, 2);
          }
        }
        break;
      case ConeKind::SecondOrder: {
        auto v = random_vector(rng, b.size - 1, 1.0);
        double nv = 0.0;
        for (double t : v) nv += t * t;
        nv = std::sqrt(nv);
        const double tx = active ? uniform(rng, 0.2, 2) : 0.0;
        const double ts = uniform(rng, 0.2, 2);
        const double shrink = !active && strict ? 0.5 : 1.0;
        x[o] = tx;
        s[o] = ts;
        for (std::size_t k = 1; k < b.size; ++k) {
          x[o + k] = tx * v[k - 1] / nv;
          s[o + k] = -shrink * ts * v[k - 1] / nv;
        }
        break;
      }
      case ConeKind::Power: {
        const double al = b.alpha;
        const double a0 = uniform(rng, 0.2, 2);
        const double b0 = uniform(rng, 0.2, 2);
        const double f0 = std::pow(a0, al) * std::pow(b0, 1 - al);
        auto v = random_vector(rng, b.size - 2, 1.0);
        double nv = 0.0;
        for (double t : v) nv += t * t;
        nv = std::sqrt(nv);
        const double lam = uniform(rng, 0.2, 2);
        const double scale = active ? 1.0 : 0.0;
        const double shrink = !active && strict ? 0.5 : 1.0;
        x[o] = scale * a0;
        x[o + 1] = scale * b0;
        s[o] = lam * al * f0 / a0;
        s[o + 1] = lam * (1 - al) * f0 / b0;
        for (std::size_t k = 2; k < b.size; ++k) {
          x[o + k] = scale * f0 * v[k - 2] / nv;
          s[o + k] = -shrink * lam * v[k - 2] / nv;
        }
        break;
      }
      case ConeKind::Zero:
        for (std::size_t k = 0; k < b.size; ++k) s[o + k] = uniform(rng, -1, 1);
        break;
    }
  }
  std::vector<Triplet> trip;
  std::vector<std::vector<double>> dense(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (uniform(rng, 0, 1) < 0.5) {
        dense[i][j] = uniform(rng, -1, 1);
        trip.emplace_back(static_cast<int>(i), static_cast<int>(j), dense[i][j]);
      }
    }
  }
  const auto y = random_vector(rng, m, 1.0);
  std::vector<double> b(m, 0.0), c(s);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      b[i] += dense[i][j] * x[j];
      c[j] += dense[i][j] * y[i];
    }
  }
  double opt = 0.0;
  for (std::size_t j = 0; j < n; ++j) opt += c[j] * x[j];
  return {make(n, c, m, trip, b, cones), opt};
}

}  // namespace bmot::testing
