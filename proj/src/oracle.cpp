#include "bmot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bmot/error.hpp"

namespace bmot {

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (std::size_t c : counts) n *= c;
  return n;
}

void GridSpec::validate() const {
  if (counts.empty()) throw InputError("grid has no axes");
  if (lo.size() != counts.size() || hi.size() != counts.size()) {
    throw InputError("grid box and counts disagree in dimension");
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < 2) throw InputError("grid needs at least 2 nodes per axis");
    if (!(lo[k] <= hi[k])) throw InputError("grid box is empty");
  }
}

std::vector<double> GridSpec::nodes() const {
  validate();
  const std::size_t d = dim();
  const std::size_t n = size();
  std::vector<double> out(n * d);
  for (std::size_t g = 0; g < n; ++g) {
    std::size_t rem = g;
    // last axis varies fastest
    for (std::size_t k = d; k-- > 0;) {
      const std::size_t idx = rem % counts[k];
      rem /= counts[k];
      out[g * d + k] = lo[k] + (hi[k] - lo[k]) * static_cast<double>(idx) /
                                   static_cast<double>(counts[k] - 1);
    }
  }
  return out;
}

GridSpec GridSpec::covering(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            std::size_t count) {
  if (mu.dim() != nu.dim()) throw InputError("measures have different dimensions");
  const std::size_t d = mu.dim();
  GridSpec g{std::vector<double>(d, INFINITY), std::vector<double>(d, -INFINITY),
             std::vector<std::size_t>(d, count)};
  auto grow = [&](std::size_t k, double v) {
    g.lo[k] = std::min(g.lo[k], v);
    g.hi[k] = std::max(g.hi[k], v);
  };
  for (const DiscreteMeasure* m : {&mu, &nu}) {
    for (std::size_t i = 0; i < m->size(); ++i) {
      for (std::size_t k = 0; k < d; ++k) grow(k, m->point(i)[k]);
    }
  }
  // x + y - b for every pair: the product coupling with these conditional
  // means is feasible, which a box tight around the supports need not allow
  const std::vector<double> b = barycentre(mu);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      for (std::size_t k = 0; k < d; ++k) grow(k, mu.point(i)[k] + nu.point(j)[k] - b[k]);
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    if (!(g.hi[k] > g.lo[k])) {
      g.lo[k] -= 1.0;
      g.hi[k] += 1.0;
    }
  }
  return g;
}

GridSpec GridSpec::refined() const {
  GridSpec g = *this;
  for (std::size_t& c : g.counts) c = 2 * (c - 1) + 1;
  return g;
}

namespace {

conic::SolveReport solve_lp(conic::ConicProgram& prog, std::vector<conic::Triplet>& trip,
                            std::size_t rows, const conic::Settings& settings) {
  prog.equalities.resize(static_cast<int>(rows), static_cast<int>(prog.nvars));
  prog.equalities.setFromTriplets(trip.begin(), trip.end());
  prog.cones.push_back({conic::ConeBlock::nonnegative(prog.nvars), 0});
  return conic::solve(prog, settings);
}

}  // namespace

GridDominanceResult grid_dominance_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      const CostFunction& f, const GridSpec& grid,
                                      const conic::Settings& settings) {
  if (mu.dim() != nu.dim() || grid.dim() != mu.dim()) {
    throw InputError("measures and grid have different dimensions");
  }
  grid.validate();
  const std::size_t d = mu.dim();
  for (const DiscreteMeasure* m : {&mu, &nu}) {
    for (std::size_t i = 0; i < m->size(); ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        const double x = m->point(i)[k];
        const double slack = 1e-12 * (1.0 + std::abs(grid.hi[k] - grid.lo[k]));
        if (x < grid.lo[k] - slack || x > grid.hi[k] + slack) {
          throw InputError("grid box does not contain the supports");
        }
      }
    }
  }
  const std::size_t nm = mu.size();
  const std::size_t nn = nu.size();
  const std::size_t ng = grid.size();
  if (nm * nn * ng > kMaxOracleVariables) {
    throw InputError("oracle LP would have " + std::to_string(nm * nn * ng) +
                     " variables, above the cap of " + std::to_string(kMaxOracleVariables));
  }
  const std::vector<double> z = grid.nodes();
  std::vector<double> fz(ng);
  for (std::size_t g = 0; g < ng; ++g) fz[g] = f({z.data() + g * d, d});

  conic::ConicProgram prog;
  prog.nvars = nm * nn * ng;
  prog.objective.resize(prog.nvars);
  const std::size_t row_nu = nm;
  const std::size_t row_mx = nm + nn;
  const std::size_t row_my = row_mx + nm * d;
  const std::size_t rows = row_my + nn * d;
  prog.rhs.assign(rows, 0.0);
  for (std::size_t i = 0; i < nm; ++i) prog.rhs[i] = mu.weight(i);
  for (std::size_t j = 0; j < nn; ++j) prog.rhs[row_nu + j] = nu.weight(j);
  std::vector<conic::Triplet> trip;
  trip.reserve(prog.nvars * (2 + 2 * d));
  for (std::size_t i = 0; i < nm; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      for (std::size_t g = 0; g < ng; ++g) {
        const std::size_t v = (i * nn + j) * ng + g;
        const int col = static_cast<int>(v);
        prog.objective[v] = fz[g];
        trip.emplace_back(static_cast<int>(i), col, 1.0);
        trip.emplace_back(static_cast<int>(row_nu + j), col, 1.0);
        for (std::size_t k = 0; k < d; ++k) {
          const double zx = z[g * d + k] - mu.point(i)[k];
          const double zy = z[g * d + k] - nu.point(j)[k];
          if (zx != 0.0) trip.emplace_back(static_cast<int>(row_mx + i * d + k), col, zx);
          if (zy != 0.0) trip.emplace_back(static_cast<int>(row_my + j * d + k), col, zy);
        }
      }
    }
  }
  const conic::SolveReport r = solve_lp(prog, trip, rows, settings);
  if (r.status == conic::SolveStatus::Infeasible) {
    throw InputError("grid dominance LP is infeasible on this grid");
  }
  if (r.status != conic::SolveStatus::Optimal) {
    throw SolverError("grid dominance LP ended with " + conic::summary(r));
  }
  std::vector<double> mass(ng, 0.0);
  double cost = 0.0;
  for (std::size_t v = 0; v < prog.nvars; ++v) {
    const double w = std::max(r.x[v], 0.0);
    mass[v % ng] += w;
    cost += fz[v % ng] * w;
  }
  std::vector<double> w;
  std::vector<double> pts;
  double total = 0.0;
  for (std::size_t g = 0; g < ng; ++g) {
    if (mass[g] > 1e-9) {
      w.push_back(mass[g]);
      total += mass[g];
      pts.insert(pts.end(), z.begin() + static_cast<long>(g * d),
                 z.begin() + static_cast<long>((g + 1) * d));
    }
  }
  for (double& v : w) v /= total;
  return {DiscreteMeasure(d, std::move(w), std::move(pts)), cost};
}

ExactMotResult exact_mot_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            const std::vector<double>& cost, const conic::Settings& settings) {
  if (mu.dim() != nu.dim()) throw InputError("measures have different dimensions");
  const std::size_t nm = mu.size();
  const std::size_t nn = nu.size();
  const std::size_t d = mu.dim();
  if (nm * nn > kMaxExactMotPairs) throw InputError("exact MOT oracle is limited to 1000 pairs");
  if (cost.size() != nm * nn) throw InputError("cost matrix must be n_mu x n_nu");

  conic::ConicProgram prog;
  prog.nvars = nm * nn;
  prog.objective = cost;
  const std::size_t rows = nm + nn + nm * d;
  prog.rhs.assign(rows, 0.0);
  for (std::size_t i = 0; i < nm; ++i) prog.rhs[i] = mu.weight(i);
  for (std::size_t j = 0; j < nn; ++j) prog.rhs[nm + j] = nu.weight(j);
  std::vector<conic::Triplet> trip;
  for (std::size_t i = 0; i < nm; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      const int col = static_cast<int>(i * nn + j);
      trip.emplace_back(static_cast<int>(i), col, 1.0);
      trip.emplace_back(static_cast<int>(nm + j), col, 1.0);
      for (std::size_t k = 0; k < d; ++k) {
        const double step = nu.point(j)[k] - mu.point(i)[k];
        if (step != 0.0) trip.emplace_back(static_cast<int>(nm + nn + i * d + k), col, step);
      }
    }
  }
  const conic::SolveReport r = solve_lp(prog, trip, rows, settings);
  if (r.status == conic::SolveStatus::Infeasible) {
    throw InputError("no martingale coupling exists (mu is not dominated by nu)");
  }
  if (r.status != conic::SolveStatus::Optimal) {
    throw SolverError("exact MOT LP ended with " + conic::summary(r));
  }
  ExactMotResult out;
  out.gamma.resize(prog.nvars);
  for (std::size_t v = 0; v < prog.nvars; ++v) {
    out.gamma[v] = std::max(r.x[v], 0.0);
    out.cost += cost[v] * out.gamma[v];
  }
  return out;
}

}  // namespace bmot
