#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bmot/conic/solver.hpp"
#include "bmot/measure.hpp"

namespace bmot {

/// Regular tensor grid over the box [lo, hi].
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> counts;  // per axis, each >= 2

  std::size_t dim() const { return counts.size(); }
  std::size_t size() const;
  std::vector<double> nodes() const;  // row-major, size() * dim()
  void validate() const;

  /// Smallest box holding both supports and every x + y - barycentre, `count`
  /// nodes per axis. The LP on such a grid is always feasible.
  static GridSpec covering(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t count);
  /// Same box, 2(count - 1) + 1 nodes per axis; the old nodes are kept.
  GridSpec refined() const;
};

constexpr std::size_t kMaxOracleVariables = 200000;
constexpr std::size_t kMaxExactMotPairs = 1000;

struct GridDominanceResult {
  DiscreteMeasure rho;
  double cost = 0.0;
};

using CostFunction = std::function<double(std::span<const double>)>;

/// Three-plan LP over supp(mu) x supp(nu) x grid. Its cost bounds the
/// dominance infimum from above. Throws InputError when the grid misses a
/// support point, exceeds kMaxOracleVariables, or the LP is infeasible.
GridDominanceResult grid_dominance_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      const CostFunction& f, const GridSpec& grid,
                                      const conic::Settings& settings = {});

struct ExactMotResult {
  double cost = 0.0;
  std::vector<double> gamma;  // n_mu x n_nu
};

/// min sum c_ij gamma_ij over martingale couplings of (mu, nu). Small
/// instances only (n_mu * n_nu <= kMaxExactMotPairs).
ExactMotResult exact_mot_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            const std::vector<double>& cost, const conic::Settings& settings = {});

}  // namespace bmot
