#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bmot {

/// Finitely supported probability measure on R^d.
///
/// Construction normalizes the input: zero-weight atoms are dropped, atoms
/// closer than `merge_radius()` are fused into their mass-weighted mean, and
/// weights whose total is within 1e-6 of one are rescaled to sum to one.
/// Instances are immutable afterwards.
class DiscreteMeasure {
 public:
  static constexpr double kRenormalizeTolerance = 1e-6;
  static constexpr double kSumTolerance = 1e-12;
  static constexpr double kRelativeMergeRadius = 1e-9;

  /// `coords` holds the atoms row-major, `weights.size() * dim` entries.
  DiscreteMeasure(std::size_t dim, std::vector<double> weights, std::vector<double> coords);

  static DiscreteMeasure dirac(std::vector<double> point);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& coords() const { return coords_; }

  /// Largest pairwise distance between atoms.
  double diameter() const;

 private:
  std::size_t dim_;
  std::vector<double> weights_;
  std::vector<double> coords_;
};

std::vector<double> barycentre(const DiscreteMeasure& m);

/// sum_i w_i |x_i|^p
double moment(const DiscreteMeasure& m, double p);

/// Variance around the barycentre, m_2(m) - |[m]|^2.
double variance(const DiscreteMeasure& m);

/// Translates every atom by b - [m].
DiscreteMeasure recentre(const DiscreteMeasure& m, std::span<const double> b);

/// Largest distance between any atom of `a` or `b` and any other.
double joint_diameter(const DiscreteMeasure& a, const DiscreteMeasure& b);

double distance(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

}  // namespace bmot
