#include "bmot/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bmot/error.hpp"

namespace bmot {
namespace {

double pairwise_diameter(std::size_t dim, const std::vector<double>& coords) {
  const std::size_t n = dim == 0 ? 0 : coords.size() / dim;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double t = coords[i * dim + k] - coords[j * dim + k];
        s += t * t;
      }
      best = std::max(best, s);
    }
  }
  return std::sqrt(best);
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::size_t dim, std::vector<double> weights,
                                 std::vector<double> coords)
    : dim_(dim) {
  if (dim == 0) throw InputError("measure dimension must be positive");
  if (coords.size() != weights.size() * dim) {
    throw InputError("coordinate count " + std::to_string(coords.size()) +
                     " does not match " + std::to_string(weights.size()) + " atoms of dim " +
                     std::to_string(dim));
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw InputError("non-finite weight");
    if (w < 0.0) throw InputError("negative weight");
  }
  for (double x : coords) {
    if (!std::isfinite(x)) throw InputError("non-finite coordinate");
  }

  // drop zero-weight atoms
  std::vector<std::size_t> keep;
  keep.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) keep.push_back(i);
  }
  if (keep.empty()) throw InputError("measure has no atom with positive weight");

  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > kRenormalizeTolerance) {
    throw InputError("weights sum to " + std::to_string(total) + ", expected 1");
  }

  std::vector<double> kept_coords;
  kept_coords.reserve(keep.size() * dim);
  for (std::size_t i : keep) {
    kept_coords.insert(kept_coords.end(), coords.begin() + i * dim,
                       coords.begin() + (i + 1) * dim);
  }
  const double radius = kRelativeMergeRadius * (1.0 + pairwise_diameter(dim, kept_coords));

  // Sweep along the first coordinate; an atom joins the first earlier cluster
  // whose representative lies within the merge radius.
  std::vector<std::size_t> order(keep.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return kept_coords[a * dim] < kept_coords[b * dim];
  });
  std::vector<std::size_t> cluster_of(keep.size(), keep.size());
  std::size_t window_start = 0;
  bool merged_any = false;
  for (std::size_t p = 0; p < order.size(); ++p) {
    const std::size_t a = order[p];
    const double xa = kept_coords[a * dim];
    while (window_start < p && xa - kept_coords[order[window_start] * dim] > radius) {
      ++window_start;
    }
    for (std::size_t r = window_start; r < p; ++r) {
      const std::size_t b = order[r];
      if (cluster_of[b] != b) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double t = kept_coords[a * dim + k] - kept_coords[b * dim + k];
        s += t * t;
      }
      if (std::sqrt(s) <= radius) {
        cluster_of[a] = b;
        merged_any = true;
        break;
      }
    }
    if (cluster_of[a] == keep.size()) cluster_of[a] = a;
  }

  if (!merged_any) {
    weights_.reserve(keep.size());
    for (std::size_t i : keep) weights_.push_back(weights[i]);
    coords_ = std::move(kept_coords);
  } else {
    // Emit clusters in order of their head's original position.
    std::vector<std::size_t> slot(keep.size(), keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a) {
      if (cluster_of[a] == a) {
        slot[a] = weights_.size();
        weights_.push_back(0.0);
        coords_.insert(coords_.end(), dim, 0.0);
      }
    }
    for (std::size_t a = 0; a < keep.size(); ++a) {
      const std::size_t s = slot[cluster_of[a]];
      const double w = weights[keep[a]];
      weights_[s] += w;
      for (std::size_t k = 0; k < dim; ++k) coords_[s * dim + k] += w * kept_coords[a * dim + k];
    }
    for (std::size_t s = 0; s < weights_.size(); ++s) {
      for (std::size_t k = 0; k < dim; ++k) coords_[s * dim + k] /= weights_[s];
    }
  }

  // Leave exactly-summing inputs untouched so that I/O round-trips bit for bit.
  if (std::abs(total - 1.0) > kSumTolerance) {
    for (double& w : weights_) w /= total;
  }
}

DiscreteMeasure DiscreteMeasure::dirac(std::vector<double> point) {
  const std::size_t d = point.size();
  return DiscreteMeasure(d, {1.0}, std::move(point));
}

double DiscreteMeasure::diameter() const { return pairwise_diameter(dim_, coords_); }

std::vector<double> barycentre(const DiscreteMeasure& m) {
  std::vector<double> b(m.dim(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto x = m.point(i);
    for (std::size_t k = 0; k < m.dim(); ++k) b[k] += m.weight(i) * x[k];
  }
  return b;
}

double moment(const DiscreteMeasure& m, double p) {
  if (!(p >= 1.0)) throw InputError("moment order must be >= 1");
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double r2 = squared_norm(m.point(i));
    s += m.weight(i) * (p == 2.0 ? r2 : std::pow(std::sqrt(r2), p));
  }
  return s;
}

double variance(const DiscreteMeasure& m) {
  const auto b = barycentre(m);
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto x = m.point(i);
    double r2 = 0.0;
    for (std::size_t k = 0; k < m.dim(); ++k) r2 += (x[k] - b[k]) * (x[k] - b[k]);
    s += m.weight(i) * r2;
  }
  return s;
}

DiscreteMeasure recentre(const DiscreteMeasure& m, std::span<const double> b) {
  if (b.size() != m.dim()) throw InputError("recentre target has wrong dimension");
  const auto current = barycentre(m);
  std::vector<double> shift(m.dim());
  double largest = 0.0;
  double scale = 1.0;
  for (std::size_t k = 0; k < m.dim(); ++k) {
    shift[k] = b[k] - current[k];
    largest = std::max(largest, std::abs(shift[k]));
    scale = std::max(scale, std::abs(b[k]));
  }
  for (double x : m.coords()) scale = std::max(scale, std::abs(x));
  // already centred up to rounding of the barycentre sum
  if (largest <= 1e-13 * scale) return m;
  std::vector<double> coords = m.coords();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t k = 0; k < m.dim(); ++k) coords[i * m.dim() + k] += shift[k];
  }
  return DiscreteMeasure(m.dim(), m.weights(), std::move(coords));
}

double joint_diameter(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  std::vector<double> all = a.coords();
  all.insert(all.end(), b.coords().begin(), b.coords().end());
  return pairwise_diameter(a.dim(), all);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

double squared_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

}  // namespace bmot
