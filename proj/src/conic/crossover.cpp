#include "crossover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bmot::conic::detail {
namespace {

using Vec = Eigen::VectorXd;

constexpr Eigen::Index kMaxRows = 600;
constexpr double kMaxDense = 4e6;
constexpr int kMaxPivots = 20000;
constexpr int kDegenerateRun = 20;

double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

void column(const SparseMatrix& A, Eigen::Index j, Vec& out) {
  out.setZero(A.rows());
  for (SparseMatrix::InnerIterator it(A, j); it; ++it) out[it.row()] = it.value();
}

// Basis ids below n are columns of A; id n + r is the unit column of row r,
// an artificial held at zero.
bool simplex(const SparseMatrix& A, const Vec& b, const Vec& c, const std::vector<char>& kind,
             std::vector<Eigen::Index>& basis, Vec& xB, Vec& y) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  const double tol = 1e-12 * (1.0 + inf_norm(c));
  std::vector<char> in_basis(static_cast<std::size_t>(n), 0);
  for (Eigen::Index id : basis) if (id < n) in_basis[static_cast<std::size_t>(id)] = 1;
  Eigen::MatrixXd B(m, m);
  Vec a(m);
  int degenerate = 0;
  for (int pivot = 0; pivot < kMaxPivots; ++pivot) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const Eigen::Index id = basis[static_cast<std::size_t>(k)];
      if (id < n) {
        column(A, id, a);
        B.col(k) = a;
      } else {
        B.col(k).setZero();
        B(id - n, k) = 1.0;
      }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    xB = lu.solve(b);
    Vec cB(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const Eigen::Index id = basis[static_cast<std::size_t>(k)];
      cB[k] = id < n ? c[id] : 0.0;
      if (id >= n || kind[static_cast<std::size_t>(id)] == kNonnegCol) {
        if (xB[k] < -1e-9 * (1.0 + inf_norm(b))) return false;
        if (id >= n && std::abs(xB[k]) > 1e-9 * (1.0 + inf_norm(b))) return false;
      }
    }
    y = lu.transpose().solve(cB);
    if (!y.allFinite() || !xB.allFinite()) return false;
    const Vec d = c - A.transpose() * y;

    Eigen::Index enter = -1;
    double dir = 1.0;
    double best = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const char k = kind[static_cast<std::size_t>(j)];
      if (in_basis[static_cast<std::size_t>(j)] || k == kZeroCol) continue;
      double gain = -d[j];
      if (k == kFreeCol) gain = std::abs(d[j]);
      if (gain <= tol) continue;
      if (degenerate >= kDegenerateRun) {  // Bland
        enter = j;
        dir = d[j] < 0.0 ? 1.0 : -1.0;
        break;
      }
      if (gain > best) {
        best = gain;
        enter = j;
        dir = d[j] < 0.0 ? 1.0 : -1.0;
      }
    }
    if (enter < 0) return true;

    column(A, enter, a);
    const Vec dB = lu.solve(a) * dir;
    const double piv = 1e-9 * std::max(1.0, inf_norm(dB));
    Eigen::Index leave = -1;
    double step = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < m; ++k) {
      const Eigen::Index id = basis[static_cast<std::size_t>(k)];
      double t;
      if (id >= n) {
        if (std::abs(dB[k]) <= piv) continue;
        t = 0.0;
      } else if (kind[static_cast<std::size_t>(id)] == kNonnegCol) {
        if (dB[k] <= piv) continue;
        t = std::max(xB[k], 0.0) / dB[k];
      } else {
        continue;
      }
      const bool better = t < step ||
                          (t == step && (degenerate >= kDegenerateRun
                                             ? id < basis[static_cast<std::size_t>(leave)]
                                             : std::abs(dB[k]) > std::abs(dB[leave])));
      if (better) {
        step = t;
        leave = k;
      }
    }
    if (leave < 0) return false;  // unbounded direction
    degenerate = step == 0.0 ? degenerate + 1 : 0;
    const Eigen::Index out = basis[static_cast<std::size_t>(leave)];
    if (out < n) in_basis[static_cast<std::size_t>(out)] = 0;
    basis[static_cast<std::size_t>(leave)] = enter;
    in_basis[static_cast<std::size_t>(enter)] = 1;
  }
  return false;
}

}  // namespace

bool nnls(const Eigen::MatrixXd& A, const Vec& b, const std::vector<char>& is_free, Vec& x,
          std::vector<Eigen::Index>& passive) {
  const Eigen::Index n = A.cols();
  x = Vec::Zero(n);
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  const double tol = 1e-12 * (1.0 + A.cwiseAbs().maxCoeff()) * (1.0 + inf_norm(b));
  auto members = [&] {
    std::vector<Eigen::Index> p;
    for (Eigen::Index j = 0; j < n; ++j) if (in[static_cast<std::size_t>(j)]) p.push_back(j);
    return p;
  };
  auto lstsq = [&](const std::vector<Eigen::Index>& p) {
    Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(p.size()));
    for (std::size_t q = 0; q < p.size(); ++q) Ap.col(static_cast<Eigen::Index>(q)) = A.col(p[q]);
    return Vec(Ap.colPivHouseholderQr().solve(b));
  };
  bool any_free = false;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (is_free[static_cast<std::size_t>(j)]) in[static_cast<std::size_t>(j)] = any_free = true;
  }
  if (any_free) {
    const auto p = members();
    const Vec z = lstsq(p);
    for (std::size_t q = 0; q < p.size(); ++q) x[p[q]] = z[static_cast<Eigen::Index>(q)];
  }
  std::vector<char> blocked(static_cast<std::size_t>(n), 0);
  for (Eigen::Index outer = 0; outer < 3 * n + 10; ++outer) {
    const Vec w = A.transpose() * (b - A * x);
    Eigen::Index pick = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (in[u] || blocked[u] || w[j] <= tol) continue;
      if (pick < 0 || w[j] > w[pick]) pick = j;
    }
    if (pick < 0) break;
    in[static_cast<std::size_t>(pick)] = 1;
    bool first = true;
    for (int inner = 0; inner < static_cast<int>(n) + 10; ++inner) {
      const auto p = members();
      const Vec z = lstsq(p);
      double alpha = 1.0;
      bool clipped = false;
      for (std::size_t q = 0; q < p.size(); ++q) {
        const double zq = z[static_cast<Eigen::Index>(q)];
        if (is_free[static_cast<std::size_t>(p[q])] || zq > 0.0) continue;
        if (first && p[q] == pick) break;
        const double xq = x[p[q]];
        alpha = std::min(alpha, xq / (xq - zq));
        clipped = true;
      }
      if (first) {
        // the new column would enter at a nonpositive value: skip it
        const auto it = std::find(p.begin(), p.end(), pick);
        if (z[static_cast<Eigen::Index>(it - p.begin())] <= 0.0) {
          in[static_cast<std::size_t>(pick)] = 0;
          blocked[static_cast<std::size_t>(pick)] = 1;
          break;
        }
        first = false;
      }
      if (!clipped) {
        for (std::size_t q = 0; q < p.size(); ++q) x[p[q]] = z[static_cast<Eigen::Index>(q)];
        std::fill(blocked.begin(), blocked.end(), 0);
        break;
      }
      for (std::size_t q = 0; q < p.size(); ++q) {
        x[p[q]] += alpha * (z[static_cast<Eigen::Index>(q)] - x[p[q]]);
        const auto u = static_cast<std::size_t>(p[q]);
        if (!is_free[u] && x[p[q]] <= tol) {
          x[p[q]] = 0.0;
          in[u] = 0;
        }
      }
    }
  }
  passive = members();
  return x.allFinite();
}


bool crossover(const SparseMatrix& A, const Vec& b, const Vec& c, const std::vector<char>& kind,
               const Vec& s_hint, Vec& x, Vec& y) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (m > kMaxRows || m == 0) return false;
  const double scale = std::max(1.0, inf_norm(c));
  std::size_t last_size = 0;
  const double all = std::numeric_limits<double>::infinity();
  for (double theta : {1e-7, 1e-6, 1e-5, 1e-4, 1e-3, all}) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j) {
      const char k = kind[static_cast<std::size_t>(j)];
      if (k == kFreeCol || (k == kNonnegCol && s_hint[j] <= theta * scale)) cols.push_back(j);
    }
    if (cols.size() == last_size) continue;
    last_size = cols.size();
    if (static_cast<double>(cols.size()) * static_cast<double>(m) > kMaxDense) return false;

    const auto ns = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd As(m, ns);
    Vec a(m);
    std::vector<char> is_free(cols.size());
    for (Eigen::Index q = 0; q < ns; ++q) {
      column(A, cols[static_cast<std::size_t>(q)], a);
      As.col(q) = a;
      is_free[static_cast<std::size_t>(q)] = kind[static_cast<std::size_t>(cols[static_cast<std::size_t>(q)])] == kFreeCol;
    }
    Vec xs;
    std::vector<Eigen::Index> passive;
    if (!nnls(As, b, is_free, xs, passive)) continue;
    if (inf_norm(As * xs - b) > 1e-11 * (1.0 + inf_norm(b))) continue;

    // basis: independent passive columns, completed with artificials
    std::vector<Eigen::Index> basis;
    Eigen::MatrixXd Q(m, m);
    Eigen::Index rank = 0;
    auto try_add = [&](const Vec& v) {
      Vec r = v;
      for (int pass = 0; pass < 2; ++pass) r -= Q.leftCols(rank) * (Q.leftCols(rank).transpose() * r);
      const double nr = r.norm();
      if (nr <= 1e-9 * std::max(1.0, v.norm())) return false;
      Q.col(rank++) = r / nr;
      return true;
    };
    bool vertex = true;
    for (Eigen::Index q : passive) {
      if (try_add(As.col(q))) {
        basis.push_back(cols[static_cast<std::size_t>(q)]);
      } else if (xs[q] != 0.0) {
        vertex = false;
        break;
      }
    }
    if (!vertex) continue;
    for (Eigen::Index r = 0; r < m && rank < m; ++r) {
      if (try_add(Vec::Unit(m, r))) basis.push_back(n + r);
    }
    if (rank < m) continue;

    Vec xB;
    if (!simplex(A, b, c, kind, basis, xB, y)) continue;
    x = Vec::Zero(n);
    for (Eigen::Index k = 0; k < m; ++k) {
      const Eigen::Index id = basis[static_cast<std::size_t>(k)];
      if (id < n) x[id] = xB[k];
    }
    return true;
  }
  return false;
}

}  // namespace bmot::conic::detail
