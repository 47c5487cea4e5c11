#include "bmot/conic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "bmot/conic/kernels.hpp"
#include "bmot/error.hpp"
#include "crossover.hpp"

namespace bmot::conic {
namespace {

using Vec = Eigen::VectorXd;

constexpr int kRuizPasses = 25;
constexpr double kMinScale = 1e-4;
constexpr double kMaxScale = 1e4;
constexpr std::size_t kAdaptInterval = 100;
constexpr double kAdaptTrigger = 1.5;
constexpr std::size_t kPolishWait = 100;
constexpr double kPolishStart = 1e-3;

double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Diagonal equilibration D_r A D_c. Column factors are shared inside each
// non-separable cone block so that cone membership is preserved.
struct Scaling {
  Vec row;
  Vec col;
  double primal = 1.0;  // multiplies b
  double dual = 1.0;    // multiplies c
};

Scaling equilibrate(SparseMatrix& A, const std::vector<ConeSlice>& cones, bool enabled) {
  const auto m = A.rows();
  const auto n = A.cols();
  Scaling sc;
  sc.row = Vec::Ones(m);
  sc.col = Vec::Ones(n);
  if (!enabled) return sc;
  for (int pass = 0; pass < kRuizPasses; ++pass) {
    Vec rn = Vec::Zero(m);
    Vec cn = Vec::Zero(n);
    for (int j = 0; j < n; ++j) {
      for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
        const double a = std::abs(it.value());
        rn[it.row()] = std::max(rn[it.row()], a);
        cn[j] = std::max(cn[j], a);
      }
    }
    for (const ConeSlice& s : cones) {
      if (s.block.kind != ConeKind::SecondOrder && s.block.kind != ConeKind::Power) continue;
      double sum = 0.0;
      int count = 0;
      for (std::size_t k = s.offset; k < s.offset + s.block.size; ++k) {
        if (cn[static_cast<int>(k)] > 0.0) {
          sum += cn[static_cast<int>(k)];
          ++count;
        }
      }
      const double shared = count ? sum / count : 0.0;
      for (std::size_t k = s.offset; k < s.offset + s.block.size; ++k) {
        cn[static_cast<int>(k)] = shared;
      }
    }
    Vec dr(m);
    Vec dc(n);
    for (int i = 0; i < m; ++i) dr[i] = rn[i] > 0.0 ? 1.0 / std::sqrt(rn[i]) : 1.0;
    for (int j = 0; j < n; ++j) dc[j] = cn[j] > 0.0 ? 1.0 / std::sqrt(cn[j]) : 1.0;
    for (int i = 0; i < m; ++i) {
      const double next = std::clamp(sc.row[i] * dr[i], kMinScale, kMaxScale);
      dr[i] = next / sc.row[i];
      sc.row[i] = next;
    }
    for (int j = 0; j < n; ++j) {
      const double next = std::clamp(sc.col[j] * dc[j], kMinScale, kMaxScale);
      dc[j] = next / sc.col[j];
      sc.col[j] = next;
    }
    for (int j = 0; j < n; ++j) {
      for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
        it.valueRef() *= dr[it.row()] * dc[j];
      }
    }
  }
  return sc;
}

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double objective = 0.0;
};

class HsdeSolver {
 public:
  HsdeSolver(const ConicProgram& program, const Settings& settings)
      : prog_(program), set_(settings) {
    A_ = program.equalities;
    A_.makeCompressed();
    m_ = A_.rows();
    n_ = A_.cols();
    b_orig_ = Eigen::Map<const Vec>(program.rhs.data(), m_);
    c_orig_ = Eigen::Map<const Vec>(program.objective.data(), n_);

    sc_ = equilibrate(A_, program.cones, settings.scaling);
    b_ = sc_.row.cwiseProduct(b_orig_);
    c_ = sc_.col.cwiseProduct(c_orig_);
    if (settings.scaling) {
      sc_.primal = 1.0 / std::clamp(inf_norm(b_), 1e-3, 1e3);
      sc_.dual = 1.0 / std::clamp(inf_norm(c_), 1e-3, 1e3);
      b_ *= sc_.primal;
      c_ *= sc_.dual;
    }
    At_ = A_.transpose();

    SparseMatrix normal = A_ * At_;
    SparseMatrix eye(m_, m_);
    eye.setIdentity();
    normal += eye;
    llt_.compute(normal);
    if (llt_.info() != Eigen::Success) throw SolverError("factorization of I + AA' failed");

    // g = (I + M)^{-1} h with h = (-b, c)
    solve_linear(-b_, c_, gy_, gx_);
    hg_ = -b_.dot(gy_) + c_.dot(gx_);

    slices_ = program.cones;
    linear_ = std::all_of(slices_.begin(), slices_.end(), [](const ConeSlice& sl) {
      return sl.block.kind == ConeKind::Zero || sl.block.kind == ConeKind::Nonnegative;
    });
    if (linear_) {
      kind_.assign(static_cast<std::size_t>(n_), detail::kFreeCol);
      for (const ConeSlice& sl : slices_) {
        const char k = sl.block.kind == ConeKind::Zero ? detail::kZeroCol : detail::kNonnegCol;
        std::fill(kind_.begin() + static_cast<long>(sl.offset),
                  kind_.begin() + static_cast<long>(sl.offset + sl.block.size), k);
      }
    }
  }

  SolveReport run(const WarmStart* warm) {
    Vec uy = Vec::Zero(m_);
    Vec ux = Vec::Zero(n_);
    double ut = 1.0;
    Vec vx = Vec::Zero(n_);
    double vk = 0.0;
    if (warm != nullptr) initialize(*warm, uy, ux, vx);

    Vec py(m_), px(n_), tuy(m_), tux(n_), zx(n_);
    SolveReport report;
    std::size_t failures = 0;
    const double alpha = set_.relaxation;
    std::size_t last_adapt = 0;
    std::size_t adapt_wait = kAdaptInterval;
    std::size_t next_polish = kPolishWait;
    std::size_t polish_wait = kPolishWait;

    for (std::size_t k = 1; k <= set_.max_iter; ++k) {
      // linear step: (I + Q)^{-1}(u + v)
      solve_linear(uy, ux + vx, py, px);
      const double wt = ut + vk;
      const double tut = (wt - b_.dot(py) + c_.dot(px)) / (1.0 + hg_);
      tuy = py - gy_ * tut;
      tux = px - gx_ * tut;

      // relaxation
      tuy = alpha * tuy + (1.0 - alpha) * uy;
      tux = alpha * tux + (1.0 - alpha) * ux;
      const double rt = alpha * tut + (1.0 - alpha) * ut;

      // cone step
      uy = tuy;
      zx = tux - vx;
      ux = zx;
      failures = project(ux);
      ut = std::max(rt - vk, 0.0);

      // dual step
      vx += ux - tux;
      vk += ut - rt;

      if (failures > 0) {
        report.status = SolveStatus::ProjectionFailure;
        report.iterations = k;
        return report;
      }

      if (k % set_.check_interval == 0 || k == set_.max_iter) {
        report.iterations = k;

        if (ut > 0.0) {
          const Residuals r = evaluate(uy, ux, vx, ut, report);
          if (r.primal <= set_.tol_feas && r.dual <= set_.tol_feas && r.gap <= set_.tol_gap) {
            // a vertex from crossover is exact up to rounding; keep it when it checks out
            if (linear_ && set_.polish) polish(vx / ut, report);
            report.status = SolveStatus::Optimal;
            return report;
          }
          if (linear_ && set_.polish && k >= next_polish &&
              std::max({r.primal, r.dual, r.gap}) <= kPolishStart) {
            next_polish = k + polish_wait;
            polish_wait *= 2;
            if (polish(vx / ut, report)) {
              report.status = SolveStatus::Optimal;
              return report;
            }
            evaluate(uy, ux, vx, ut, report);
          }
          // Balance primal against dual progress by rescaling b. Each rescale
          // moves the fixed point, so the waits grow to let the iterates settle.
          if (set_.adaptive_scaling && k >= last_adapt + adapt_wait) {
            const double ratio = std::sqrt(std::max(r.primal, 1e-16) / std::max(r.dual, 1e-16));
            if (ratio > kAdaptTrigger || ratio < 1.0 / kAdaptTrigger) {
              rescale_primal(std::clamp(ratio, 0.1, 10.0), ux);
              last_adapt = k;
              adapt_wait *= 2;
            }
          }
        }
        if (certify_infeasible(uy, vx)) {
          report.status = SolveStatus::Infeasible;
          return report;
        }
        if (certify_unbounded(ux)) {
          report.status = SolveStatus::Unbounded;
          return report;
        }
      }
    }
    report.status = SolveStatus::MaxIterations;
    if (ut > 0.0) evaluate(uy, ux, vx, ut, report);
    return report;
  }

 private:
  // Linear programs only: finish with a simplex crossover from the iterate.
  bool polish(const Vec& ss, SolveReport& report) const {
    Vec x, y;
    if (!detail::crossover(A_, b_, c_, kind_, ss, x, y)) return false;
    Vec s = c_ - At_ * y;
    for (Eigen::Index j = 0; j < n_; ++j) {
      const char k = kind_[static_cast<std::size_t>(j)];
      if (k == detail::kFreeCol) {
        s[j] = 0.0;
      } else if (k == detail::kZeroCol) {
        x[j] = 0.0;
      } else {
        x[j] = std::max(x[j], 0.0);
        s[j] = std::max(s[j], 0.0);
      }
    }
    SolveReport trial;
    const Residuals r = evaluate(y, x, s, 1.0, trial);
    if (!(r.primal <= set_.tol_feas && r.dual <= set_.tol_feas && r.gap <= set_.tol_gap)) return false;
    trial.iterations = report.iterations;
    report = std::move(trial);
    return true;
  }

  // Multiplies b (hence x) by f; the factorization is unaffected.
  void rescale_primal(double f, Vec& ux) {
    sc_.primal *= f;
    b_ *= f;
    ux *= f;
    solve_linear(-b_, c_, gy_, gx_);
    hg_ = -b_.dot(gy_) + c_.dot(gx_);
  }

  // (I + M) [y; x] = [r1; r2] with M = [0 A; -A' 0]
  void solve_linear(const Vec& r1, const Vec& r2, Vec& y, Vec& x) const {
    y = llt_.solve(r1 - A_ * r2);
    x = r2 + At_ * y;
  }

  std::size_t project(Vec& x) const {
    std::span<double> view(x.data(), static_cast<std::size_t>(x.size()));
    return set_.parallel_projection ? project_blocks_parallel(view, slices_)
                                    : project_blocks_serial(view, slices_);
  }

  void initialize(const WarmStart& warm, Vec& uy, Vec& ux, Vec& vx) const {
    if (warm.x.size() == static_cast<std::size_t>(n_)) {
      for (Eigen::Index j = 0; j < n_; ++j) ux[j] = sc_.primal * warm.x[j] / sc_.col[j];
      project(ux);
    }
    if (warm.y.size() == static_cast<std::size_t>(m_)) {
      for (Eigen::Index i = 0; i < m_; ++i) uy[i] = sc_.dual * warm.y[i] / sc_.row[i];
    }
    // dual slack consistent with y, free entries carry none
    vx = c_ - At_ * uy;
    std::span<double> view(vx.data(), static_cast<std::size_t>(vx.size()));
    std::vector<char> covered(static_cast<std::size_t>(n_), 0);
    for (const ConeSlice& s : slices_) {
      std::fill(covered.begin() + static_cast<long>(s.offset),
                covered.begin() + static_cast<long>(s.offset + s.block.size), 1);
    }
    project_blocks_serial(view, slices_, /*dual=*/true);
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (!covered[static_cast<std::size_t>(j)]) vx[j] = 0.0;
    }
  }

  Residuals evaluate(const Vec& uy, const Vec& ux, const Vec& vx, double tau,
                     SolveReport& report) const {
    const Vec x = sc_.col.cwiseProduct(ux) / (sc_.primal * tau);
    const Vec y = sc_.row.cwiseProduct(uy) / (sc_.dual * tau);
    const Vec s = vx.cwiseQuotient(sc_.col) / (sc_.dual * tau);
    const SparseMatrix& A = prog_.equalities;
    const Vec Ax = A * x;
    const Vec Aty = A.transpose() * y;
    Residuals r;
    r.primal = inf_norm(Ax - b_orig_) / (1.0 + std::max(inf_norm(b_orig_), inf_norm(Ax)));
    r.dual = inf_norm(Aty + s - c_orig_) / (1.0 + std::max(inf_norm(c_orig_), inf_norm(Aty)));
    const double cx = c_orig_.dot(x);
    const double by = b_orig_.dot(y);
    r.gap = std::abs(cx - by) / (1.0 + std::abs(cx) + std::abs(by));
    r.objective = cx;
    report.x.assign(x.data(), x.data() + x.size());
    report.y.assign(y.data(), y.data() + y.size());
    report.s.assign(s.data(), s.data() + s.size());
    report.objective_value = cx;
    report.primal_residual = r.primal;
    report.dual_residual = r.dual;
    report.gap = r.gap;
    return r;
  }

  // y with b'y > 0 and -A'y in K*
  bool certify_infeasible(const Vec& uy, const Vec& vx) const {
    const Vec y = sc_.row.cwiseProduct(uy);
    const double by = b_orig_.dot(y);
    if (!(by > 0.0)) return false;
    const Vec s = vx.cwiseQuotient(sc_.col);
    const Vec r = prog_.equalities.transpose() * y + s;
    return inf_norm(r) / by <= set_.tol_feas;
  }

  // x in K with Ax = 0 and c'x < 0
  bool certify_unbounded(const Vec& ux) const {
    const Vec x = sc_.col.cwiseProduct(ux);
    const double cx = c_orig_.dot(x);
    if (!(cx < 0.0)) return false;
    return inf_norm(prog_.equalities * x) / (-cx) <= set_.tol_feas;
  }

  const ConicProgram& prog_;
  Settings set_;
  SparseMatrix A_;
  SparseMatrix At_;
  Eigen::Index m_ = 0;
  Eigen::Index n_ = 0;
  Vec b_orig_, c_orig_, b_, c_;
  Scaling sc_;
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
  Vec gy_, gx_;
  double hg_ = 0.0;
  std::vector<ConeSlice> slices_;
  bool linear_ = false;
  std::vector<char> kind_;
};

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::ProjectionFailure: return "projection_failure";
  }
  return "unknown";
}

std::string summary(const SolveReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s after %zu iterations (primal %.2g, dual %.2g, gap %.2g)",
                to_string(report.status).c_str(), report.iterations, report.primal_residual,
                report.dual_residual, report.gap);
  return buf;
}

SolveReport solve(const ConicProgram& program, const Settings& settings, const WarmStart* warm) {
  program.validate();
  if (!(settings.tol_feas > 0.0) || !(settings.tol_gap > 0.0)) {
    throw InputError("solver tolerances must be positive");
  }
  if (!(settings.relaxation > 0.0 && settings.relaxation < 2.0)) {
    throw InputError("relaxation must lie in (0, 2)");
  }
  Settings s = settings;
  s.check_interval = std::max<std::size_t>(1, s.check_interval);
  HsdeSolver solver(program, s);
  return solver.run(warm);
}

}  // namespace bmot::conic
