#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bmot/conic/program.hpp"

namespace bmot::conic {

enum class SolveStatus {
  Optimal,
  MaxIterations,
  Infeasible,
  Unbounded,
  ProjectionFailure,  // power-cone root finder gave up; iterate is discarded
};

std::string to_string(SolveStatus status);

struct Settings {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  std::size_t max_iter = 200000;
  bool scaling = true;
  /// Over-relaxation factor of the splitting iteration, in (0, 2).
  double relaxation = 1.6;
  /// Residuals are evaluated every this many iterations.
  std::size_t check_interval = 10;
  /// Use the OpenMP projection kernel (identical results, see kernels.hpp).
  bool parallel_projection = true;
  /// Periodically rescale b so primal and dual residuals decrease together.
  bool adaptive_scaling = true;
  /// For programs with only zero and nonnegative cones: once residuals are
  /// small, guess the optimal basis from the iterate and finish with simplex.
  /// Accepted only when the result meets the tolerances.
  bool polish = true;
};

/// Optional starting point in the original variables.
struct WarmStart {
  std::vector<double> x;
  std::vector<double> y;
};

/// Outcome of a solve. Residuals are relative:
///   primal_residual = |Ax - b|_inf / (1 + max(|b|_inf, |Ax|_inf))
///   dual_residual   = |A'y + s - c|_inf / (1 + max(|c|_inf, |A'y|_inf))
///   gap             = |c'x - b'y| / (1 + |c'x| + |b'y|)
/// where s in K* is the cone dual. x lies in the cone exactly.
struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> s;
  double objective_value = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  std::size_t iterations = 0;
};

/// "status after N iterations (primal .., dual .., gap ..)" for error messages.
std::string summary(const SolveReport& report);

/// Splitting solver on the homogeneous self-dual embedding of the program.
/// Deterministic: identical inputs and settings give bit-identical reports.
SolveReport solve(const ConicProgram& program, const Settings& settings = {},
                  const WarmStart* warm = nullptr);

}  // namespace bmot::conic
