#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "bmot/conic/program.hpp"

namespace bmot::conic::detail {

// Column kinds for a linear program min c'x, Ax = b.
enum : char { kFreeCol = 0, kZeroCol = 1, kNonnegCol = 2 };

/// Lawson-Hanson: min |Ax - b| over x >= 0, columns flagged free unconstrained.
/// `passive` receives the final least-squares support (linearly independent).
bool nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const std::vector<char>& is_free,
          Eigen::VectorXd& x, std::vector<Eigen::Index>& passive);

/// Turns an approximate LP solution into a vertex solution. A candidate support
/// is read off the reduced costs `s_hint`, a feasible vertex is found on it with
/// nnls, and primal simplex finishes over all columns. Returns false when no
/// candidate works or the pivot budget runs out.
bool crossover(const SparseMatrix& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
               const std::vector<char>& kind, const Eigen::VectorXd& s_hint, Eigen::VectorXd& x,
               Eigen::VectorXd& y);

}  // namespace bmot::conic::detail
