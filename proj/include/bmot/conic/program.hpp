#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/SparseCore>

#include "bmot/conic/cone.hpp"

namespace bmot::conic {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// minimize c'x  subject to  A x = b,  x[slice] in cone for every slice.
///
/// Variables not covered by a slice are free. Slices must not overlap.
struct ConicProgram {
  std::size_t nvars = 0;
  std::vector<double> objective;
  SparseMatrix equalities;
  std::vector<double> rhs;
  std::vector<ConeSlice> cones;

  std::size_t nrows() const { return rhs.size(); }

  /// Throws InputError when dimensions disagree, slices overlap or a cone
  /// block is malformed.
  void validate() const;
};

/// Plain-text dump for cross-checking against external solvers:
///
///   rows cols nnz
///   i j value          (nnz lines, 0-based, column-major order)
///   b b_0 ... b_{m-1}
///   c c_0 ... c_{n-1}
///   cones K
///   offset kind size [alpha]   (K lines; kind in zero|nonneg|soc|power)
///
/// Values use the shortest round-trip decimal form, so dumps of the same
/// program are byte-identical.
void write_program_dump(const ConicProgram& program, std::ostream& out);

}  // namespace bmot::conic
