#include "bmot/conic/program.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "bmot/error.hpp"
#include "bmot/measure_io.hpp"

namespace bmot::conic {

void ConicProgram::validate() const {
  if (objective.size() != nvars) throw InputError("objective length differs from nvars");
  if (static_cast<std::size_t>(equalities.cols()) != nvars) {
    throw InputError("equality matrix column count differs from nvars");
  }
  if (static_cast<std::size_t>(equalities.rows()) != rhs.size()) {
    throw InputError("equality matrix row count differs from rhs length");
  }
  for (double v : objective) {
    if (!std::isfinite(v)) throw InputError("non-finite objective coefficient");
  }
  for (double v : rhs) {
    if (!std::isfinite(v)) throw InputError("non-finite right-hand side");
  }
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  ranges.reserve(cones.size());
  for (const ConeSlice& s : cones) {
    s.block.validate();
    if (s.offset + s.block.size > nvars) throw InputError("cone slice exceeds nvars");
    ranges.emplace_back(s.offset, s.offset + s.block.size);
  }
  std::sort(ranges.begin(), ranges.end());
  for (std::size_t k = 1; k < ranges.size(); ++k) {
    if (ranges[k].first < ranges[k - 1].second) throw InputError("cone slices overlap");
  }
}

void write_program_dump(const ConicProgram& p, std::ostream& out) {
  out << p.equalities.rows() << ' ' << p.equalities.cols() << ' ' << p.equalities.nonZeros()
      << '\n';
  for (int j = 0; j < p.equalities.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(p.equalities, j); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << format_exact(it.value()) << '\n';
    }
  }
  out << 'b';
  for (double v : p.rhs) out << ' ' << format_exact(v);
  out << "\nc";
  for (double v : p.objective) out << ' ' << format_exact(v);
  out << "\ncones " << p.cones.size() << '\n';
  for (const ConeSlice& s : p.cones) {
    switch (s.block.kind) {
      case ConeKind::Zero: out << s.offset << " zero " << s.block.size; break;
      case ConeKind::Nonnegative: out << s.offset << " nonneg " << s.block.size; break;
      case ConeKind::SecondOrder: out << s.offset << " soc " << s.block.size; break;
      case ConeKind::Power:
        out << s.offset << " power " << s.block.size << ' ' << format_exact(s.block.alpha);
        break;
    }
    out << '\n';
  }
}

}  // namespace bmot::conic
