#pragma once

#include <cstddef>
#include <span>

#include "bmot/conic/cone.hpp"

namespace bmot::conic {

// Block-wise projection of a stacked vector onto a product cone. Entries not
// covered by any slice are left untouched (free variables). Both variants
// return the number of blocks whose projection failed to converge.

/// Reference implementation: one block after another.
std::size_t project_blocks_serial(std::span<double> x, std::span<const ConeSlice> slices,
                                  bool dual = false);

/// OpenMP data-parallel version. Blocks are independent and written in place,
/// so the result is bitwise identical to the serial kernel for any thread count.
std::size_t project_blocks_parallel(std::span<double> x, std::span<const ConeSlice> slices,
                                    bool dual = false);

/// True when the library was built with OpenMP.
bool parallel_kernels_available();

}  // namespace bmot::conic
