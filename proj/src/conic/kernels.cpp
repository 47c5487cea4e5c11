#include "bmot/conic/kernels.hpp"

#ifdef BMOT_HAVE_OPENMP
#include <omp.h>
#endif

namespace bmot::conic {
namespace {

// below this many blocks the fork/join overhead dominates
constexpr std::size_t kParallelThreshold = 2048;

inline bool project_one(std::span<double> x, const ConeSlice& s, bool dual) {
  const auto view = x.subspan(s.offset, s.block.size);
  return dual ? project_dual_in_place(view, s.block) : project_in_place(view, s.block);
}

}  // namespace

std::size_t project_blocks_serial(std::span<double> x, std::span<const ConeSlice> slices,
                                  bool dual) {
  std::size_t failures = 0;
  for (const ConeSlice& s : slices) {
    if (!project_one(x, s, dual)) ++failures;
  }
  return failures;
}

std::size_t project_blocks_parallel(std::span<double> x, std::span<const ConeSlice> slices,
                                    bool dual) {
#ifdef BMOT_HAVE_OPENMP
  const auto n = static_cast<long long>(slices.size());
  long long failures = 0;
#pragma omp parallel for schedule(static) reduction(+ : failures) \
    if (slices.size() >= kParallelThreshold)
  for (long long k = 0; k < n; ++k) {
    if (!project_one(x, slices[static_cast<std::size_t>(k)], dual)) ++failures;
  }
  return static_cast<std::size_t>(failures);
#else
  return project_blocks_serial(x, slices, dual);
#endif
}

bool parallel_kernels_available() {
#ifdef BMOT_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace bmot::conic
