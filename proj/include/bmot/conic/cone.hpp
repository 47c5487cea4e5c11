#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bmot::conic {

enum class ConeKind { Zero, Nonnegative, SecondOrder, Power };

/// One cone factor of a product cone.
///
/// Power(alpha, n) is {(a, b, v) in R x R x R^{n-2} : a^alpha b^(1-alpha) >= |v|,
/// a >= 0, b >= 0}. SecondOrder(n) is {(t, v) : |v| <= t}.
struct ConeBlock {
  ConeKind kind = ConeKind::Nonnegative;
  std::size_t size = 0;
  double alpha = 0.5;  // Power only

  static ConeBlock zero(std::size_t n);
  static ConeBlock nonnegative(std::size_t n);
  static ConeBlock second_order(std::size_t n);
  static ConeBlock power(double alpha, std::size_t n);

  /// Throws InputError when the size/alpha invariants fail.
  void validate() const;
  std::string describe() const;
};

/// A cone block applied to the contiguous range [offset, offset + block.size).
struct ConeSlice {
  ConeBlock block;
  std::size_t offset = 0;
};

/// In-place Euclidean projection onto the cone. Returns false only when the
/// power-cone root finder fails to converge (the point is then unspecified).
bool project_in_place(std::span<double> point, const ConeBlock& block);

/// In-place projection onto the dual cone K*.
bool project_dual_in_place(std::span<double> point, const ConeBlock& block);

/// Euclidean projection onto the cone; throws on dimension mismatch and on
/// root-finder failure.
std::vector<double> project_cone(std::span<const double> point, const ConeBlock& block);
std::vector<double> project_dual_cone(std::span<const double> point, const ConeBlock& block);

/// Membership test with absolute slack `tol`.
bool in_cone(std::span<const double> point, const ConeBlock& block, double tol);
bool in_dual_cone(std::span<const double> point, const ConeBlock& block, double tol);

}  // namespace bmot::conic
