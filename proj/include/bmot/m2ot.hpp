#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bmot/conic/program.hpp"
#include "bmot/conic/solver.hpp"
#include "bmot/measure.hpp"

namespace bmot {

struct ObjectiveSpec {
  enum class Kind { Dominance, Quadratic, MotPenalty };

  Kind kind = Kind::Quadratic;
  double p = 2.0;
  std::vector<double> cost;  // n_mu x n_nu, row-major (MotPenalty)
  double epsilon = 1.0;      // MotPenalty

  static ObjectiveSpec dominance(double p);
  static ObjectiveSpec quadratic();
  static ObjectiveSpec mot_penalty(std::vector<double> cost, double epsilon);

  /// Exponent of the cone encoding r >= |q|^p / gamma^(p-1).
  double exponent() const { return kind == Kind::Dominance ? p : 2.0; }
};

/// Variable layout of a bi-martingale program. Pair (i, j) owns the block
/// [r, gamma, q_1..q_d] starting at block_offset(i, j).
struct IndexMap {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  ObjectiveSpec spec;

  std::size_t n_mu() const { return mu.size(); }
  std::size_t n_nu() const { return nu.size(); }
  std::size_t dim() const { return mu.dim(); }
  std::size_t block_size() const { return dim() + 2; }
  std::size_t pairs() const { return n_mu() * n_nu(); }
  std::size_t block_offset(std::size_t i, std::size_t j) const {
    return (i * n_nu() + j) * block_size();
  }
  std::size_t r_index(std::size_t i, std::size_t j) const { return block_offset(i, j); }
  std::size_t gamma_index(std::size_t i, std::size_t j) const { return block_offset(i, j) + 1; }
  std::size_t q_index(std::size_t i, std::size_t j, std::size_t k) const {
    return block_offset(i, j) + 2 + k;
  }
};

/// Throws InputError on dimension mismatch, barycentres further apart than
/// 1e-8, p <= 1, or a malformed penalty specification.
std::pair<conic::ConicProgram, IndexMap> build(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                               const ObjectiveSpec& spec);

/// gamma = mu x nu, q = (x + y - b) gamma, r on the cone boundary. Satisfies
/// every equality row of build() exactly up to rounding.
std::vector<double> universal_point(const IndexMap& map);

struct PlanDiagnostics {
  double marginal_residual = 0.0;  // max |row/col sum of gamma - weight|
  double coupling_residual = 0.0;  // max |sum_j q_ij - mu_i x_i| and symmetric
  double mass_removed = 0.0;       // gamma mass zeroed by the floor
  bool valid = true;
  std::string message;
};

struct BiMartingalePlan {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  std::size_t dim = 0;
  std::vector<double> gamma;      // n_mu x n_nu
  std::vector<double> q;          // n_mu x n_nu x d
  std::vector<double> zeta;       // n_mu x n_nu x d, meaningful where has_zeta
  std::vector<char> has_zeta;     // n_mu x n_nu
  std::vector<double> r;          // cone epigraph variables
  conic::SolveReport report;
  double c_value = 0.0;           // sum gamma |zeta|^2
  double transport_cost = 0.0;    // sum c_ij gamma_ij (MotPenalty only)
  double objective = 0.0;         // solved objective, without reporting constants
  PlanDiagnostics diagnostics;

  std::size_t n_mu() const { return mu.size(); }
  std::size_t n_nu() const { return nu.size(); }
  double gamma_at(std::size_t i, std::size_t j) const { return gamma[i * n_nu() + j]; }
  std::span<const double> zeta_at(std::size_t i, std::size_t j) const {
    return {zeta.data() + (i * n_nu() + j) * dim, dim};
  }
  std::span<const double> q_at(std::size_t i, std::size_t j) const {
    return {q.data() + (i * n_nu() + j) * dim, dim};
  }
};

constexpr double kDefaultGammaFloor = 1e-9;

/// Turns an Optimal solve into a plan. Pairs with gamma <= gamma_floor are
/// dropped and gamma is renormalized; the plan invariants are then checked
/// against `tol` and failures recorded in diagnostics. Throws SolverError
/// when the report is not Optimal.
BiMartingalePlan extract_plan(const conic::SolveReport& solution, const IndexMap& map,
                              double gamma_floor = kDefaultGammaFloor, double tol = 1e-6);

/// build + solve + extract_plan.
BiMartingalePlan solve_m2ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            const ObjectiveSpec& spec, const conic::Settings& settings = {},
                            const conic::WarmStart* warm = nullptr,
                            double gamma_floor = kDefaultGammaFloor);

/// `i,j,gamma,q_1..q_d,zeta_1..zeta_d`, zeta left blank below the floor.
std::string plan_to_csv(const BiMartingalePlan& plan);

}  // namespace bmot
