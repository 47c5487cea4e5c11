#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "bmot/conic/solver.hpp"
#include "bmot/m2ot.hpp"
#include "bmot/measure.hpp"

namespace bmot {

struct OrderDiagnostics {
  double z2 = 0.0;
  double c_value = 0.0;
  std::optional<double> alpha;  // empty when Z2 vanishes (mu = nu)
  double forward_projection_distance = 0.0;
  double backward_projection_distance = 0.0;
  std::map<std::string, double> residuals;
};

/// rho = zeta # gamma. Atoms closer than `merge_radius` are clustered greedily
/// and replaced by their mass-weighted mean; a negative radius selects
/// 1e-6 * (1 + diameter of the supports).
DiscreteMeasure pushforward_rho(const BiMartingalePlan& plan, double merge_radius = -1.0);

/// Diagnostics from an already solved Quadratic plan.
OrderDiagnostics order_diagnostics(const BiMartingalePlan& plan);

/// One Quadratic solve, then order_diagnostics. Identical measures skip the
/// solve (C = m2).
OrderDiagnostics z2(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const conic::Settings& settings = {});

/// One element of the Zolotarev projection set mu v nu.
DiscreteMeasure zolotarev_project(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const conic::Settings& settings = {});

/// res1 = sum_i |sum_j gamma_ij zeta_ij - mu_i x_i|, res2 likewise over j.
std::pair<double, double> martingale_residual(const BiMartingalePlan& plan);

/// Quadratic Wasserstein distance from the transport LP.
double wasserstein2(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const conic::Settings& settings = {});

/// Is there a martingale coupling from mu to rho? Solves an elastic transport
/// LP and compares the largest martingale-row defect, relative to
/// 1 + |rhs|_inf like a solver primal residual, with tol.
bool strassen_feasible(const DiscreteMeasure& mu, const DiscreteMeasure& rho, double tol = 1e-7,
                       const conic::Settings& settings = {});

/// Smallest total violation sum |sum_j gamma_ij z_j - mu_i x_i| over couplings.
double strassen_violation(const DiscreteMeasure& mu, const DiscreteMeasure& rho,
                          const conic::Settings& settings = {});

/// True when both measures have the same atoms and weights (exact compare).
bool identical(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// {"z2","c","alpha","proj_forward","proj_backward","residuals":{...}}, numbers
/// rounded to 12 significant digits, alpha null when undefined.
std::string diagnostics_json(const OrderDiagnostics& diag);

}  // namespace bmot
