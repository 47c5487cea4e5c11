#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bmot/conic/solver.hpp"
#include "bmot/m2ot.hpp"
#include "bmot/measure.hpp"

namespace bmot {

constexpr double kEpsilonFloor = 1e-12;

/// eps_n = max(gap_n, 1e-12)^exponent, exponent in (0, 1).
std::vector<double> epsilon_schedule(const std::vector<double>& z2_gaps, double exponent = 0.5);

/// eps_n = eps0 * n^(-1/2); used when the gaps to the limit are unknown.
std::vector<double> fallback_schedule(const std::vector<int>& ns, double eps0 = 1.0);

struct MotInstance {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  std::vector<double> cost;  // n_mu x n_nu
};

/// Pairwise cost matrices.
std::vector<double> cost_l1(const DiscreteMeasure& mu, const DiscreteMeasure& nu);  // |x - y|
std::vector<double> cost_l2(const DiscreteMeasure& mu, const DiscreteMeasure& nu);  // |x - y|^2

/// Rotated four-atom target nu_n with theta_n = pi/(2n) and cost |x - y|.
MotInstance instability_demo(int n);

/// Upper bound sqrt(5) pi / (4n) on Z2(nu, nu_n) for the demo data.
double instability_gap(int n);

struct ConvergenceRecord {
  int n = 0;
  double epsilon = 0.0;
  double transport_cost = 0.0;
  double penalty_value = 0.0;  // (sum r - C_n) / (2 eps)
  double c_n = 0.0;
  double res1 = 0.0;  // bi-martingale residuals of the extracted plan
  double res2 = 0.0;
  double martingale_defect = 0.0;  // sum_i |sum_j gamma_ij (y_j - x_i)|
  std::size_t iterations = 0;
  std::string status;
};

struct ConvergenceReport {
  std::vector<ConvergenceRecord> records;
  double limit_estimate = 0.0;
  bool complete = true;
  std::string error;
};

/// Solves Dominance(2) for C_n and then MotPenalty(cost, eps_n) for every n.
/// With warm_start the previous n's solution seeds the next solve whenever
/// the sizes agree. A non-optimal solve stops the run; the report is then
/// marked incomplete and carries the message.
ConvergenceReport run_sequence(const std::function<MotInstance(int)>& data_fn,
                               const std::vector<int>& ns, const std::vector<double>& epsilons,
                               bool warm_start, const conic::Settings& settings = {},
                               double gamma_floor = kDefaultGammaFloor);

std::vector<int> default_demo_ns();

/// `n,epsilon,cost,penalty,c_n,res1,res2,iterations,status`
std::string report_csv(const ConvergenceReport& report);

/// Static line plot of cost against n (log axis).
std::string report_svg(const ConvergenceReport& report);

}  // namespace bmot
