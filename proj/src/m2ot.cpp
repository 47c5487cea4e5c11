#include "bmot/m2ot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bmot/error.hpp"
#include "bmot/measure_io.hpp"

namespace bmot {

ObjectiveSpec ObjectiveSpec::dominance(double p) {
  ObjectiveSpec s;
  s.kind = Kind::Dominance;
  s.p = p;
  return s;
}

ObjectiveSpec ObjectiveSpec::quadratic() { return ObjectiveSpec{}; }

ObjectiveSpec ObjectiveSpec::mot_penalty(std::vector<double> cost, double epsilon) {
  ObjectiveSpec s;
  s.kind = Kind::MotPenalty;
  s.cost = std::move(cost);
  s.epsilon = epsilon;
  return s;
}

namespace {

void check_inputs(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const ObjectiveSpec& spec) {
  if (mu.dim() != nu.dim()) throw InputError("measures have different dimensions");
  const auto bm = barycentre(mu);
  const auto bn = barycentre(nu);
  double scale = 1.0;
  for (double v : bm) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < bm.size(); ++k) {
    if (std::abs(bm[k] - bn[k]) > 1e-8 * scale) {
      throw InputError("barycentres differ; recentre the measures first");
    }
  }
  switch (spec.kind) {
    case ObjectiveSpec::Kind::Dominance:
      if (!(spec.p > 1.0) || !std::isfinite(spec.p)) throw InputError("p must be > 1");
      break;
    case ObjectiveSpec::Kind::Quadratic:
      break;
    case ObjectiveSpec::Kind::MotPenalty:
      if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon)) {
        throw InputError("penalty epsilon must be positive");
      }
      if (spec.cost.size() != mu.size() * nu.size()) {
        throw InputError("cost matrix must be n_mu x n_nu");
      }
      for (double c : spec.cost) {
        if (!std::isfinite(c)) throw InputError("non-finite cost entry");
      }
      break;
  }
}

}  // namespace

std::pair<conic::ConicProgram, IndexMap> build(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                               const ObjectiveSpec& spec) {
  check_inputs(mu, nu, spec);
  IndexMap map{mu, nu, spec};
  const std::size_t nm = map.n_mu();
  const std::size_t nn = map.n_nu();
  const std::size_t d = map.dim();

  conic::ConicProgram prog;
  prog.nvars = map.pairs() * map.block_size();
  prog.objective.assign(prog.nvars, 0.0);

  const std::size_t row_nu = nm;
  const std::size_t row_qmu = nm + nn;
  const std::size_t row_qnu = row_qmu + d * nm;
  const std::size_t rows = row_qnu + d * nn;

  std::vector<conic::Triplet> trip;
  trip.reserve(map.pairs() * 2 * (d + 1));
  prog.rhs.assign(rows, 0.0);
  for (std::size_t i = 0; i < nm; ++i) {
    prog.rhs[i] = mu.weight(i);
    for (std::size_t k = 0; k < d; ++k) prog.rhs[row_qmu + i * d + k] = mu.weight(i) * mu.point(i)[k];
  }
  for (std::size_t j = 0; j < nn; ++j) {
    prog.rhs[row_nu + j] = nu.weight(j);
    for (std::size_t k = 0; k < d; ++k) prog.rhs[row_qnu + j * d + k] = nu.weight(j) * nu.point(j)[k];
  }

  const double alpha = 1.0 / spec.exponent();
  prog.cones.reserve(map.pairs());
  for (std::size_t i = 0; i < nm; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      const int g = static_cast<int>(map.gamma_index(i, j));
      trip.emplace_back(static_cast<int>(i), g, 1.0);
      trip.emplace_back(static_cast<int>(row_nu + j), g, 1.0);
      for (std::size_t k = 0; k < d; ++k) {
        const int qk = static_cast<int>(map.q_index(i, j, k));
        trip.emplace_back(static_cast<int>(row_qmu + i * d + k), qk, 1.0);
        trip.emplace_back(static_cast<int>(row_qnu + j * d + k), qk, 1.0);
      }
      double& cr = prog.objective[map.r_index(i, j)];
      if (spec.kind == ObjectiveSpec::Kind::MotPenalty) {
        cr = 0.5 / spec.epsilon;
        prog.objective[map.gamma_index(i, j)] = spec.cost[i * nn + j];
      } else {
        cr = 1.0;
      }
      prog.cones.push_back({conic::ConeBlock::power(alpha, d + 2), map.block_offset(i, j)});
    }
  }
  prog.equalities.resize(static_cast<int>(rows), static_cast<int>(prog.nvars));
  prog.equalities.setFromTriplets(trip.begin(), trip.end());
  prog.equalities.makeCompressed();
  return {std::move(prog), std::move(map)};
}

std::vector<double> universal_point(const IndexMap& map) {
  const std::size_t d = map.dim();
  const double p = map.spec.exponent();
  const auto b = barycentre(map.mu);
  std::vector<double> x(map.pairs() * map.block_size(), 0.0);
  for (std::size_t i = 0; i < map.n_mu(); ++i) {
    for (std::size_t j = 0; j < map.n_nu(); ++j) {
      const double g = map.mu.weight(i) * map.nu.weight(j);
      double norm2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double z = map.mu.point(i)[k] + map.nu.point(j)[k] - b[k];
        x[map.q_index(i, j, k)] = z * g;
        norm2 += z * z;
      }
      x[map.gamma_index(i, j)] = g;
      // r = |q|^p / g^(p-1) = g |z|^p
      x[map.r_index(i, j)] = g * std::pow(norm2, 0.5 * p);
    }
  }
  return x;
}

BiMartingalePlan extract_plan(const conic::SolveReport& solution, const IndexMap& map,
                              double gamma_floor, double tol) {
  if (solution.status != conic::SolveStatus::Optimal) {
    throw SolverError("solve ended with " + conic::summary(solution));
  }
  if (!(gamma_floor >= 0.0)) throw InputError("gamma floor must be nonnegative");
  const std::size_t nm = map.n_mu();
  const std::size_t nn = map.n_nu();
  const std::size_t d = map.dim();
  if (solution.x.size() != map.pairs() * map.block_size()) {
    throw InputError("solution does not match the index map");
  }

  BiMartingalePlan plan{map.mu, map.nu, d, {}, {}, {}, {}, {}, {}, 0.0, 0.0, 0.0, {}};
  plan.report = solution;
  plan.objective = solution.objective_value;
  plan.gamma.assign(nm * nn, 0.0);
  plan.q.assign(nm * nn * d, 0.0);
  plan.zeta.assign(nm * nn * d, 0.0);
  plan.has_zeta.assign(nm * nn, 0);
  plan.r.assign(nm * nn, 0.0);

  double kept = 0.0;
  double removed = 0.0;
  for (std::size_t i = 0; i < nm; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      const std::size_t pair = i * nn + j;
      const double g = solution.x[map.gamma_index(i, j)];
      plan.r[pair] = solution.x[map.r_index(i, j)];
      if (g > gamma_floor) {
        plan.gamma[pair] = g;
        plan.has_zeta[pair] = 1;
        for (std::size_t k = 0; k < d; ++k) plan.q[pair * d + k] = solution.x[map.q_index(i, j, k)];
        kept += g;
      } else {
        removed += std::max(g, 0.0);
      }
    }
  }
  if (!(kept > 0.0)) throw SolverError("plan has no mass above the gamma floor");
  plan.diagnostics.mass_removed = removed;
  const double renorm = 1.0 / kept;
  for (double& g : plan.gamma) g *= renorm;
  for (double& v : plan.q) v *= renorm;

  for (std::size_t pair = 0; pair < nm * nn; ++pair) {
    if (!plan.has_zeta[pair]) continue;
    double n2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double z = plan.q[pair * d + k] / plan.gamma[pair];
      plan.zeta[pair * d + k] = z;
      n2 += z * z;
    }
    plan.c_value += plan.gamma[pair] * n2;
    if (map.spec.kind == ObjectiveSpec::Kind::MotPenalty) {
      plan.transport_cost += map.spec.cost[pair] * plan.gamma[pair];
    }
  }

  PlanDiagnostics& diag = plan.diagnostics;
  std::vector<double> qrow(d), qcol(d);
  for (std::size_t i = 0; i < nm; ++i) {
    double s = 0.0;
    std::fill(qrow.begin(), qrow.end(), 0.0);
    for (std::size_t j = 0; j < nn; ++j) {
      s += plan.gamma[i * nn + j];
      for (std::size_t k = 0; k < d; ++k) qrow[k] += plan.q[(i * nn + j) * d + k];
    }
    diag.marginal_residual = std::max(diag.marginal_residual, std::abs(s - map.mu.weight(i)));
    for (std::size_t k = 0; k < d; ++k) {
      diag.coupling_residual = std::max(diag.coupling_residual,
                                        std::abs(qrow[k] - map.mu.weight(i) * map.mu.point(i)[k]));
    }
  }
  for (std::size_t j = 0; j < nn; ++j) {
    double s = 0.0;
    std::fill(qcol.begin(), qcol.end(), 0.0);
    for (std::size_t i = 0; i < nm; ++i) {
      s += plan.gamma[i * nn + j];
      for (std::size_t k = 0; k < d; ++k) qcol[k] += plan.q[(i * nn + j) * d + k];
    }
    diag.marginal_residual = std::max(diag.marginal_residual, std::abs(s - map.nu.weight(j)));
    for (std::size_t k = 0; k < d; ++k) {
      diag.coupling_residual = std::max(diag.coupling_residual,
                                        std::abs(qcol[k] - map.nu.weight(j) * map.nu.point(j)[k]));
    }
  }
  double scale = 1.0;
  for (double v : map.mu.coords()) scale = std::max(scale, std::abs(v));
  for (double v : map.nu.coords()) scale = std::max(scale, std::abs(v));
  if (diag.marginal_residual > tol) {
    diag.valid = false;
    diag.message += "marginal rows violated; ";
  }
  if (diag.coupling_residual > tol * scale) {
    diag.valid = false;
    diag.message += "coupling rows violated; ";
  }
  if (!diag.message.empty()) diag.message.resize(diag.message.size() - 2);
  return plan;
}

BiMartingalePlan solve_m2ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            const ObjectiveSpec& spec, const conic::Settings& settings,
                            const conic::WarmStart* warm, double gamma_floor) {
  auto [prog, map] = build(mu, nu, spec);
  const conic::SolveReport report = conic::solve(prog, settings, warm);
  return extract_plan(report, map, gamma_floor);
}

std::string plan_to_csv(const BiMartingalePlan& plan) {
  std::ostringstream out;
  out << "i,j,gamma";
  for (std::size_t k = 1; k <= plan.dim; ++k) out << ",q_" << k;
  for (std::size_t k = 1; k <= plan.dim; ++k) out << ",zeta_" << k;
  out << '\n';
  for (std::size_t i = 0; i < plan.n_mu(); ++i) {
    for (std::size_t j = 0; j < plan.n_nu(); ++j) {
      const std::size_t pair = i * plan.n_nu() + j;
      out << i << ',' << j << ',' << format_report(plan.gamma[pair]);
      for (std::size_t k = 0; k < plan.dim; ++k) out << ',' << format_report(plan.q[pair * plan.dim + k]);
      for (std::size_t k = 0; k < plan.dim; ++k) {
        out << ',';
        if (plan.has_zeta[pair]) out << format_report(plan.zeta[pair * plan.dim + k]);
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace bmot
