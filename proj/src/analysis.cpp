#include "bmot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "bmot/error.hpp"
#include "bmot/measure_io.hpp"

namespace bmot {
namespace {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

Box bounding_box(std::size_t d, const std::vector<double>& coords) {
  Box b{std::vector<double>(d, INFINITY), std::vector<double>(d, -INFINITY)};
  for (std::size_t i = 0; i < coords.size(); ++i) {
    b.lo[i % d] = std::min(b.lo[i % d], coords[i]);
    b.hi[i % d] = std::max(b.hi[i % d], coords[i]);
  }
  return b;
}

// Hash of the integer cell containing a point.
struct CellKey {
  std::vector<long long> idx;
  bool operator==(const CellKey&) const = default;
};
struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (long long v : k.idx) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

void check_same_dim(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != b.dim()) throw InputError("measures have different dimensions");
}

conic::SolveReport solve_or_throw(const conic::ConicProgram& prog, const conic::Settings& s) {
  conic::SolveReport r = conic::solve(prog, s);
  if (r.status != conic::SolveStatus::Optimal) {
    throw SolverError("LP solve ended with " + conic::summary(r));
  }
  return r;
}

double round12(double v) { return std::stod(format_report(v)); }

}  // namespace

bool identical(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return a.dim() == b.dim() && a.weights() == b.weights() && a.coords() == b.coords();
}

DiscreteMeasure pushforward_rho(const BiMartingalePlan& plan, double merge_radius) {
  const std::size_t d = plan.dim;
  if (merge_radius < 0.0) {
    std::vector<double> all = plan.mu.coords();
    all.insert(all.end(), plan.nu.coords().begin(), plan.nu.coords().end());
    const Box box = bounding_box(d, all);
    double diag = 0.0;
    for (std::size_t k = 0; k < d; ++k) diag += (box.hi[k] - box.lo[k]) * (box.hi[k] - box.lo[k]);
    // box diagonal stands in for the diameter: same order, linear cost
    merge_radius = 1e-6 * (1.0 + std::sqrt(diag));
  }

  std::vector<double> w;
  std::vector<double> sum;     // weighted coordinate sums per cluster
  std::vector<double> centre;  // seed point per cluster
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells;
  const double cell = merge_radius > 0.0 ? merge_radius : 1.0;

  auto cell_of = [&](std::span<const double> z) {
    CellKey key{std::vector<long long>(d)};
    for (std::size_t k = 0; k < d; ++k) key.idx[k] = static_cast<long long>(std::floor(z[k] / cell));
    return key;
  };

  for (std::size_t pair = 0; pair < plan.gamma.size(); ++pair) {
    if (!plan.has_zeta[pair]) continue;
    const double g = plan.gamma[pair];
    std::span<const double> z(plan.zeta.data() + pair * d, d);
    const CellKey home = cell_of(z);
    std::size_t found = w.size();
    if (merge_radius > 0.0) {
      // scan the 3^d neighbouring cells
      CellKey probe = home;
      const std::size_t combos = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(d)));
      for (std::size_t c = 0; c < combos && found == w.size(); ++c) {
        std::size_t rem = c;
        for (std::size_t k = 0; k < d; ++k) {
          probe.idx[k] = home.idx[k] + static_cast<long long>(rem % 3) - 1;
          rem /= 3;
        }
        auto it = cells.find(probe);
        if (it == cells.end()) continue;
        for (std::size_t cl : it->second) {
          if (distance(z, {centre.data() + cl * d, d}) <= merge_radius) {
            found = cl;
            break;
          }
        }
      }
    }
    if (found == w.size()) {
      w.push_back(0.0);
      sum.insert(sum.end(), d, 0.0);
      centre.insert(centre.end(), z.begin(), z.end());
      cells[home].push_back(found);
    }
    w[found] += g;
    for (std::size_t k = 0; k < d; ++k) sum[found * d + k] += g * z[k];
  }
  double total = 0.0;
  for (double v : w) total += v;
  for (std::size_t c = 0; c < w.size(); ++c) {
    for (std::size_t k = 0; k < d; ++k) sum[c * d + k] /= w[c];
    w[c] /= total;
  }
  return DiscreteMeasure(d, std::move(w), std::move(sum));
}

OrderDiagnostics order_diagnostics(const BiMartingalePlan& plan) {
  OrderDiagnostics diag;
  const double m2mu = moment(plan.mu, 2.0);
  const double m2nu = moment(plan.nu, 2.0);
  diag.c_value = plan.c_value;
  diag.z2 = diag.c_value - 0.5 * (m2mu + m2nu);
  const double half_gap = 0.5 * (m2nu - m2mu);
  if (std::abs(diag.z2) > 1e-12 * (1.0 + m2mu + m2nu)) diag.alpha = half_gap / diag.z2;
  diag.forward_projection_distance = 0.5 * (diag.z2 - half_gap);
  diag.backward_projection_distance = 0.5 * (diag.z2 + half_gap);
  const auto [res1, res2] = martingale_residual(plan);
  diag.residuals["primal"] = plan.report.primal_residual;
  diag.residuals["dual"] = plan.report.dual_residual;
  diag.residuals["gap"] = plan.report.gap;
  diag.residuals["martingale_mu"] = res1;
  diag.residuals["martingale_nu"] = res2;
  diag.residuals["iterations"] = static_cast<double>(plan.report.iterations);
  return diag;
}

OrderDiagnostics z2(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const conic::Settings& settings) {
  check_same_dim(mu, nu);
  if (identical(mu, nu)) {
    OrderDiagnostics diag;
    diag.c_value = moment(mu, 2.0);
    for (const char* key : {"primal", "dual", "gap", "martingale_mu", "martingale_nu", "iterations"}) {
      diag.residuals[key] = 0.0;
    }
    return diag;
  }
  return order_diagnostics(solve_m2ot(mu, nu, ObjectiveSpec::quadratic(), settings));
}

DiscreteMeasure zolotarev_project(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const conic::Settings& settings) {
  check_same_dim(mu, nu);
  if (identical(mu, nu)) return mu;
  return pushforward_rho(solve_m2ot(mu, nu, ObjectiveSpec::quadratic(), settings));
}

std::pair<double, double> martingale_residual(const BiMartingalePlan& plan) {
  const std::size_t d = plan.dim;
  const std::size_t nm = plan.n_mu();
  const std::size_t nn = plan.n_nu();
  std::vector<double> acc(d);
  auto term = [&](const DiscreteMeasure& m, std::size_t a) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double t = acc[k] - m.weight(a) * m.point(a)[k];
      s += t * t;
    }
    return std::sqrt(s);
  };
  double res1 = 0.0;
  for (std::size_t i = 0; i < nm; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t j = 0; j < nn; ++j) {
      const std::size_t pair = i * nn + j;
      if (!plan.has_zeta[pair]) continue;
      for (std::size_t k = 0; k < d; ++k) acc[k] += plan.gamma[pair] * plan.zeta[pair * d + k];
    }
    res1 += term(plan.mu, i);
  }
  double res2 = 0.0;
  for (std::size_t j = 0; j < nn; ++j) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t i = 0; i < nm; ++i) {
      const std::size_t pair = i * nn + j;
      if (!plan.has_zeta[pair]) continue;
      for (std::size_t k = 0; k < d; ++k) acc[k] += plan.gamma[pair] * plan.zeta[pair * d + k];
    }
    res2 += term(plan.nu, j);
  }
  return {res1, res2};
}

double wasserstein2(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const conic::Settings& settings) {
  check_same_dim(mu, nu);
  if (identical(mu, nu)) return 0.0;
  const std::size_t nm = mu.size();
  const std::size_t nn = nu.size();
  conic::ConicProgram prog;
  prog.nvars = nm * nn;
  prog.objective.resize(prog.nvars);
  prog.rhs.resize(nm + nn);
  std::vector<conic::Triplet> trip;
  for (std::size_t i = 0; i < nm; ++i) {
    prog.rhs[i] = mu.weight(i);
    for (std::size_t j = 0; j < nn; ++j) {
      const int v = static_cast<int>(i * nn + j);
      const double dist = distance(mu.point(i), nu.point(j));
      prog.objective[i * nn + j] = dist * dist;
      trip.emplace_back(static_cast<int>(i), v, 1.0);
      trip.emplace_back(static_cast<int>(nm + j), v, 1.0);
    }
  }
  for (std::size_t j = 0; j < nn; ++j) prog.rhs[nm + j] = nu.weight(j);
  prog.equalities.resize(static_cast<int>(nm + nn), static_cast<int>(prog.nvars));
  prog.equalities.setFromTriplets(trip.begin(), trip.end());
  prog.cones.push_back({conic::ConeBlock::nonnegative(prog.nvars), 0});
  const conic::SolveReport r = solve_or_throw(prog, settings);
  double cost = 0.0;
  for (std::size_t v = 0; v < prog.nvars; ++v) cost += prog.objective[v] * std::max(r.x[v], 0.0);
  return std::sqrt(cost);
}

namespace {

// Signed martingale-row defects sum_j gamma_ij z_j - mu_i x_i of the elastic
// LP optimum, row-major in (i, k).
std::vector<double> strassen_defects(const DiscreteMeasure& mu, const DiscreteMeasure& rho,
                                     const conic::Settings& settings) {
  const std::size_t nm = mu.size();
  const std::size_t nr = rho.size();
  const std::size_t d = mu.dim();
  // [gamma (nm*nr) | t+ (nm*d) | t- (nm*d)], all nonnegative
  const std::size_t ng = nm * nr;
  const std::size_t nt = nm * d;
  conic::ConicProgram prog;
  prog.nvars = ng + 2 * nt;
  prog.objective.assign(prog.nvars, 0.0);
  for (std::size_t v = ng; v < prog.nvars; ++v) prog.objective[v] = 1.0;
  const std::size_t rows = nm + nr + nt;
  prog.rhs.assign(rows, 0.0);
  std::vector<conic::Triplet> trip;
  for (std::size_t i = 0; i < nm; ++i) {
    prog.rhs[i] = mu.weight(i);
    for (std::size_t k = 0; k < d; ++k) prog.rhs[nm + nr + i * d + k] = mu.weight(i) * mu.point(i)[k];
    for (std::size_t j = 0; j < nr; ++j) {
      const int v = static_cast<int>(i * nr + j);
      trip.emplace_back(static_cast<int>(i), v, 1.0);
      trip.emplace_back(static_cast<int>(nm + j), v, 1.0);
      for (std::size_t k = 0; k < d; ++k) {
        if (rho.point(j)[k] != 0.0) {
          trip.emplace_back(static_cast<int>(nm + nr + i * d + k), v, rho.point(j)[k]);
        }
      }
    }
    for (std::size_t k = 0; k < d; ++k) {
      const int row = static_cast<int>(nm + nr + i * d + k);
      trip.emplace_back(row, static_cast<int>(ng + i * d + k), -1.0);
      trip.emplace_back(row, static_cast<int>(ng + nt + i * d + k), 1.0);
    }
  }
  for (std::size_t j = 0; j < nr; ++j) prog.rhs[nm + j] = rho.weight(j);
  prog.equalities.resize(static_cast<int>(rows), static_cast<int>(prog.nvars));
  prog.equalities.setFromTriplets(trip.begin(), trip.end());
  prog.cones.push_back({conic::ConeBlock::nonnegative(prog.nvars), 0});
  const conic::SolveReport r = solve_or_throw(prog, settings);
  // from the coupling itself rather than the slacks
  std::vector<double> defects(nm * d, 0.0);
  for (std::size_t i = 0; i < nm; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      const double g = std::max(r.x[i * nr + j], 0.0);
      for (std::size_t k = 0; k < d; ++k) defects[i * d + k] += g * rho.point(j)[k];
    }
    for (std::size_t k = 0; k < d; ++k) defects[i * d + k] -= mu.weight(i) * mu.point(i)[k];
  }
  return defects;
}

}  // namespace

double strassen_violation(const DiscreteMeasure& mu, const DiscreteMeasure& rho,
                          const conic::Settings& settings) {
  check_same_dim(mu, rho);
  double violation = 0.0;
  for (double v : strassen_defects(mu, rho, settings)) violation += std::abs(v);
  return violation;
}

bool strassen_feasible(const DiscreteMeasure& mu, const DiscreteMeasure& rho, double tol,
                       const conic::Settings& settings) {
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  check_same_dim(mu, rho);
  if (identical(mu, rho)) return true;
  // relative residual of the martingale rows, as the solver measures primal residuals
  double rhs = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    rhs = std::max(rhs, mu.weight(i));
    for (double v : mu.point(i)) rhs = std::max(rhs, mu.weight(i) * std::abs(v));
  }
  for (double w : rho.weights()) rhs = std::max(rhs, w);
  double worst = 0.0;
  for (double v : strassen_defects(mu, rho, settings)) worst = std::max(worst, std::abs(v));
  return worst / (1.0 + rhs) <= tol;
}

std::string diagnostics_json(const OrderDiagnostics& diag) {
  nlohmann::ordered_json j;
  j["z2"] = round12(diag.z2);
  j["c"] = round12(diag.c_value);
  j["alpha"] = diag.alpha ? nlohmann::ordered_json(round12(*diag.alpha)) : nlohmann::ordered_json();
  j["proj_forward"] = round12(diag.forward_projection_distance);
  j["proj_backward"] = round12(diag.backward_projection_distance);
  nlohmann::ordered_json res = nlohmann::ordered_json::object();
  for (const auto& [k, v] : diag.residuals) res[k] = round12(v);
  j["residuals"] = res;
  return j.dump();
}

}  // namespace bmot
