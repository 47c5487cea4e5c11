// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bmot/analysis.hpp"
#include "bmot/cdf1d.hpp"
#include "bmot/conic/cone.hpp"
#include "bmot/m2ot.hpp"
#include "bmot/motapprox.hpp"
#include "bmot/oracle.hpp"
#include "cli.hpp"
#include "generators.hpp"
#include "planted.hpp"

using namespace bmot;
using bmot::testing::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double integrate_pow(const DiscreteMeasure& m, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m.weight(i) * std::pow(std::abs(m.point(i)[0]), p);
  return s;
}

double sq(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return s;
}

bool on_lattice(const DiscreteMeasure& rho, double tol) {
  for (std::size_t i = 0; i < rho.size(); ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      const double a = std::abs(rho.point(i)[k]);
      if (std::min(std::abs(a - 1), std::abs(a - 2)) > tol) return false;
    }
  }
  return true;
}

// lattice example
Outcome criterion1() {
  Outcome o;
  const DiscreteMeasure mu(2, {0.25, 0.25, 0.25, 0.25}, {-1, 0, 1, 0, -2, 0, 2, 0});
  const DiscreteMeasure nu(2, {0.25, 0.25, 0.25, 0.25}, {0, -1, 0, 1, 0, -2, 0, 2});
  const auto t0 = std::chrono::steady_clock::now();
  const BiMartingalePlan plan = solve_m2ot(mu, nu, ObjectiveSpec::quadratic());
  const OrderDiagnostics d = order_diagnostics(plan);
  const DiscreteMeasure rho = pushforward_rho(plan);
  const double t = seconds_since(t0);
  const bool s1 = strassen_feasible(mu, rho);
  const bool s2 = strassen_feasible(nu, rho);
  o.require(std::abs(d.z2 - 2.5) <= 1e-4, fmt("z2 = %.10g", d.z2));
  o.require(std::abs(d.c_value - 5.0) <= 1e-4, fmt("C = %.10g", d.c_value));
  o.require(std::abs(moment(rho, 2) - 5.0) <= 1e-4, fmt("m2(rho) = %.10g", moment(rho, 2)));
  o.require(on_lattice(rho, 1e-4), "rho leaves the lattice {+-1,+-2}^2");
  o.require(s1 && s2, "strassen check failed");
  o.require(t < 1.0, fmt("solve took %.3g s", t));
  if (o.pass) o.detail = fmt("Z2 = %.8f, C = %.8f, solve %.3f s", d.z2, d.c_value, t);
  return o;
}

// instability demo, through the CLI
Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream out, err;
  const int code = cli::run_cli({"--format", "csv", "mot-approx", "--demo"}, out, err);
  const double t = seconds_since(t0);
  o.require(code == 0, "mot-approx exit code " + std::to_string(code) + ": " + err.str());
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<int, double>> got;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string n, eps, cost;
    std::getline(row, n, ',');
    std::getline(row, eps, ',');
    std::getline(row, cost, ',');
    got.emplace_back(std::stoi(n), std::stod(cost));
  }
  auto cost_at = [&](int n) {
    for (const auto& [k, c] : got) {
      if (k == n) return c;
    }
    return std::nan("");
  };
  const double c3 = cost_at(3), c5 = cost_at(5), c20 = cost_at(20), c1000 = cost_at(1000);
  o.require(std::abs(c3 - 0.9223) <= 1e-3, fmt("n=3 cost %.6f", c3));
  o.require(std::abs(c5 - 0.8209) <= 1e-3, fmt("n=5 cost %.6f", c5));
  o.require(std::abs(c20 - 0.6928) <= 1e-3, fmt("n=20 cost %.6f", c20));
  o.require(std::abs(c1000 - 2.0 / 3.0) <= 5e-3, fmt("n=1000 cost %.6f", c1000));
  o.require(t < 30.0, fmt("demo took %.3g s", t));
  if (o.pass) {
    o.detail = fmt("costs %.4f / %.4f / %.4f", c3, c5, c20) + fmt(", n=1000 %.5f, %.2f s", c1000, t);
  }
  return o;
}

// 1D closed form
Outcome criterion3() {
  Outcome o;
  Rng rng(1003);
  double worst2 = 0.0, worstp = 0.0;
  for (int t = 0; t < 50; ++t) {
    const DiscreteMeasure a = bmot::testing::centred_measure(rng, 1, bmot::testing::pick(rng, 1, 12), 2.0);
    const DiscreteMeasure b = bmot::testing::centred_measure(rng, 1, bmot::testing::pick(rng, 1, 12), 2.0);
    const DiscreteMeasure l = lub_1d(a, b);
    const BiMartingalePlan q = solve_m2ot(a, b, ObjectiveSpec::quadratic());
    worst2 = std::max(worst2, std::abs(moment(pushforward_rho(q), 2) - moment(l, 2)));
    for (double p : {1.5, 4.0}) {
      const BiMartingalePlan plan = solve_m2ot(a, b, ObjectiveSpec::dominance(p));
      worstp = std::max(worstp, std::abs(plan.objective - integrate_pow(l, p)));
    }
  }
  o.require(worst2 <= 1e-6, fmt("max |m2 gap| = %.3g", worst2));
  o.require(worstp <= 1e-5, fmt("max |p-cost gap| = %.3g", worstp));
  if (o.pass) o.detail = fmt("50 pairs, max m2 gap %.2g, max p-cost gap %.2g", worst2, worstp);
  return o;
}

// identities in R^2 and R^3
Outcome criterion4() {
  Outcome o;
  Rng rng(1004);
  double cz = 0, tri = 0, disc = 0, slack = INFINITY;
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = t < 10 ? 2 : 3;
    const DiscreteMeasure mu = bmot::testing::centred_measure(rng, d, bmot::testing::pick(rng, 1, 10));
    const DiscreteMeasure nu = bmot::testing::centred_measure(rng, d, bmot::testing::pick(rng, 1, 10));
    const BiMartingalePlan plan = solve_m2ot(mu, nu, ObjectiveSpec::quadratic());
    const OrderDiagnostics dg = order_diagnostics(plan);
    const double m2m = moment(mu, 2), m2n = moment(nu, 2);
    cz = std::max(cz, std::abs(dg.z2 - (dg.c_value - 0.5 * (m2m + m2n))));

    const double m2r = moment(pushforward_rho(plan), 2);
    tri = std::max(tri, std::abs(dg.z2 - 0.5 * (m2r - m2m) - 0.5 * (m2r - m2n)));

    const double alpha = dg.alpha.value_or(0.0);
    double dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < plan.n_mu(); ++i) {
      for (std::size_t j = 0; j < plan.n_nu(); ++j) {
        if (!plan.has_zeta[i * plan.n_nu() + j]) continue;
        const auto z = plan.zeta_at(i, j);
        for (std::size_t k = 0; k < d; ++k) {
          dx += plan.gamma_at(i, j) * std::pow(z[k] - mu.point(i)[k], 2);
          dy += plan.gamma_at(i, j) * std::pow(z[k] - nu.point(j)[k], 2);
        }
      }
    }
    disc = std::max({disc, std::abs(dy - (1 - alpha) * dg.z2), std::abs(dx - (1 + alpha) * dg.z2)});

    const double w = wasserstein2(mu, nu);
    const double sm = std::sqrt(variance(mu)), sn = std::sqrt(variance(nu));
    slack = std::min({slack, dg.z2 - 0.25 * w * w, 0.5 * (sm + sn) * w - dg.z2});
  }
  o.require(cz <= 1e-6, fmt("CZ residual %.3g", cz));
  o.require(tri <= 1e-4, fmt("triangle residual %.3g", tri));
  o.require(disc <= 1e-4, fmt("discrepancy residual %.3g", disc));
  o.require(slack >= -1e-6, fmt("sandwich slack %.3g", slack));
  if (o.pass) {
    o.detail = fmt("20 pairs, CZ %.2g, triangle %.2g, ", cz, tri) +
               fmt("discrepancy %.2g, min sandwich slack %.2g", disc, slack);
  }
  return o;
}

// dilations
Outcome criterion5() {
  Outcome o;
  Rng rng(1005);
  double ea = 0, ez = 0, eb = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 1 + static_cast<std::size_t>(t % 3);
    const DiscreteMeasure mu = bmot::testing::centred_measure(rng, d, bmot::testing::pick(rng, 1, 6));
    const DiscreteMeasure nu = bmot::testing::dilate(rng, mu);
    const OrderDiagnostics f = z2(mu, nu);
    const OrderDiagnostics b = z2(nu, mu);
    ea = std::max(ea, std::abs(f.alpha.value_or(std::nan("")) - 1.0));
    eb = std::max(eb, std::abs(b.alpha.value_or(std::nan("")) + 1.0));
    ez = std::max(ez, std::abs(f.z2 - 0.5 * (moment(nu, 2) - moment(mu, 2))));
  }
  o.require(ea <= 1e-5, fmt("|alpha - 1| = %.3g", ea));
  o.require(eb <= 1e-5, fmt("|alpha + 1| = %.3g", eb));
  o.require(ez <= 1e-6, fmt("Z2 gap %.3g", ez));
  if (o.pass) o.detail = fmt("20 pairs, |alpha-1| %.2g, |alpha+1| %.2g, Z2 gap %.2g", ea, eb, ez);
  return o;
}

// grid oracle
Outcome criterion6() {
  Outcome o;
  Rng rng(1006);
  double below = INFINITY, excess = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 1 + static_cast<std::size_t>(t % 2);
    const DiscreteMeasure a = bmot::testing::centred_measure(rng, d, bmot::testing::pick(rng, 1, 3));
    const DiscreteMeasure b = bmot::testing::centred_measure(rng, d, bmot::testing::pick(rng, 1, 3));
    const double solver = solve_m2ot(a, b, ObjectiveSpec::quadratic()).objective;
    GridSpec g = GridSpec::covering(a, b, d == 1 ? 9 : 5);
    for (int level = 0; level < 3; ++level) {
      const double cost = grid_dominance_lp(a, b, sq, g).cost;
      below = std::min(below, cost - solver);
      // splitting each atom of an optimal rho between neighbouring nodes costs at most sum h_k^2 / 4
      double bound = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double h = (g.hi[k] - g.lo[k]) / static_cast<double>(g.counts[k] - 1);
        bound += h * h / 4.0;
      }
      excess = std::max(excess, (cost - solver) - bound);
      g = g.refined();
    }
  }
  o.require(below >= -1e-6, fmt("grid cost below solver by %.3g", -below));
  o.require(excess <= 1e-6, fmt("grid gap exceeds h^2/4 bound by %.3g", excess));
  if (o.pass) o.detail = fmt("20 instances x 3 grids, min gap %.2g, bound margin %.2g", below, -excess);
  return o;
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// solver unit suite
Outcome criterion7() {
  using namespace bmot::conic;
  Outcome o;
  Rng rng(1007);
  const std::vector<ConeBlock> cones{ConeBlock::nonnegative(4), ConeBlock::second_order(4), ConeBlock::power(0.5, 4),
                                     ConeBlock::power(0.3, 3), ConeBlock::power(0.8, 5)};
  double worst = 0.0;
  for (const ConeBlock& b : cones) {
    for (int t = 0; t < 1000; ++t) {
      const auto u = bmot::testing::random_vector(rng, b.size, 3.0);
      const auto v = bmot::testing::random_vector(rng, b.size, 3.0);
      const auto pu = project_cone(u, b);
      const auto pv = project_cone(v, b);
      worst = std::max(worst, dist(project_cone(pu, b), pu));
      worst = std::max(worst, dist(pu, pv) - dist(u, v));
      std::vector<double> neg(u);
      for (double& x : neg) x = -x;
      const auto pd = project_dual_cone(neg, b);
      double inner = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        worst = std::max(worst, std::abs(pu[k] - pd[k] - u[k]));
        inner += pu[k] * pd[k];
      }
      worst = std::max(worst, std::abs(inner));
    }
  }
  o.require(worst <= 1e-9, fmt("projection check off by %.3g", worst));

  const Settings settings;
  double gap = 0.0;
  int planted = 0;
  for (int t = 0; t < 40; ++t) {
    std::vector<ConeBlock> blocks{ConeBlock::nonnegative(bmot::testing::pick(rng, 2, 8))};
    if (t % 2 == 1) blocks.push_back(ConeBlock::second_order(bmot::testing::pick(rng, 2, 5)));
    if (t % 4 == 3) blocks.push_back(ConeBlock::second_order(3));
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.size;
    const auto pl = bmot::testing::plant(rng, blocks, bmot::testing::pick(rng, 1, n - 1));
    const SolveReport r = solve(pl.program, settings);
    o.require(r.status == SolveStatus::Optimal, "planted program not solved: " + to_string(r.status));
    const double err = std::abs(r.objective_value - pl.optimum);
    gap = std::max(gap, err / (1.0 + std::abs(pl.optimum)));
    ++planted;
  }
  o.require(gap <= settings.tol_gap, fmt("planted optimum off by %.3g", gap));
  if (o.pass) {
    o.detail = fmt("5 cones x 1000 points, worst %.2g; %.0f planted LP/SOCP, max rel gap %.2g", worst,
                   static_cast<double>(planted), gap);
  }
  return o;
}

DiscreteMeasure square_grid(int k) {
  std::vector<double> w, x;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      w.push_back(1.0 / (k * k));
      x.push_back(-0.5 + a / (k - 1.0));
      x.push_back(-0.5 + b / (k - 1.0));
    }
  }
  return DiscreteMeasure(2, w, x);
}

// square grid against five points
Outcome criterion8() {
  Outcome o;
  const DiscreteMeasure nu(2, {0.2, 0.2, 0.2, 0.2, 0.2}, {0.4, 0, -0.4, 0, 0, 0.4, 0, -0.4, 0, 0});
  auto t0 = std::chrono::steady_clock::now();
  const OrderDiagnostics small = z2(square_grid(41), nu);
  const double t41 = seconds_since(t0);
  const double a41 = small.alpha.value_or(std::nan(""));
  o.require(t41 < 60.0, fmt("41x41 took %.3g s", t41));
  o.require(a41 > -1.0 && a41 < -0.8, fmt("41x41 alpha %.6f", a41));

  t0 = std::chrono::steady_clock::now();
  const OrderDiagnostics full = z2(square_grid(121), nu);
  const double t121 = seconds_since(t0);
  const double a121 = full.alpha.value_or(std::nan(""));
  o.require(std::abs(a121 + 0.8898) <= 5e-3, fmt("121x121 alpha %.6f", a121));
  o.require(std::abs(full.z2 - 0.0233) <= 5e-4, fmt("121x121 Z2 %.6f", full.z2));
  if (o.pass) {
    o.detail = fmt("41x41 alpha %.4f (%.1f s); ", a41, t41) +
               fmt("121x121 alpha %.4f, Z2 %.5f", a121, full.z2) + fmt(" (%.1f s)", t121);
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 lattice example regression", criterion1},
      {"2 instability demo regression", criterion2},
      {"3 1D oracle equivalence", criterion3},
      {"4 identity suite", criterion4},
      {"5 order characterization", criterion5},
      {"6 oracle dominance bound", criterion6},
      {"7 solver unit suite", criterion7},
      {"8 square grid index", criterion8},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
