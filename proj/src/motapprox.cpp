#include "bmot/motapprox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bmot/analysis.hpp"
#include "bmot/error.hpp"
#include "bmot/measure_io.hpp"

namespace bmot {

std::vector<double> epsilon_schedule(const std::vector<double>& z2_gaps, double exponent) {
  if (!(exponent > 0.0 && exponent < 1.0)) throw InputError("epsilon exponent must lie in (0, 1)");
  std::vector<double> eps;
  eps.reserve(z2_gaps.size());
  for (double g : z2_gaps) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw InputError("gaps must be finite and nonnegative");
    eps.push_back(std::pow(std::max(g, kEpsilonFloor), exponent));
  }
  return eps;
}

std::vector<double> fallback_schedule(const std::vector<int>& ns, double eps0) {
  if (!(eps0 > 0.0)) throw InputError("eps0 must be positive");
  std::vector<double> eps;
  for (int n : ns) {
    if (n < 1) throw InputError("n must be positive");
    eps.push_back(eps0 / std::sqrt(static_cast<double>(n)));
  }
  return eps;
}

std::vector<double> cost_l1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<double> c;
  c.reserve(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) c.push_back(distance(mu.point(i), nu.point(j)));
  }
  return c;
}

std::vector<double> cost_l2(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<double> c = cost_l1(mu, nu);
  for (double& v : c) v *= v;
  return c;
}

MotInstance instability_demo(int n) {
  if (n < 1) throw InputError("n must be positive");
  const double theta = std::numbers::pi / (2.0 * n);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  DiscreteMeasure mu(2, {0.5, 0.5}, {-0.5, 0.0, 0.5, 0.0});
  DiscreteMeasure nu(2, {0.25, 0.25, 0.25, 0.25},
                     {-0.5 - c, -s, 0.5 - c, -s, -0.5 + c, s, 0.5 + c, s});
  std::vector<double> cost = cost_l1(mu, nu);
  return {std::move(mu), std::move(nu), std::move(cost)};
}

double instability_gap(int n) { return std::sqrt(5.0) * std::numbers::pi / (4.0 * n); }

std::vector<int> default_demo_ns() { return {1, 2, 3, 5, 10, 20, 50, 100, 200, 500, 1000}; }

namespace {

double classical_defect(const BiMartingalePlan& plan) {
  const std::size_t d = plan.dim;
  double total = 0.0;
  std::vector<double> acc(d);
  for (std::size_t i = 0; i < plan.n_mu(); ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t j = 0; j < plan.n_nu(); ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        acc[k] += plan.gamma_at(i, j) * (plan.nu.point(j)[k] - plan.mu.point(i)[k]);
      }
    }
    double s = 0.0;
    for (double v : acc) s += v * v;
    total += std::sqrt(s);
  }
  return total;
}

}  // namespace

ConvergenceReport run_sequence(const std::function<MotInstance(int)>& data_fn,
                               const std::vector<int>& ns, const std::vector<double>& epsilons,
                               bool warm_start, const conic::Settings& settings,
                               double gamma_floor) {
  if (ns.empty()) throw InputError("empty list of n");
  if (epsilons.size() != ns.size()) throw InputError("one epsilon per n is required");
  for (std::size_t k = 1; k < ns.size(); ++k) {
    if (ns[k] <= ns[k - 1]) throw InputError("n values must be strictly increasing");
    if (!(epsilons[k] < epsilons[k - 1])) throw InputError("epsilon must be strictly decreasing");
  }

  ConvergenceReport report;
  conic::WarmStart dom_ws;
  conic::WarmStart pen_ws;
  bool have_ws = false;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const MotInstance data = data_fn(ns[k]);
    ConvergenceRecord rec;
    rec.n = ns[k];
    rec.epsilon = epsilons[k];

    auto [dom_prog, dom_map] = build(data.mu, data.nu, ObjectiveSpec::dominance(2.0));
    const conic::SolveReport dom =
        conic::solve(dom_prog, settings, warm_start && have_ws ? &dom_ws : nullptr);
    if (dom.status != conic::SolveStatus::Optimal) {
      rec.status = "c_n:" + conic::to_string(dom.status);
      rec.iterations = dom.iterations;
      report.records.push_back(rec);
      report.complete = false;
      report.error = "C_n solve failed at n=" + std::to_string(ns[k]);
      break;
    }
    rec.c_n = dom.objective_value;

    auto [prog, map] = build(data.mu, data.nu, ObjectiveSpec::mot_penalty(data.cost, epsilons[k]));
    const conic::SolveReport sol =
        conic::solve(prog, settings, warm_start && have_ws ? &pen_ws : nullptr);
    rec.iterations = sol.iterations;
    rec.status = conic::to_string(sol.status);
    if (sol.status != conic::SolveStatus::Optimal) {
      report.records.push_back(rec);
      report.complete = false;
      report.error = "penalized solve failed at n=" + std::to_string(ns[k]);
      break;
    }
    const BiMartingalePlan plan = extract_plan(sol, map, gamma_floor);
    double sum_r = 0.0;
    for (double r : plan.r) sum_r += r;
    rec.transport_cost = plan.transport_cost;
    rec.penalty_value = (sum_r - rec.c_n) / (2.0 * epsilons[k]);
    std::tie(rec.res1, rec.res2) = martingale_residual(plan);
    rec.martingale_defect = classical_defect(plan);
    report.records.push_back(rec);
    report.limit_estimate = rec.transport_cost;

    if (warm_start) {
      dom_ws = {dom.x, dom.y};
      pen_ws = {sol.x, sol.y};
      have_ws = true;
    }
  }
  return report;
}

std::string report_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "n,epsilon,cost,penalty,c_n,res1,res2,iterations,status\n";
  for (const ConvergenceRecord& r : report.records) {
    out << r.n << ',' << format_report(r.epsilon) << ',' << format_report(r.transport_cost) << ','
        << format_report(r.penalty_value) << ',' << format_report(r.c_n) << ','
        << format_report(r.res1) << ',' << format_report(r.res2) << ',' << r.iterations << ','
        << r.status << '\n';
  }
  return out.str();
}

std::string report_svg(const ConvergenceReport& report) {
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 20, B = 50;
  std::vector<std::pair<double, double>> pts;
  for (const ConvergenceRecord& r : report.records) {
    if (r.status == "optimal") pts.emplace_back(std::log10(static_cast<double>(r.n)), r.transport_cost);
  }
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!pts.empty()) {
    double x0 = pts.front().first, x1 = pts.front().first;
    double y0 = pts.front().second, y1 = pts.front().second;
    for (auto [x, y] : pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    if (x1 - x0 < 1e-12) x1 = x0 + 1;
    if (y1 - y0 < 1e-12) y1 = y0 + 1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (auto [x, y] : pts) out << px(x) << ',' << py(y) << ' ';
    out << "\"/>\n";
    for (auto [x, y] : pts) {
      out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    out << "<text x=\"" << (W + L) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">log10 n</text>\n";
    out << "<text x=\"14\" y=\"" << (H - B + T) / 2
        << "\" font-size=\"13\" transform=\"rotate(-90 14 " << (H - B + T) / 2
        << ")\" text-anchor=\"middle\">transport cost</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << py(y0) << "\" text-anchor=\"end\" font-size=\"11\">"
        << format_report(y0) << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << py(y1) + 10
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_report(y1) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace bmot
