#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bmot/analysis.hpp"
#include "bmot/cdf1d.hpp"
#include "bmot/error.hpp"
#include "bmot/m2ot.hpp"
#include "bmot/measure_io.hpp"
#include "bmot/motapprox.hpp"

namespace bmot::cli {
namespace {

using json = nlohmann::ordered_json;

struct CliConfig {
  double tol = 1e-8;
  std::size_t max_iter = 200000;
  bool recentre = false;
  std::string format;  // empty: per-command default
  std::string svg;
  double p = 2.0;
  double epsilon_exponent = 0.5;
  bool warm_start = false;
  double gamma_floor = kDefaultGammaFloor;
  double merge_radius = -1.0;
  double strassen_tol = 1e-7;
  std::string dump_program;

  conic::Settings settings() const {
    if (!(tol > 0.0)) throw InputError("--tol must be positive");
    if (max_iter == 0) throw InputError("--max-iter must be positive");
    conic::Settings s;
    s.tol_feas = tol;
    s.tol_gap = tol;
    s.max_iter = max_iter;
    return s;
  }
};

double r12(double v) { return std::stod(format_report(v)); }

std::string measure_csv(const DiscreteMeasure& m) {
  std::ostringstream out;
  out << "weight";
  for (std::size_t k = 1; k <= m.dim(); ++k) out << ",x" << k;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << format_report(m.weight(i));
    for (double x : m.point(i)) out << ',' << format_report(x);
    out << '\n';
  }
  return out.str();
}

json measure_json(const DiscreteMeasure& m) {
  json atoms = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json x = json::array();
    for (double v : m.point(i)) x.push_back(r12(v));
    atoms.push_back({{"w", r12(m.weight(i))}, {"x", x}});
  }
  return {{"dim", m.dim()}, {"atoms", atoms}};
}

std::pair<DiscreteMeasure, DiscreteMeasure> load_pair(const std::string& a, const std::string& b,
                                                      const CliConfig& cfg) {
  DiscreteMeasure mu = read_measure_file(a);
  DiscreteMeasure nu = read_measure_file(b);
  if (mu.dim() != nu.dim()) throw InputError("measures have different dimensions");
  if (cfg.recentre) nu = recentre(nu, barycentre(mu));
  return {std::move(mu), std::move(nu)};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

void maybe_dump(const CliConfig& cfg, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                const ObjectiveSpec& spec) {
  if (cfg.dump_program.empty()) return;
  const auto [prog, map] = build(mu, nu, spec);
  std::ofstream f(cfg.dump_program, std::ios::binary);
  if (!f) throw InputError("cannot write " + cfg.dump_program);
  conic::write_program_dump(prog, f);
}

void emit_key_values(std::ostream& out, const json& j, const std::string& format) {
  if (format == "csv") {
    out << "key,value\n";
    for (const auto& [k, v] : j.items()) {
      if (v.is_object()) {
        for (const auto& [k2, v2] : v.items()) out << k << '.' << k2 << ',' << v2.dump() << '\n';
      } else {
        out << k << ',' << (v.is_null() ? "" : v.dump()) << '\n';
      }
    }
  } else {
    out << j.dump() << '\n';
  }
}

void emit_measure(std::ostream& out, const DiscreteMeasure& m, const CliConfig& cfg, json extra) {
  if (cfg.format == "csv") {
    for (const auto& [k, v] : extra.items()) out << "# " << k << '=' << v.dump() << '\n';
    out << measure_csv(m);
  } else {
    extra["rho"] = measure_json(m);
    out << extra.dump() << '\n';
  }
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> ns;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
    if (tok.empty()) continue;
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw InputError("bad n value '" + tok + "'");
    }
    if (used != tok.size() || n < 1) throw InputError("bad n value '" + tok + "'");
    ns.push_back(n);
  }
  if (ns.empty()) throw InputError("empty n list");
  return ns;
}

std::vector<double> read_cost_matrix(const std::string& path, std::size_t rows, std::size_t cols) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  std::vector<double> c;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        c.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("bad cost entry '" + cell + "'");
      }
    }
  }
  if (c.size() != rows * cols) throw InputError("cost file must hold an n_mu x n_nu matrix");
  return c;
}

int cmd_mot_approx(const CliConfig& cfg, const std::vector<std::string>& files, bool demo,
                   const std::string& demo_list, const std::string& cost_kind,
                   const std::string& n_list, std::ostream& out) {
  std::vector<int> ns;
  std::vector<double> eps;
  std::function<MotInstance(int)> data;
  if (demo) {
    ns = demo_list.empty() ? default_demo_ns() : parse_n_list(demo_list);
    std::vector<double> gaps;
    for (int n : ns) gaps.push_back(instability_gap(n));
    eps = epsilon_schedule(gaps, cfg.epsilon_exponent);
    data = instability_demo;
  } else {
    if (files.size() < 2) throw InputError("mot-approx needs mu and at least one nu file, or --demo");
    const DiscreteMeasure mu = read_measure_file(files[0]);
    std::vector<DiscreteMeasure> nus;
    for (std::size_t k = 1; k < files.size(); ++k) {
      DiscreteMeasure nu = read_measure_file(files[k]);
      if (cfg.recentre) nu = recentre(nu, barycentre(mu));
      nus.push_back(std::move(nu));
    }
    if (n_list.empty()) {
      for (std::size_t k = 0; k < nus.size(); ++k) ns.push_back(static_cast<int>(k + 1));
    } else {
      ns = parse_n_list(n_list);
      if (ns.size() != nus.size()) throw InputError("--ns needs one value per nu file");
    }
    eps = fallback_schedule(ns);
    std::vector<double> file_cost;
    if (cost_kind != "l1" && cost_kind != "l2") {
      file_cost = read_cost_matrix(cost_kind, mu.size(), nus.front().size());
    }
    data = [mu, nus, ns, cost_kind, file_cost](int n) {
      const std::size_t k = static_cast<std::size_t>(std::find(ns.begin(), ns.end(), n) - ns.begin());
      const DiscreteMeasure& nu = nus.at(k);
      std::vector<double> c;
      if (cost_kind == "l1") {
        c = cost_l1(mu, nu);
      } else if (cost_kind == "l2") {
        c = cost_l2(mu, nu);
      } else {
        c = file_cost;
      }
      return MotInstance{mu, nu, std::move(c)};
    };
  }
  const ConvergenceReport rep =
      run_sequence(data, ns, eps, cfg.warm_start, cfg.settings(), cfg.gamma_floor);
  if (cfg.format == "csv") {
    out << report_csv(rep);
  } else {
    json recs = json::array();
    for (const ConvergenceRecord& r : rep.records) {
      recs.push_back({{"n", r.n},
                      {"epsilon", r12(r.epsilon)},
                      {"cost", r12(r.transport_cost)},
                      {"penalty", r12(r.penalty_value)},
                      {"c_n", r12(r.c_n)},
                      {"res1", r12(r.res1)},
                      {"res2", r12(r.res2)},
                      {"iterations", r.iterations},
                      {"status", r.status}});
    }
    out << json{{"records", recs}, {"limit_estimate", r12(rep.limit_estimate)}}.dump() << '\n';
  }
  if (!cfg.svg.empty()) write_file(cfg.svg, report_svg(rep));
  if (!rep.complete) throw SolverError(rep.error);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bi-martingale optimal transport toolkit", "bmot"};
  app.require_subcommand(1);
  app.fallthrough();

  CliConfig cfg;
  app.add_option("--tol", cfg.tol, "Solver feasibility and gap tolerance");
  app.add_option("--max-iter", cfg.max_iter, "Solver iteration budget");
  app.add_flag("--recentre", cfg.recentre, "Translate nu onto the barycentre of mu");
  app.add_option("--format", cfg.format, "Output format (default csv for measures and reports, json otherwise)")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--svg", cfg.svg, "Write an SVG plot (mot-approx)");
  app.add_option("--p", cfg.p, "Exponent of the dominance cost |z|^p");
  app.add_option("--epsilon-exponent", cfg.epsilon_exponent, "Exponent of the epsilon schedule");
  app.add_flag("--warm-start", cfg.warm_start, "Warm start successive solves");
  app.add_option("--gamma-floor", cfg.gamma_floor, "Plan entries at or below are dropped");
  app.add_option("--merge-radius", cfg.merge_radius, "Atom merge radius for rho (default relative)");
  app.add_option("--dump-program", cfg.dump_program, "Write the conic program as sparse triplets");

  std::string a_file, b_file;
  auto add_pair = [&](CLI::App* sub, const char* second) {
    sub->add_option("mu", a_file, "First measure (CSV or JSON)")->required();
    sub->add_option(second, b_file, "Second measure (CSV or JSON)")->required();
  };

  CLI::App* z2_cmd = app.add_subcommand("z2", "Zolotarev-2 distance and order diagnostics");
  add_pair(z2_cmd, "nu");
  CLI::App* dom_cmd = app.add_subcommand("dominate", "Optimal convex dominant for |z|^p");
  add_pair(dom_cmd, "nu");
  CLI::App* proj_cmd = app.add_subcommand("project", "Zolotarev projection mu v nu");
  add_pair(proj_cmd, "nu");
  CLI::App* idx_cmd = app.add_subcommand("index", "Convex-order index alpha(nu|mu)");
  add_pair(idx_cmd, "nu");
  CLI::App* w2_cmd = app.add_subcommand("w2", "Quadratic Wasserstein distance");
  add_pair(w2_cmd, "nu");
  CLI::App* lub_cmd = app.add_subcommand("lub1d", "Least upper bound in convex order on R");
  add_pair(lub_cmd, "nu");
  CLI::App* str_cmd = app.add_subcommand("strassen", "Is rho a convex dominant of mu?");
  add_pair(str_cmd, "rho");
  str_cmd->add_option("--strassen-tol", cfg.strassen_tol, "Violation tolerance");

  CLI::App* mot_cmd = app.add_subcommand("mot-approx", "Penalized approximation of MOT");
  std::vector<std::string> mot_files;
  std::string demo_list, cost_kind = "l1", n_list;
  mot_cmd->add_option("files", mot_files, "mu followed by nu_1 ... nu_k");
  CLI::Option* demo_opt =
      mot_cmd->add_option("--demo", demo_list, "Instability demo, comma separated n values")
          ->expected(0, 1);
  mot_cmd->add_option("--cost", cost_kind, "l1, l2 or a CSV cost matrix file");
  mot_cmd->add_option("--ns", n_list, "n value per nu file");

  CLI::App* demo_cmd = app.add_subcommand("demo-instability", "Write the instability demo data");
  int demo_n = 1;
  demo_cmd->add_option("n", demo_n, "Index n of the rotated target")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  // measures and reports default to CSV, diagnostics to JSON
  if (cfg.format.empty()) {
    const bool tabular = dom_cmd->parsed() || proj_cmd->parsed() || lub_cmd->parsed() || mot_cmd->parsed();
    cfg.format = tabular ? "csv" : "json";
  }

  try {
    if (z2_cmd->parsed() || idx_cmd->parsed()) {
      const auto [mu, nu] = load_pair(a_file, b_file, cfg);
      maybe_dump(cfg, mu, nu, ObjectiveSpec::quadratic());
      const OrderDiagnostics d = z2(mu, nu, cfg.settings());
      json j = json::parse(diagnostics_json(d));
      if (idx_cmd->parsed()) {
        j = json{{"alpha", j["alpha"]}, {"z2", j["z2"]}, {"ordered", nullptr}};
        if (d.alpha) {
          const double a = *d.alpha;
          j["ordered"] = a > 1.0 - 1e-6 ? "mu <=c nu" : (a < -1.0 + 1e-6 ? "nu <=c mu" : "none");
        } else {
          j["ordered"] = "equal";
        }
      }
      emit_key_values(out, j, cfg.format);
    } else if (dom_cmd->parsed()) {
      const auto [mu, nu] = load_pair(a_file, b_file, cfg);
      const ObjectiveSpec spec = ObjectiveSpec::dominance(cfg.p);
      maybe_dump(cfg, mu, nu, spec);
      const BiMartingalePlan plan = solve_m2ot(mu, nu, spec, cfg.settings(), nullptr, cfg.gamma_floor);
      const DiscreteMeasure rho = pushforward_rho(plan, cfg.merge_radius);
      emit_measure(out, rho, cfg,
                   {{"p", r12(cfg.p)}, {"cost", r12(plan.objective)}, {"iterations", plan.report.iterations}});
    } else if (proj_cmd->parsed()) {
      const auto [mu, nu] = load_pair(a_file, b_file, cfg);
      maybe_dump(cfg, mu, nu, ObjectiveSpec::quadratic());
      DiscreteMeasure rho = mu;
      if (!identical(mu, nu)) {
        const BiMartingalePlan plan =
            solve_m2ot(mu, nu, ObjectiveSpec::quadratic(), cfg.settings(), nullptr, cfg.gamma_floor);
        rho = pushforward_rho(plan, cfg.merge_radius);
      }
      emit_measure(out, rho, cfg, {{"m2", r12(moment(rho, 2.0))}});
    } else if (w2_cmd->parsed()) {
      const auto [mu, nu] = load_pair(a_file, b_file, cfg);
      emit_key_values(out, {{"w2", r12(wasserstein2(mu, nu, cfg.settings()))}}, cfg.format);
    } else if (lub_cmd->parsed()) {
      const auto [mu, nu] = load_pair(a_file, b_file, cfg);
      const DiscreteMeasure rho = lub_1d(mu, nu);
      emit_measure(out, rho, cfg, {{"m2", r12(moment(rho, 2.0))}});
    } else if (str_cmd->parsed()) {
      const auto [mu, rho] = load_pair(a_file, b_file, cfg);
      const double v = identical(mu, rho) ? 0.0 : strassen_violation(mu, rho, cfg.settings());
      const bool ok = strassen_feasible(mu, rho, cfg.strassen_tol, cfg.settings());
      emit_key_values(out, {{"feasible", ok}, {"violation", r12(v)}}, cfg.format);
    } else if (mot_cmd->parsed()) {
      const bool demo = demo_opt->count() > 0;
      // `--demo` alone selects the default list; an explicit empty value is an error
      for (std::size_t k = 0; k < args.size(); ++k) {
        const bool empty_value = args[k] == "--demo=" || (args[k] == "--demo" && k + 1 < args.size() && args[k + 1].empty());
        if (empty_value) throw InputError("empty n list");
      }
      return cmd_mot_approx(cfg, mot_files, demo, demo_list, cost_kind, n_list, out);
    } else if (demo_cmd->parsed()) {
      const MotInstance d = instability_demo(demo_n);
      json cost = json::array();
      for (std::size_t i = 0; i < d.mu.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < d.nu.size(); ++j) row.push_back(r12(d.cost[i * d.nu.size() + j]));
        cost.push_back(row);
      }
      if (cfg.format == "csv") {
        out << "# mu\n" << measure_csv(d.mu) << "# nu\n" << measure_csv(d.nu);
      } else {
        out << json{{"n", demo_n}, {"mu", measure_json(d.mu)}, {"nu", measure_json(d.nu)}, {"cost", cost}}
                   .dump()
            << '\n';
      }
    }
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 1;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace bmot::cli
