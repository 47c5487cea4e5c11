#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = bmot::cli::run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

std::string put(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "bmot_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kMu61 = "weight,x1,x2\n0.25,-1,0\n0.25,1,0\n0.25,-2,0\n0.25,2,0\n";
const std::string kNu61 = "weight,x1,x2\n0.25,0,-1\n0.25,0,1\n0.25,0,-2\n0.25,0,2\n";

}  // namespace

TEST_CASE("z2 command") {
  const std::string mu = put("mu61.csv", kMu61);
  const std::string nu = put("nu61.csv", kNu61);

  const Run same = run({"z2", mu, mu});
  REQUIRE(same.code == 0);
  const json js = json::parse(same.out);
  CHECK(js["z2"].get<double>() == 0.0);
  CHECK(js["alpha"].is_null());

  const Run r = run({"z2", mu, nu});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["z2"].get<double>() - 2.5) <= 1e-4);
  CHECK(std::abs(j["c"].get<double>() - 5.0) <= 1e-4);
  CHECK(j.contains("residuals"));

  // deterministic
  CHECK(run({"z2", mu, nu}).out == r.out);

  const Run csv = run({"--format", "csv", "z2", mu, nu});
  CHECK(csv.code == 0);
  CHECK(csv.out.find("z2,") != std::string::npos);
}

TEST_CASE("exit codes") {
  const std::string mu = put("mu61.csv", kMu61);
  const std::string one = put("one.csv", "weight,x\n0.5,-1\n0.5,1\n");
  CHECK(run({"z2", mu, one}).code == 1);
  CHECK(run({"z2", mu, "/nonexistent/file.csv"}).code == 1);
  CHECK(run({"z2", mu}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"--tol", "-1", "z2", mu, mu}).code == 1);
  const std::string nu = put("nu61.csv", kNu61);
  const Run fail = run({"--max-iter", "1", "z2", mu, nu});
  CHECK(fail.code == 2);
  CHECK_FALSE(fail.err.empty());
  CHECK(run({"--help"}).code == 0);

  // barycentres differ unless recentred
  const std::string shifted = put("shift.csv", "weight,x\n0.5,0\n0.5,2\n");
  CHECK(run({"z2", one, shifted}).code == 1);
  CHECK(run({"--recentre", "z2", one, shifted}).code == 0);
}

TEST_CASE("dominate, project and lub1d") {
  const std::string d0 = put("d0.csv", "weight,x\n1,0\n");
  const std::string pm = put("pm.csv", "weight,x\n0.5,-1\n0.5,1\n");
  const std::string three = put("three.csv", "weight,x\n0.2,-2\n0.6,0\n0.2,2\n");

  const Run dom = run({"--format", "json", "dominate", d0, pm});
  REQUIRE(dom.code == 0);
  const json j = json::parse(dom.out);
  CHECK(std::abs(j["cost"].get<double>() - 1.0) <= 1e-6);
  CHECK(j["rho"]["atoms"].size() == 2);

  const Run lub = run({"--format", "json", "lub1d", pm, three});
  REQUIRE(lub.code == 0);
  const double m2 = json::parse(lub.out)["m2"].get<double>();
  CHECK(std::abs(m2 - 5.0 / 3.0) <= 1e-11);

  const Run pr = run({"--format", "json", "project", pm, three});
  REQUIRE(pr.code == 0);
  CHECK(std::abs(json::parse(pr.out)["m2"].get<double>() - m2) <= 1e-6);

  const Run csv = run({"dominate", pm, three});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.find("# cost=") != std::string::npos);
  CHECK(csv.out.find("weight,x1") != std::string::npos);

  const Run p4 = run({"--p", "4", "--format", "json", "dominate", pm, three});
  REQUIRE(p4.code == 0);
  CHECK(std::abs(json::parse(p4.out)["cost"].get<double>() - 173.0 / 27.0) <= 1e-5);

  CHECK(run({"--p", "1", "dominate", pm, three}).code == 1);
}

TEST_CASE("index, w2 and strassen") {
  const std::string d0 = put("d0.csv", "weight,x\n1,0\n");
  const std::string pm = put("pm.csv", "weight,x\n0.5,-1\n0.5,1\n");
  const Run idx = run({"index", d0, pm});
  REQUIRE(idx.code == 0);
  const json j = json::parse(idx.out);
  CHECK(std::abs(j["alpha"].get<double>() - 1.0) <= 1e-5);
  CHECK(j["ordered"] == "mu <=c nu");

  const Run w = run({"w2", d0, pm});
  REQUIRE(w.code == 0);
  CHECK(std::abs(json::parse(w.out)["w2"].get<double>() - 1.0) <= 1e-6);

  CHECK(json::parse(run({"strassen", d0, pm}).out)["feasible"] == true);
  CHECK(json::parse(run({"strassen", pm, d0}).out)["feasible"] == false);
}

TEST_CASE("mot-approx") {
  const Run r = run({"--format", "csv", "mot-approx", "--demo", "3,5,20"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,epsilon,cost,penalty,c_n,res1,res2,iterations,status");
  const double expected[] = {0.9223, 0.8209, 0.6928};
  for (double e : expected) {
    REQUIRE(std::getline(in, line));
    std::istringstream row(line);
    std::string n, eps, cost;
    std::getline(row, n, ',');
    std::getline(row, eps, ',');
    std::getline(row, cost, ',');
    CHECK(std::abs(std::stod(cost) - e) <= 1e-3);
  }

  CHECK(run({"mot-approx", "--demo", ""}).code == 1);
  CHECK(run({"mot-approx", "--demo="}).code == 1);
  CHECK(run({"mot-approx", "--demo", "5,3"}).code == 1);

  // file based run on constant ordered data against its exact value
  const std::string mu = put("omu.csv", "weight,x\n0.5,-1\n0.5,1\n");
  const std::string nu = put("onu.csv", "weight,x\n0.25,-2\n0.25,-0.5\n0.25,0.5\n0.25,2\n");
  const std::string svg = (fs::temp_directory_path() / "bmot_cli_test" / "plot.svg").string();
  const Run f = run({"--format", "csv", "--svg", svg, "mot-approx", "--cost", "l1", "--ns", "4,100", mu, nu, nu});
  REQUIRE(f.code == 0);
  CHECK(slurp(svg).find("<svg") != std::string::npos);
}

TEST_CASE("demo-instability") {
  const Run r = run({"demo-instability", "1"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["n"] == 1);
  CHECK(j["cost"].size() == 2);
  CHECK(run({"demo-instability", "0"}).code == 1);
}

TEST_CASE("program dump is reproducible") {
  const std::string mu = put("mu61.csv", kMu61);
  const std::string nu = put("nu61.csv", kNu61);
  const std::string a = (fs::temp_directory_path() / "bmot_cli_test" / "a.txt").string();
  const std::string b = (fs::temp_directory_path() / "bmot_cli_test" / "b.txt").string();
  REQUIRE(run({"--dump-program", a, "z2", mu, nu}).code == 0);
  REQUIRE(run({"--dump-program", b, "z2", mu, nu}).code == 0);
  const std::string da = slurp(a);
  CHECK_FALSE(da.empty());
  CHECK(da == slurp(b));
  CHECK(da.rfind("24 64 ", 0) == 0);
}
