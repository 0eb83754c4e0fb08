#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace caradory;
using Catch::Matchers::ContainsSubstring;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "caradory");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "caradory_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty() && l[0] != '#') out.push_back(l);
  }
  return out;
}

}  // namespace

TEST_CASE("fcfw on a sparse random instance", "[cli]") {
  const Outcome o = call({"solve", "--algo", "fcfw", "--p", "2", "--epsilon", "0.02", "--gen", "random", "--n", "100",
                          "--m", "101", "--k", "10", "--seed", "7"});
  CHECK(o.code == 0);
  CHECK_THAT(o.out, ContainsSubstring("status=converged"));
  const auto pos = o.out.find("cardinality=");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stoul(o.out.substr(pos + 12)) <= 10);
}

TEST_CASE("loose epsilon exits at t = 0", "[cli]") {
  const auto path = scratch("loose.csv");
  const Outcome o = call({"solve", "--algo", "fw", "--p", "3", "--epsilon", "1e9", "--gen", "random", "--n", "10",
                          "--m", "12", "--k", "12", "--out", path.string()});
  CHECK(o.code == 0);
  CHECK_THAT(o.out, ContainsSubstring("iterations=0"));
  const auto rows = data_lines(slurp(path));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == kTraceCsvColumns);
  CHECK(rows[1].rfind("0,", 0) == 0);
}

TEST_CASE("configuration errors exit 1", "[cli]") {
  const Outcome h = call({"solve", "--algo", "hcgs", "--p", "2", "--gen", "random", "--n", "5", "--m", "6", "--k", "3"});
  CHECK(h.code == 1);
  CHECK_THAT(h.err, ContainsSubstring("hcgs requires p in [1,2) or inf"));
  CHECK(call({"solve", "--algo", "nope"}).code == 1);
  CHECK(call({"solve", "--unknown-flag"}).code == 1);
  CHECK(call({"solve", "--algo", "fw", "--epsilon", "-1"}).code == 1);
  CHECK(call({"solve", "--algo", "fw", "--p", "abc"}).code == 1);
  CHECK(call({}).code == 1);
  CHECK(call({"solve", "--instance", "/nonexistent.json"}).code == 1);
  const Outcome outside = call({"solve", "--algo", "fw", "--gen", "ball", "--n", "3", "--offset", "5"});
  CHECK(outside.code == 1);
  CHECK_THAT(outside.err, ContainsSubstring("--project"));
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("malformed instance file exits 1 with a field diagnostic", "[cli]") {
  const auto path = scratch("bad.json");
  std::ofstream(path) << R"({"kind": "random", "vertices": [[1, 2]], "target": [1, "x"], "p": 2})";
  const Outcome o = call({"solve", "--instance", path.string()});
  CHECK(o.code == 1);
  CHECK_THAT(o.err, ContainsSubstring("target[1]"));
}

TEST_CASE("iteration cap exits 2", "[cli]") {
  const Outcome o = call({"solve", "--algo", "fw", "--p", "2", "--epsilon", "1e-9", "--gen", "random", "--n", "20",
                          "--m", "30", "--k", "30", "--max-iter", "5"});
  CHECK(o.code == 2);
  CHECK_THAT(o.out, ContainsSubstring("status=iter-cap"));
}

TEST_CASE("json trace round trip", "[cli]") {
  const auto path = scratch("trace.json");
  const Outcome o = call({"solve", "--algo", "fw-open", "--p", "3", "--epsilon", "0.05", "--gen", "random", "--n", "10",
                          "--m", "15", "--k", "15", "--seed", "3", "--format", "json", "--out", path.string(), "--bound",
                          "thm1"});
  REQUIRE(o.code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(path));
  const RunTrace tr = trace_from_json(j.at("trace"));
  CHECK(to_json(tr) == j.at("trace"));
  CHECK(j.at("header").at("seed") == "3");
  CHECK(j.at("envelope").at("bound") == "thm1-open");
  CHECK(j.at("envelope").at("values").size() == tr.records.size());

  const Instance inst = gen_random_polytope(10, 15, 15, 3);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::FW;
  cfg.step = StepRule::OpenLoop;
  cfg.epsilon = 0.05;
  cfg.max_iter = 1000000;
  const RunTrace direct = fw_solve(inst.set, inst.objective(3.0), cfg).trace;
  CHECK(direct.same_path(tr));
  CHECK_THAT(o.out, ContainsSubstring("violations=0"));
}

TEST_CASE("projection mode on a ball", "[cli]") {
  const Outcome o = call({"solve", "--algo", "fw", "--p", "2", "--epsilon", "1e-4", "--gen", "ball", "--n", "10", "--q",
                          "2", "--radius", "1", "--project", "--bound", "thm3"});
  CHECK(o.code == 0);
  CHECK_THAT(o.out, ContainsSubstring("distance=1"));
  CHECK_THAT(o.out, ContainsSubstring("violations=0"));
}

TEST_CASE("bench orders rows and writes curves", "[cli][bench]") {
  const auto path = scratch("bench.csv");
  const Outcome o = call({"bench", "--algo", "fcfw,fw", "--p", "3,2", "--seeds", "3", "--epsilon", "0.05", "--gen",
                          "random", "--n", "20", "--m", "25", "--k", "25", "--threads", "4", "--out", path.string()});
  REQUIRE(o.code == 0);
  const auto rows = data_lines(o.out);
  REQUIRE(rows.size() == 13);
  CHECK(rows[0] == "algorithm,seed,p,cardinality,iterations,accuracy,status");
  CHECK(rows[1].rfind("fcfw,0,2,", 0) == 0);
  CHECK(rows[2].rfind("fcfw,0,3,", 0) == 0);
  CHECK(rows[3].rfind("fcfw,1,2,", 0) == 0);
  CHECK(rows[7].rfind("fw,0,2,", 0) == 0);
  CHECK(rows[12].rfind("fw,2,3,", 0) == 0);
  CHECK(data_lines(slurp(path)) == rows);
  CHECK(std::filesystem::exists(path.string() + ".curves.csv"));

  const Outcome again = call({"bench", "--algo", "fcfw,fw", "--p", "3,2", "--seeds", "3", "--epsilon", "0.05", "--gen",
                              "random", "--n", "20", "--m", "25", "--k", "25", "--threads", "1"});
  // Only the threads comment differs.
  CHECK(data_lines(again.out) == rows);

  const Outcome single = call({"bench", "--algo", "fw", "--p", "2", "--seeds", "1", "--gen", "random", "--n", "5",
                               "--m", "6", "--k", "6"});
  CHECK(data_lines(single.out).size() == 2);
  CHECK(call({"bench", "--algo", "fw,hcgs", "--p", "2", "--gen", "random"}).code == 1);
}

TEST_CASE("hadamard bench emits the lower-bound curve", "[cli][bench]") {
  const auto path = scratch("had.csv");
  const Outcome o = call({"bench", "--algo", "fcfw", "--p", "4", "--seeds", "1", "--epsilon", "0.1", "--gen",
                          "hadamard", "--n", "64", "--out", path.string()});
  CHECK(o.code == 0);
  const auto lb = data_lines(slurp(path.string() + ".lower_bound.csv"));
  REQUIRE(lb.size() == 65);
  CHECK(lb[0] == "s,epsilon");
  CHECK(lb[16].rfind("16,0.2165", 0) == 0);
}

TEST_CASE("hadamard, lower-bound and oracle subcommands", "[cli]") {
  const Outcome h = call({"hadamard", "--n", "4", "--p", "inf"});
  REQUIRE(h.code == 0);
  const Instance inst = parse_instance(h.out);
  CHECK(std::get<VertexSet>(inst.set).size() == 4);
  CHECK(std::isinf(inst.p));
  CHECK(call({"hadamard", "--n", "6"}).code == 1);

  const Outcome l = call({"lower-bound", "--n", "64", "--epsilon", "0.25"});
  CHECK(l.code == 0);
  CHECK_THAT(l.out, ContainsSubstring("bound=12.8"));

  const auto path = scratch("tri.json");
  std::ofstream(path) << R"({"kind": "custom", "vertices": [[0,0],[1,0],[0,1]], "target": [0.25, 0.5], "p": 2})";
  const Outcome o = call({"oracle", "--instance", path.string()});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(j.at("minimal_cardinality") == 3);
  CHECK(j.at("distance") == 0.0);
}

TEST_CASE("built executable reports exit codes", "[cli][process]") {
  const std::string exe = CARADORY_CLI_PATH;
  CHECK(WEXITSTATUS(std::system((exe + " lower-bound --n 64 --epsilon 0.5 > /dev/null").c_str())) == 0);
  CHECK(WEXITSTATUS(std::system((exe + " solve --algo hcgs --p 2 --gen random --n 5 --m 6 --k 3 2> /dev/null").c_str())) == 1);
  CHECK(WEXITSTATUS(std::system(("CARADORY_THREADS=2 " + exe +
                                 " bench --algo fw --p 2 --seeds 2 --gen random --n 5 --m 6 --k 6 | grep -q threads=2")
                                    .c_str())) == 0);
}
