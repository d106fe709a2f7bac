#include "sscn/harness/config.hpp"
#include "sscn/harness/experiment.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace sscn;
using namespace sscn::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sscn_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

const char* kSmall = R"(
version = 1
objective.kind = synthetic_logistic
objective.n_features = 12
objective.n_samples = 60
stop.max_iters = 40
schedule.kind = constant
schedule.tau = 4
seeds = 0, 1, 2
output.timing = false
)";

}  // namespace

TEST_CASE("parse a single block config") {
  const auto cfg = parse_config(kSmall);
  CHECK(cfg.objective.kind == "synthetic_logistic");
  CHECK(cfg.objective.n_features == 12);
  CHECK(cfg.objective.lambda == 0.1);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 2});
  REQUIRE(cfg.blocks.size() == 1);
  CHECK(cfg.blocks[0].method == "sscn");
  CHECK(std::get<ConstantSchedule>(cfg.blocks[0].sscn.schedule).tau == 4);
  CHECK(cfg.blocks[0].sscn.stop.max_iters == 40);
  CHECK_FALSE(cfg.timing);
  CHECK(cfg.raw.at("objective.n_samples") == "60");
}

TEST_CASE("compare blocks override base keys") {
  const auto cfg = parse_config(std::string(kSmall) + R"(
compare.blocks = a, b
block.a.method = cd
block.b.schedule.tau_fraction = 0.5
block.b.m_policy.kind = fixed
block.b.m_policy.m = 3
)");
  REQUIRE(cfg.blocks.size() == 2);
  CHECK(cfg.compare);
  CHECK(cfg.blocks[0].name == "a");
  CHECK(cfg.blocks[0].method == "cd");
  CHECK(std::get<ConstantSchedule>(cfg.blocks[0].cd.schedule).tau == 4);
  CHECK(cfg.blocks[1].tau_fraction == 0.5);
  CHECK(std::get<FixedM>(cfg.blocks[1].sscn.m_policy).m == 3.0);
  auto b = cfg.blocks[1];
  resolve_dimension(b, 12);
  CHECK(std::get<ConstantSchedule>(b.sscn.schedule).tau == 6);
  CHECK(b.schedule_label == "constant:6");
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("objective.kind = quadratic\nfoo.bar = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("stop.max_iters = 10\nstop.max_iters = 20\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("stop.max_iters = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just some text\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("method = newton\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("version = 7\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("compare.blocks =\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("compare.blocks = a, b\nblock.c.method = cd\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("compare.blocks = a, b\nblock.a.nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seeds =\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("every documented key parses") {
  for (const auto& k : known_keys()) CHECK_FALSE(k.empty());
  CHECK(std::find(known_keys().begin(), known_keys().end(), "objective.lambda") != known_keys().end());
}

TEST_CASE("missing dataset") {
  ObjectiveSpec spec;
  spec.kind = "libsvm";
  spec.dataset = "/nonexistent/dataset.libsvm";
  CHECK_THROWS_AS(make_problem(spec), MissingData);
}

TEST_CASE("CSV header is fixed") {
  CHECK(trace_header(false) ==
        "run_id,method,seed,k,tau,f,grad_subset_norm,full_grad_norm,step_norm,M,coord_cost,cum_coord_cost,"
        "elapsed_s,m_retries");
  CHECK(trace_header(true) ==
        "run_id,method,schedule,seed,k,tau,f,grad_subset_norm,full_grad_norm,step_norm,M,coord_cost,"
        "cum_coord_cost,elapsed_s,m_retries");
}

TEST_CASE("run writes one CSV per seed and a consistent summary") {
  auto cfg = parse_config(kSmall);
  cfg.output_dir = scratch_dir("run").string();
  std::ostringstream log;
  const auto res = cmd_run(cfg, log);
  CHECK(res.exit_code == 0);
  REQUIRE(res.runs.size() == 3);

  std::ifstream sj(fs::path(cfg.output_dir) / "summary.json");
  const auto summary = nlohmann::json::parse(sj);
  CHECK(summary["config"]["objective"]["lambda"] == 0.1);
  REQUIRE(summary["runs"].size() == 3);
  REQUIRE(summary["aggregate"].size() == 1);

  std::vector<double> finals;
  for (const auto& run : summary["runs"]) {
    const auto lines = read_lines(fs::path(cfg.output_dir) / (run["run_id"].get<std::string>() + ".csv"));
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == trace_header(false));
    CHECK(lines.size() - 1 == run["iterations"].get<std::size_t>());
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto cells = split(lines[i]);
      REQUIRE(cells.size() == 14);
      const double f = std::stod(cells[5]);
      CHECK(f <= prev);
      prev = f;
      CHECK(cells[12] == "0");
    }
    CHECK(prev == run["final_f"].get<double>());
    finals.push_back(prev);
  }
  const double mean = (finals[0] + finals[1] + finals[2]) / 3.0;
  double var = 0.0;
  for (double f : finals) var += (f - mean) * (f - mean);
  const auto& agg = summary["aggregate"][0];
  CHECK(agg["n_seeds"] == 3);
  CHECK(agg["final_f"]["mean"].get<double>() == doctest::Approx(mean).epsilon(1e-14));
  CHECK(agg["final_f"]["std"].get<double>() == doctest::Approx(std::sqrt(var / 2.0)).epsilon(1e-12));
}

TEST_CASE("libsvm config echoes lambda") {
  const auto dir = scratch_dir("libsvm");
  {
    std::ofstream data(dir / "tiny.libsvm");
    data << "+1 1:0.5 3:-1.2\n-1 2:2.0\n+1 1:-0.3 2:0.7 3:0.4\n0 1:1.0 3:0.2\n";
  }
  auto cfg = parse_config("objective.kind = libsvm\nobjective.dataset = " + (dir / "tiny.libsvm").string() +
                          "\nobjective.lambda = 0.1\nstop.max_iters = 5\noutput.timing = false\n");
  cfg.output_dir = (dir / "out").string();
  std::ostringstream log;
  CHECK(cmd_run(cfg, log).exit_code == 0);
  CHECK(log.str().find("remapped 1 labels") != std::string::npos);
  std::ifstream sj(dir / "out" / "summary.json");
  const auto summary = nlohmann::json::parse(sj);
  CHECK(summary["config"]["objective"]["lambda"] == 0.1);
  CHECK(summary["config"]["raw"]["objective.lambda"] == "0.1");
}

TEST_CASE("compare writes a long-format CSV with one schedule group per block") {
  auto cfg = parse_config(std::string(kSmall) + R"(
compare.blocks = cd, s2, s10
block.cd.method = cd
block.s2.schedule.tau = 2
block.s10.schedule.tau = 10
)");
  cfg.output_dir = scratch_dir("compare").string();
  std::ostringstream log;
  CHECK(cmd_compare(cfg, log).exit_code == 0);
  const auto lines = read_lines(fs::path(cfg.output_dir) / "compare.csv");
  REQUIRE(lines.size() > 1);
  CHECK(lines[0] == trace_header(true));
  std::set<std::string> schedules, methods;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    REQUIRE(cells.size() == 15);
    methods.insert(cells[1]);
    schedules.insert(cells[2]);
  }
  CHECK(methods == std::set<std::string>{"cd", "sscn"});
  CHECK(schedules == std::set<std::string>{"constant:2", "constant:4", "constant:10"});

  auto single = parse_config(kSmall);
  CHECK_THROWS_AS(cmd_compare(single, log), ConfigError);
}

TEST_CASE("theory rule constants resolve from the objective") {
  auto cfg = parse_config(std::string(kSmall) + "m_policy.kind = theory\nm_policy.l1 = auto\nm_policy.l2 = auto\n");
  const auto problem = make_problem(cfg.objective);
  auto block = cfg.blocks[0];
  resolve_dimension(block, problem.objective->dimension());
  const auto out = execute(problem, block, 0);
  CHECK(out.trace.settings.at("m_policy").rfind("theory", 0) == 0);
  CHECK(out.trace.records.back().f_value < problem.objective->value(problem.x0));
  CHECK(problem.objective->lipschitz().gradient == problem.gradient_lipschitz);
}
