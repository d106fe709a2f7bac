#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(SSCN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sscn_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "exp.cfg";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSmall = R"(
objective.kind = synthetic_logistic
objective.n_features = 10
objective.n_samples = 50
schedule.tau = 3
stop.max_iters = 30
output.timing = false
)";

}  // namespace

TEST_CASE("validate suites") {
  CHECK(cli("validate subproblem") == 0);
  CHECK(cli("validate gradcheck") == 0);
  CHECK(cli("validate nosuchsuite") == 2);
  const auto dir = scratch("validate");
  CHECK(cli("--out " + dir.string() + " validate gradcheck") == 0);
  CHECK(fs::exists(dir / "validate_gradcheck.txt"));
}

TEST_CASE("usage errors") {
  CHECK(cli("") == 2);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("run") == 2);
  CHECK(cli("run /nonexistent.cfg") == 2);
}

TEST_CASE("run with three seeds writes three CSVs") {
  const auto dir = scratch("seeds");
  const auto cfg = write_config(dir, std::string(kSmall) + "seeds = 4, 5, 6\n");
  CHECK(cli("run " + cfg.string() + " --out " + (dir / "out").string()) == 0);
  for (const char* id : {"sscn_s4.csv", "sscn_s5.csv", "sscn_s6.csv"}) CHECK(fs::exists(dir / "out" / id));
  CHECK(fs::exists(dir / "out" / "summary.json"));

  CHECK(cli("run " + cfg.string() + " --out " + (dir / "one").string() + " --seed-override 9") == 0);
  CHECK(fs::exists(dir / "one" / "sscn_s9.csv"));
  CHECK_FALSE(fs::exists(dir / "one" / "sscn_s4.csv"));
}

TEST_CASE("identical seeds give byte-identical traces") {
  const auto dir = scratch("bytes");
  const auto cfg = write_config(dir, std::string(kSmall) + "seeds = 3\n");
  REQUIRE(cli("run " + cfg.string() + " --out " + (dir / "a").string()) == 0);
  REQUIRE(cli("run " + cfg.string() + " --out " + (dir / "b").string()) == 0);
  const auto a = slurp(dir / "a" / "sscn_s3.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(dir / "b" / "sscn_s3.csv"));
  CHECK(slurp(dir / "a" / "summary.json").size() > 0);
}

TEST_CASE("config and data errors exit 2") {
  const auto dir = scratch("errors");
  CHECK(cli("run " + write_config(dir, "objective.kind = quadratic\nno.such.key = 1\n").string()) == 2);
  CHECK(cli("run " + write_config(dir, "objective.kind = libsvm\nobjective.dataset = /nonexistent/x.libsvm\n").string()) ==
        2);
  CHECK(cli("compare " + write_config(dir, kSmall).string()) == 2);
  CHECK(cli("compare " + write_config(dir, std::string(kSmall) + "compare.blocks =\n").string()) == 2);
  CHECK(cli("--max-seconds -1 run " + write_config(dir, kSmall).string()) == 2);
}

TEST_CASE("a non-finite objective exits 3") {
  const auto dir = scratch("diverged");
  const auto cfg = write_config(dir, std::string(kSmall) + "objective.x0 = 1e308\noutput.dir = " + (dir / "out").string() + "\n");
  CHECK(cli("run " + cfg.string()) == 3);
}

TEST_CASE("compare on a two-method config") {
  const auto dir = scratch("compare");
  const auto cfg = write_config(dir, std::string(kSmall) + "compare.blocks = cd, sscn\nblock.cd.method = cd\n");
  CHECK(cli("compare " + cfg.string() + " --out " + (dir / "out").string()) == 0);
  std::ifstream in(dir / "out" / "compare.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "run_id,method,schedule,seed,k,tau,f,grad_subset_norm,full_grad_norm,step_norm,M,coord_cost,"
        "cum_coord_cost,elapsed_s,m_retries");
}

TEST_CASE("shipped configs parse") {
  for (const auto& e : fs::directory_iterator(fs::path(SSCN_SOURCE_DIR) / "configs")) {
    if (e.path().extension() != ".cfg" || e.path().stem() == "gisette") continue;
    CAPTURE(e.path().string());
    // a one second budget keeps this cheap; only the exit code matters
    const auto dir = scratch("shipped_" + e.path().stem().string());
    CHECK(cli("--max-seconds 1 --seed-override 0 --out " + dir.string() + " " +
              (e.path().stem() == "compare_cd_sscn" || e.path().stem() == "exponential" ? "compare " : "run ") +
              e.path().string()) == 0);
  }
  CHECK(cli("run " + (fs::path(SSCN_SOURCE_DIR) / "configs" / "gisette.cfg").string() + " --out " +
            scratch("gisette").string()) == 2);
}
