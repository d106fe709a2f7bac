#include "sscn/harness/experiment.hpp"
#include "sscn/harness/validate.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace sscn::harness;

struct Overrides {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> max_seconds;
};

ExperimentConfig prepare(const std::string& path, const Overrides& ov) {
  ExperimentConfig cfg = load_config(path);
  if (!ov.out.empty()) cfg.output_dir = ov.out;
  if (ov.seed) cfg.seeds = {*ov.seed};
  if (ov.max_seconds) {
    if (!(*ov.max_seconds > 0.0)) throw ConfigError("--max-seconds must be positive");
    for (auto& b : cfg.blocks) {
      b.sscn.stop.max_seconds = *ov.max_seconds;
      b.cd.stop.max_seconds = *ov.max_seconds;
    }
  }
  return cfg;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const MissingData& e) {
    std::cerr << "missing data: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic subspace cubic Newton: experiments and validation"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides ov;
  app.add_option("--out", ov.out, "Output directory (overrides output.dir)");
  app.add_option("--seed-override", ov.seed, "Run a single seed instead of the configured list");
  app.add_option("--max-seconds", ov.max_seconds, "Wall-clock budget per run");

  std::string run_cfg, compare_cfg, suite;
  auto* run_cmd = app.add_subcommand("run", "Run every configured block and seed");
  run_cmd->add_option("config", run_cfg, "Config file")->required();
  auto* compare_cmd = app.add_subcommand("compare", "Run two or more method blocks into one long-format CSV");
  compare_cmd->add_option("config", compare_cfg, "Config file")->required();
  auto* validate_cmd = app.add_subcommand("validate", "Run a validation suite");
  validate_cmd->add_option("suite", suite, "subproblem | concentration | gradcheck | lemma1")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run_cmd) {
    return guarded([&] { return cmd_run(prepare(run_cfg, ov), std::cout).exit_code; });
  }
  if (*compare_cmd) {
    return guarded([&] { return cmd_compare(prepare(compare_cfg, ov), std::cout).exit_code; });
  }
  return guarded([&] {
    const auto report = run_suite(suite);
    if (!report) {
      std::cerr << "unknown suite '" << suite << "'; expected one of:";
      for (const auto& s : suite_names()) std::cerr << ' ' << s;
      std::cerr << '\n';
      return 2;
    }
    write_report(std::cout, *report);
    if (!ov.out.empty()) {
      std::filesystem::create_directories(ov.out);
      std::ofstream f(std::filesystem::path(ov.out) / ("validate_" + suite + ".txt"));
      write_report(f, *report);
    }
    return report->passed() ? 0 : 1;
  });
}
