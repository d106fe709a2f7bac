#pragma once

#include "sscn/dataset.hpp"
#include "sscn/harness/config.hpp"

#include <iosfwd>
#include <memory>

namespace sscn::harness {

struct Problem {
  std::unique_ptr<Objective> objective;
  Vector x0;
  ParseInfo parse_info;
  std::optional<double> gradient_lipschitz;  // known bound, when the objective offers one
};

/// Builds the objective described by `spec`. Relative dataset paths that do not
/// exist are looked up under data_directory(). Throws MissingData.
Problem make_problem(const ObjectiveSpec& spec);

struct RunOutcome {
  std::string run_id;
  std::string block;
  std::string method;
  std::string schedule;
  std::uint64_t seed = 0;
  RunTrace trace;
};

/// Runs one block for one seed; resolves "auto" theory constants.
RunOutcome execute(const Problem& problem, const MethodBlock& block, std::uint64_t seed);

/// Trace CSV header; `with_schedule` adds the schedule column after method.
std::string trace_header(bool with_schedule);
void write_trace_rows(std::ostream& out, const RunOutcome& run, bool with_schedule);

struct CommandResult {
  int exit_code = 0;
  std::vector<RunOutcome> runs;
};

/// One CSV per (block, seed) plus summary.json in cfg.output_dir.
CommandResult cmd_run(const ExperimentConfig& cfg, std::ostream& log);
/// compare.csv (long format keyed by method, schedule, seed, k) plus
/// summary.json. Needs at least two blocks.
CommandResult cmd_compare(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace sscn::harness
