#include "sscn/harness/experiment.hpp"

#include "sscn/logistic.hpp"
#include "sscn/synthetic.hpp"

#include <json.hpp>

#include <Eigen/QR>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace sscn::harness {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::unique_ptr<Quadratic> random_quadratic(std::size_t n, double condition, std::uint64_t seed) {
  Rng rng(seed);
  Matrix g(static_cast<Index>(n), static_cast<Index>(n));
  for (Index j = 0; j < g.cols(); ++j)
    for (Index i = 0; i < g.rows(); ++i) g(i, j) = standard_normal(rng);
  const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
  Vector d(static_cast<Index>(n));
  for (Index i = 0; i < d.size(); ++i) {
    const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    d[i] = std::pow(condition, t);
  }
  Matrix a = q * d.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose()).eval();
  Vector b(static_cast<Index>(n));
  for (Index i = 0; i < b.size(); ++i) b[i] = standard_normal(rng);
  return std::make_unique<Quadratic>(std::move(a), std::move(b));
}

fs::path resolve_dataset(const std::string& name) {
  const fs::path p(name);
  if (fs::exists(p)) return p;
  if (p.is_relative()) {
    const fs::path q = data_directory() / p;
    if (fs::exists(q)) return q;
  }
  throw MissingData("dataset not found: " + name + " (searched the working directory and " +
                    data_directory().string() + ")");
}

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(acc / static_cast<double>(v.size() - 1));
  }
  return s;
}

double final_grad(const RunTrace& t) {
  const auto& r = t.records.back();
  return r.full_grad_norm.value_or(std::numeric_limits<double>::quiet_NaN());
}

nlohmann::json summary_json(const ExperimentConfig& cfg, const std::vector<RunOutcome>& runs) {
  using nlohmann::json;
  json j;
  j["version"] = kConfigVersion;
  const auto& o = cfg.objective;
  json obj = {{"kind", o.kind}, {"lambda", o.lambda}, {"normalize", o.normalize}};
  if (o.kind == "libsvm") obj["dataset"] = o.dataset;
  if (o.kind == "synthetic_logistic") {
    obj["n_features"] = o.n_features;
    obj["n_samples"] = o.n_samples;
    obj["data_seed"] = o.data_seed;
    obj["label_noise"] = o.label_noise;
  }
  if (o.kind == "quadratic" || o.kind == "saddle_quartic") obj["dimension"] = o.dimension;
  if (o.kind == "quadratic") obj["condition"] = o.condition;
  if (o.kind == "saddle_quartic") obj["scale"] = o.scale;
  obj["x0"] = o.x0;
  j["config"] = {{"objective", obj}, {"seeds", cfg.seeds}, {"output_dir", cfg.output_dir}, {"raw", cfg.raw}};

  json per_run = json::array();
  for (const auto& r : runs) {
    const auto& last = r.trace.records.back();
    per_run.push_back({{"run_id", r.run_id},
                       {"block", r.block},
                       {"method", r.method},
                       {"schedule", r.schedule},
                       {"seed", r.seed},
                       {"settings", r.trace.settings},
                       {"termination", to_string(r.trace.termination)},
                       {"iterations", r.trace.records.size()},
                       {"cum_coord_cost", last.cumulative_coord_cost},
                       {"final_f", last.f_value},
                       {"final_grad_norm", final_grad(r.trace)}});
  }
  j["runs"] = per_run;

  json aggregate = json::array();
  for (const auto& b : cfg.blocks) {
    std::vector<double> f, g, it, cost;
    for (const auto& r : runs) {
      if (r.block != b.name) continue;
      f.push_back(r.trace.records.back().f_value);
      g.push_back(final_grad(r.trace));
      it.push_back(static_cast<double>(r.trace.records.size()));
      cost.push_back(static_cast<double>(r.trace.records.back().cumulative_coord_cost));
    }
    auto block = [](const Stats& s) { return json{{"mean", s.mean}, {"std", s.std}}; };
    aggregate.push_back({{"block", b.name},
                         {"method", b.method},
                         {"schedule", b.schedule_label},
                         {"n_seeds", f.size()},
                         {"final_f", block(stats(f))},
                         {"final_grad_norm", block(stats(g))},
                         {"iterations", block(stats(it))},
                         {"cum_coord_cost", block(stats(cost))}});
  }
  j["aggregate"] = aggregate;
  return j;
}

void write_summary(const ExperimentConfig& cfg, const std::vector<RunOutcome>& runs) {
  std::ofstream out(fs::path(cfg.output_dir) / "summary.json");
  out << summary_json(cfg, runs).dump(2) << '\n';
}

/// Runs every (block, seed); fills `result` and returns false on a fatal error.
bool execute_all(const ExperimentConfig& cfg, std::ostream& log, CommandResult& result) {
  Problem problem = make_problem(cfg.objective);
  if (problem.parse_info.zero_labels_remapped > 0) {
    log << "warning: remapped " << problem.parse_info.zero_labels_remapped << " labels from 0 to -1\n";
  }
  const std::size_t n = problem.objective->dimension();
  std::vector<MethodBlock> blocks = cfg.blocks;
  for (auto& b : blocks) resolve_dimension(b, n);
  for (const auto& b : blocks) {
    for (const auto seed : cfg.seeds) {
      const std::string id = b.name + "_s" + std::to_string(seed);
      try {
        result.runs.push_back(execute(problem, b, seed));
      } catch (const ObjectiveDiverged& e) {
        log << "error: run " << id << " aborted: " << e.what() << '\n';
        result.exit_code = 3;
        return false;
      }
      const auto& t = result.runs.back().trace;
      log << id << ": " << to_string(t.termination) << " after " << t.records.size() << " iterations, f = "
          << fmt(t.records.back().f_value) << '\n';
    }
  }
  return true;
}

}  // namespace

Problem make_problem(const ObjectiveSpec& spec) {
  Problem p;
  std::size_t n = 0;
  if (spec.kind == "libsvm") {
    const fs::path path = resolve_dataset(spec.dataset);
    SparseDataset data;
    try {
      data = load_libsvm(path, std::nullopt, &p.parse_info);
    } catch (const ParseError& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    auto obj = std::make_unique<RegularizedLogistic>(data, spec.lambda, spec.normalize);
    p.gradient_lipschitz = obj->gradient_lipschitz_bound();
    n = obj->dimension();
    p.objective = std::move(obj);
  } else if (spec.kind == "synthetic_logistic") {
    if (spec.n_features == 0 || spec.n_samples == 0) throw ConfigError("synthetic objective needs positive sizes");
    if (spec.label_noise < 0.0 || spec.label_noise > 1.0) throw ConfigError("objective.label_noise must lie in [0, 1]");
    const auto data = make_synthetic_classification(spec.n_features, spec.n_samples, spec.data_seed, spec.label_noise);
    auto obj = std::make_unique<RegularizedLogistic>(data, spec.lambda, spec.normalize);
    p.gradient_lipschitz = obj->gradient_lipschitz_bound();
    n = obj->dimension();
    p.objective = std::move(obj);
  } else if (spec.kind == "quadratic") {
    if (spec.dimension == 0) throw ConfigError("objective.dimension must be positive");
    if (!(spec.condition >= 1.0)) throw ConfigError("objective.condition must be at least 1");
    auto obj = random_quadratic(spec.dimension, spec.condition, spec.data_seed);
    p.gradient_lipschitz = spec.condition;
    n = obj->dimension();
    p.objective = std::move(obj);
  } else if (spec.kind == "saddle_quartic") {
    if (spec.dimension < 2) throw ConfigError("saddle_quartic needs dimension >= 2");
    if (!(spec.scale > 0.0)) throw ConfigError("objective.scale must be positive");
    p.objective = std::make_unique<SaddleQuartic>(spec.dimension, spec.scale);
    n = spec.dimension;
  } else {
    throw ConfigError("unknown objective kind " + spec.kind);
  }
  // sigma for zero curvature falls back to this
  if (p.gradient_lipschitz) p.objective->set_lipschitz({p.gradient_lipschitz, std::nullopt});
  p.x0 = Vector::Constant(static_cast<Index>(n), spec.x0);
  return p;
}

RunOutcome execute(const Problem& problem, const MethodBlock& block, std::uint64_t seed) {
  RunOutcome out;
  out.run_id = block.name + "_s" + std::to_string(seed);
  out.block = block.name;
  out.method = block.method;
  out.schedule = block.schedule_label;
  out.seed = seed;
  const Objective& obj = *problem.objective;
  try {
    if (block.method == "cd") {
      CdConfig c = block.cd;
      c.seed = seed;
      out.trace = cd_run(obj, problem.x0, c);
    } else {
      OptimizerConfig c = block.sscn;
      c.seed = seed;
      if (auto* t = std::get_if<TheoryRuleM>(&c.m_policy)) {
        if (!block.theory_l1.value) {
          if (!problem.gradient_lipschitz) throw ConfigError("m_policy.l1 = auto is not available for this objective");
          t->l1 = *problem.gradient_lipschitz;
        }
        if (!block.theory_l2.value) {
          Rng rng(seed);
          t->l2 = std::max(1e-12, estimate_hessian_lipschitz(obj, problem.x0, 1.0, 64, rng));
        }
      }
      out.trace = block.method == "cr" ? full_cubic_newton_run(obj, problem.x0, c) : run(obj, problem.x0, c);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("block " + block.name + ": " + e.what());
  }
  return out;
}

std::string trace_header(bool with_schedule) {
  return with_schedule ? "run_id,method,schedule,seed,k,tau,f,grad_subset_norm,full_grad_norm,step_norm,M,coord_cost,"
                         "cum_coord_cost,elapsed_s,m_retries"
                       : "run_id,method,seed,k,tau,f,grad_subset_norm,full_grad_norm,step_norm,M,coord_cost,"
                         "cum_coord_cost,elapsed_s,m_retries";
}

void write_trace_rows(std::ostream& out, const RunOutcome& run, bool with_schedule) {
  for (const auto& r : run.trace.records) {
    out << run.run_id << ',' << run.method << ',';
    if (with_schedule) out << run.schedule << ',';
    out << run.seed << ',' << r.k << ',' << r.tau << ',' << fmt(r.f_value) << ',' << fmt(r.grad_subset_norm) << ','
        << (r.full_grad_norm ? fmt(*r.full_grad_norm) : std::string()) << ',' << fmt(r.step_norm) << ','
        << fmt(r.m) << ',' << r.coord_cost << ',' << r.cumulative_coord_cost << ',' << fmt(r.elapsed_seconds) << ','
        << r.m_retries << '\n';
  }
}

CommandResult cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
  CommandResult result;
  if (!execute_all(cfg, log, result)) return result;
  fs::create_directories(cfg.output_dir);
  for (const auto& r : result.runs) {
    std::ofstream out(fs::path(cfg.output_dir) / (r.run_id + ".csv"));
    out << trace_header(false) << '\n';
    write_trace_rows(out, r, false);
  }
  write_summary(cfg, result.runs);
  return result;
}

CommandResult cmd_compare(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.blocks.size() < 2) throw ConfigError("compare needs at least two method blocks in compare.blocks");
  CommandResult result;
  if (!execute_all(cfg, log, result)) return result;
  fs::create_directories(cfg.output_dir);
  std::ofstream out(fs::path(cfg.output_dir) / "compare.csv");
  out << trace_header(true) << '\n';
  for (const auto& r : result.runs) write_trace_rows(out, r, true);
  write_summary(cfg, result.runs);
  return result;
}

}  // namespace sscn::harness
