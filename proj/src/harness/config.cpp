#include "sscn/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sscn::harness {

namespace {

const std::vector<std::string> kGlobalKeys = {
    "version",
    "objective.kind",
    "objective.dataset",
    "objective.lambda",
    "objective.normalize",
    "objective.n_features",
    "objective.n_samples",
    "objective.data_seed",
    "objective.label_noise",
    "objective.dimension",
    "objective.condition",
    "objective.scale",
    "objective.x0",
    "seeds",
    "output.dir",
    "output.timing",
    "compare.blocks",
};

const std::vector<std::string> kBlockKeys = {
    "method",
    "schedule.kind",
    "schedule.tau",
    "schedule.tau_fraction",
    "schedule.tau0",
    "schedule.c_e",
    "schedule.d",
    "schedule.c",
    "schedule.ema_alpha",
    "schedule.smooth_beta",
    "schedule.tau_min",
    "curvature.kind",
    "curvature.period",
    "curvature.radius",
    "curvature.delta",
    "m_policy.kind",
    "m_policy.m",
    "m_policy.m0",
    "m_policy.grow",
    "m_policy.shrink",
    "m_policy.m_min",
    "m_policy.sigma",
    "m_policy.l1",
    "m_policy.l2",
    "subproblem.tol",
    "stop.grad_tol",
    "stop.max_iters",
    "stop.max_seconds",
    "diagnostics.full_grad_every",
    "armijo.eta0",
    "armijo.backtrack",
    "armijo.c",
    "armijo.max_backtracks",
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool is_global(const std::string& key) {
  return std::find(kGlobalKeys.begin(), kGlobalKeys.end(), key) != kGlobalKeys.end();
}

bool is_block_key(const std::string& key) {
  return std::find(kBlockKeys.begin(), kBlockKeys.end(), key) != kBlockKeys.end();
}

double to_double(const std::string& key, const std::string& v) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || std::isnan(out)) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

AutoNumber to_auto(const std::string& key, const std::string& v) {
  if (v == "auto") return {};
  return {to_double(key, v)};
}

class Keys {
 public:
  explicit Keys(std::map<std::string, std::string> m) : m_(std::move(m)) {}
  const std::string* get(const std::string& k) const {
    const auto it = m_.find(k);
    return it == m_.end() ? nullptr : &it->second;
  }
  double num(const std::string& k, double def) const { return get(k) ? to_double(k, *get(k)) : def; }
  std::uint64_t u64(const std::string& k, std::uint64_t def) const { return get(k) ? to_u64(k, *get(k)) : def; }
  std::string str(const std::string& k, const std::string& def) const { return get(k) ? *get(k) : def; }
  bool has_prefix(const std::string& prefix) const {
    return std::any_of(m_.begin(), m_.end(), [&](const auto& kv) { return kv.first.rfind(prefix, 0) == 0; });
  }

 private:
  std::map<std::string, std::string> m_;
};

MethodBlock parse_block(const std::string& name, const Keys& k, bool timing) {
  MethodBlock b;
  b.name = name;
  b.method = k.str("method", "sscn");
  if (b.method != "sscn" && b.method != "cd" && b.method != "cr")
    throw ConfigError("method: expected sscn, cd or cr, got '" + b.method + "'");

  SamplingSchedule schedule;
  const std::string skind = k.str("schedule.kind", "constant");
  if (skind == "constant") {
    if (k.get("schedule.tau") && k.get("schedule.tau_fraction"))
      throw ConfigError("schedule.tau and schedule.tau_fraction are mutually exclusive");
    if (k.get("schedule.tau")) {
      schedule = ConstantSchedule{static_cast<std::size_t>(k.u64("schedule.tau", 1))};
    } else {
      b.tau_fraction = k.num("schedule.tau_fraction", 1.0);
      if (!(*b.tau_fraction > 0.0) || *b.tau_fraction > 1.0)
        throw ConfigError("schedule.tau_fraction must lie in (0, 1]");
      schedule = ConstantSchedule{1};
    }
  } else if (skind == "exponential") {
    schedule = ExponentialSchedule{k.num("schedule.tau0", 1.0), k.num("schedule.c_e", 1.0), k.num("schedule.d", 0.05)};
  } else if (skind == "adaptive") {
    AdaptiveSchedule a;
    a.c = k.num("schedule.c", a.c);
    a.ema_alpha = k.num("schedule.ema_alpha", a.ema_alpha);
    a.smooth_beta = k.num("schedule.smooth_beta", a.smooth_beta);
    a.tau_min = static_cast<std::size_t>(k.u64("schedule.tau_min", a.tau_min));
    schedule = a;
  } else {
    throw ConfigError("schedule.kind: expected constant, exponential or adaptive, got '" + skind + "'");
  }

  CurvatureSpec curvature;
  const std::string ckind = k.str("curvature.kind", "exact");
  if (ckind == "exact") {
    curvature = ExactCurvature{};
  } else if (ckind == "zero") {
    curvature = ZeroCurvature{};
  } else if (ckind == "lazy") {
    LazyCurvature l;
    l.period = static_cast<std::size_t>(k.u64("curvature.period", l.period));
    l.radius = k.num("curvature.radius", l.radius);
    curvature = l;
  } else if (ckind == "fd") {
    FiniteDifferenceCurvature f;
    if (k.get("curvature.delta")) f.delta = k.num("curvature.delta", 0.0);
    curvature = f;
  } else {
    throw ConfigError("curvature.kind: expected exact, zero, lazy or fd, got '" + ckind + "'");
  }

  MPolicy policy;
  const std::string mkind = k.str("m_policy.kind", "adaptive");
  if (mkind == "adaptive") {
    AdaptiveDoublingM a;
    a.m0 = k.num("m_policy.m0", a.m0);
    a.grow = k.num("m_policy.grow", a.grow);
    a.shrink = k.num("m_policy.shrink", a.shrink);
    a.m_min = k.num("m_policy.m_min", a.m_min);
    policy = a;
  } else if (mkind == "fixed") {
    if (!k.get("m_policy.m")) throw ConfigError("m_policy.m is required for a fixed policy");
    policy = FixedM{k.num("m_policy.m", 1.0)};
  } else if (mkind == "theory") {
    TheoryRuleM t;
    t.sigma = k.num("m_policy.sigma", 0.0);
    b.theory_l1 = to_auto("m_policy.l1", k.str("m_policy.l1", "auto"));
    b.theory_l2 = to_auto("m_policy.l2", k.str("m_policy.l2", "auto"));
    t.l1 = b.theory_l1.value.value_or(1.0);
    t.l2 = b.theory_l2.value.value_or(1.0);
    policy = t;
  } else {
    throw ConfigError("m_policy.kind: expected adaptive, fixed or theory, got '" + mkind + "'");
  }

  StopCriteria stop;
  stop.grad_tol = k.num("stop.grad_tol", 1e-6);
  stop.max_iters = static_cast<std::size_t>(k.u64("stop.max_iters", 1000));
  stop.max_seconds = k.num("stop.max_seconds", stop.max_seconds);
  const auto every = static_cast<std::size_t>(k.u64("diagnostics.full_grad_every", 1));

  b.sscn.m_policy = policy;
  b.sscn.schedule = schedule;
  b.sscn.curvature = curvature;
  b.sscn.subproblem_tol = k.num("subproblem.tol", 1e-5);
  b.sscn.stop = stop;
  b.sscn.full_grad_every = every;
  b.sscn.record_time = timing;

  b.cd.schedule = schedule;
  b.cd.armijo.eta0 = k.num("armijo.eta0", b.cd.armijo.eta0);
  b.cd.armijo.backtrack = k.num("armijo.backtrack", b.cd.armijo.backtrack);
  b.cd.armijo.c = k.num("armijo.c", b.cd.armijo.c);
  b.cd.armijo.max_backtracks = static_cast<std::size_t>(k.u64("armijo.max_backtracks", b.cd.armijo.max_backtracks));
  b.cd.stop = stop;
  b.cd.full_grad_every = every;
  b.cd.record_time = timing;
  return b;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> all = [] {
    std::vector<std::string> v = kGlobalKeys;
    v.insert(v.end(), kBlockKeys.begin(), kBlockKeys.end());
    return v;
  }();
  return all;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!cfg.raw.emplace(key, value).second) throw ConfigError("duplicate key: " + key);
  }

  std::map<std::string, std::string> base;
  std::map<std::string, std::map<std::string, std::string>> overrides;
  for (const auto& [key, value] : cfg.raw) {
    if (key.rfind("block.", 0) == 0) {
      const auto dot = key.find('.', 6);
      if (dot == std::string::npos) throw ConfigError("malformed block key: " + key);
      const std::string name = key.substr(6, dot - 6);
      const std::string sub = key.substr(dot + 1);
      if (!is_block_key(sub)) throw ConfigError("unknown key: " + key);
      overrides[name][sub] = value;
    } else if (is_block_key(key)) {
      base[key] = value;
    } else if (!is_global(key)) {
      throw ConfigError("unknown key: " + key);
    }
  }

  const Keys g(cfg.raw);
  if (g.get("version") && g.u64("version", 0) != static_cast<std::uint64_t>(kConfigVersion))
    throw ConfigError("unsupported config version " + *g.get("version"));

  auto& o = cfg.objective;
  o.kind = g.str("objective.kind", o.kind);
  if (o.kind != "libsvm" && o.kind != "synthetic_logistic" && o.kind != "quadratic" && o.kind != "saddle_quartic")
    throw ConfigError("objective.kind: expected libsvm, synthetic_logistic, quadratic or saddle_quartic, got '" + o.kind +
                      "'");
  o.dataset = g.str("objective.dataset", "");
  if (o.kind == "libsvm" && o.dataset.empty()) throw ConfigError("objective.dataset is required for libsvm objectives");
  o.lambda = g.num("objective.lambda", o.lambda);
  if (g.get("objective.normalize")) o.normalize = to_bool("objective.normalize", *g.get("objective.normalize"));
  o.n_features = static_cast<std::size_t>(g.u64("objective.n_features", o.n_features));
  o.n_samples = static_cast<std::size_t>(g.u64("objective.n_samples", o.n_samples));
  o.data_seed = g.u64("objective.data_seed", o.data_seed);
  o.label_noise = g.num("objective.label_noise", o.label_noise);
  o.dimension = static_cast<std::size_t>(g.u64("objective.dimension", o.dimension));
  o.condition = g.num("objective.condition", o.condition);
  o.scale = g.num("objective.scale", o.scale);
  o.x0 = g.num("objective.x0", o.kind == "saddle_quartic" ? 1e-3 : 0.0);
  if (o.lambda < 0.0) throw ConfigError("objective.lambda must be non-negative");

  cfg.seeds.clear();
  for (const auto& s : split_list(g.str("seeds", "0"))) cfg.seeds.push_back(to_u64("seeds", s));
  if (cfg.seeds.empty()) throw ConfigError("seeds must not be empty");
  cfg.output_dir = g.str("output.dir", cfg.output_dir);
  if (g.get("output.timing")) cfg.timing = to_bool("output.timing", *g.get("output.timing"));

  std::vector<std::string> names;
  if (g.get("compare.blocks")) {
    cfg.compare = true;
    names = split_list(*g.get("compare.blocks"));
    if (names.empty()) throw ConfigError("compare.blocks lists no methods");
    if (std::set<std::string>(names.begin(), names.end()).size() != names.size())
      throw ConfigError("compare.blocks contains duplicates");
  } else {
    names.push_back(base.count("method") ? base.at("method") : "sscn");
  }
  for (const auto& [name, _] : overrides) {
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw ConfigError("block." + name + " is not listed in compare.blocks");
  }
  for (const auto& name : names) {
    auto merged = base;
    if (const auto it = overrides.find(name); it != overrides.end()) {
      const auto& own = it->second;
      // a block's own subset size wins over the base one in either form
      if (own.count("schedule.tau")) merged.erase("schedule.tau_fraction");
      if (own.count("schedule.tau_fraction")) merged.erase("schedule.tau");
      for (const auto& [k, v] : own) merged[k] = v;
    }
    cfg.blocks.push_back(parse_block(name, Keys(merged), cfg.timing));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void resolve_dimension(MethodBlock& block, std::size_t n) {
  if (block.tau_fraction) {
    const auto tau = static_cast<std::size_t>(std::llround(*block.tau_fraction * static_cast<double>(n)));
    const ConstantSchedule c{std::clamp<std::size_t>(tau, 1, n)};
    block.sscn.schedule = c;
    block.cd.schedule = c;
  }
  try {
    validate(block.sscn.schedule, n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("block " + block.name + ": " + e.what());
  }
  const SamplingSchedule& s = block.sscn.schedule;
  if (const auto* c = std::get_if<ConstantSchedule>(&s)) {
    block.schedule_label = "constant:" + std::to_string(c->tau);
  } else if (const auto* e = std::get_if<ExponentialSchedule>(&s)) {
    std::ostringstream os;
    os << "exponential:tau0=" << e->tau0 << ";c_e=" << e->c_e << ";d=" << e->d;
    block.schedule_label = os.str();
  } else if (const auto* a = std::get_if<AdaptiveSchedule>(&s)) {
    std::ostringstream os;
    os << "adaptive:c=" << a->c << ";beta=" << a->smooth_beta;
    block.schedule_label = os.str();
  }
  if (block.method == "cr") block.schedule_label = "full:" + std::to_string(n);
}

}  // namespace sscn::harness
