#include "wdecor/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "wdecor/error.hpp"

namespace wdecor {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& message) {
  throw Error(ErrorCode::ConfigError, "key '" + key + "': " + message);
}

std::string join(const std::string& parent, const std::string& child) {
  return parent.empty() ? child : parent + "." + child;
}

/// A JSON object under a dotted key path; tracks which keys were consumed.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, _] : value_.items()) {
      if (!allowed.count(key)) fail(join(path_, key), "unknown key");
    }
  }

  bool has(const char* key) const { return value_.contains(key); }

  const json& get(const char* key) const {
    if (!value_.contains(key)) fail(join(path_, key), "missing required key");
    return value_.at(key);
  }

  std::string key(const char* name) const { return join(path_, name); }

  Node child(const char* key) const { return Node(get(key), join(path_, key)); }

  double number(const char* key) const {
    const json& v = get(key);
    if (!v.is_number()) fail(join(path_, key), "expected a number");
    return v.get<double>();
  }
  double number_or(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::uint64_t unsigned_integer(const char* key) const {
    const json& v = get(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(join(path_, key), "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean_or(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_boolean()) fail(join(path_, key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const char* key) const {
    const json& v = get(key);
    if (!v.is_string()) fail(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  Eigen::VectorXd vector(const char* key) const { return to_vector(get(key), join(path_, key)); }

  static Eigen::VectorXd to_vector(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  }

 private:
  const json& value_;
  std::string path_;
};

NoiseSpec parse_noise(const Node& node) {
  const std::string kind = node.string("kind");
  try {
    if (kind == "uniform") {
      node.allow_only({"kind", "low", "high"});
      return NoiseSpec(UniformNoise{node.number_or("low", -1.0), node.number_or("high", 1.0)});
    }
    if (kind == "gaussian") {
      node.allow_only({"kind", "sigma"});
      return NoiseSpec(GaussianNoise{node.number_or("sigma", 1.0)});
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(node.key("kind"), e.what());
  }
  fail(node.key("kind"), "expected \"uniform\" or \"gaussian\", got \"" + kind + "\"");
}

PolicySpec parse_policy(const Node& node) {
  node.allow_only({"kind", "epsilon", "prior_mean", "prior_var", "assumed_noise_var", "ucb"});
  PolicySpec spec;
  const std::string kind = node.string("kind");
  const auto parsed = parse_policy_kind(kind);
  if (!parsed) fail(node.key("kind"), "expected ECB, UCB, TS or RR, got \"" + kind + "\"");
  spec.kind = *parsed;
  spec.epsilon = node.number_or("epsilon", spec.epsilon);
  spec.prior_mean = node.number_or("prior_mean", spec.prior_mean);
  spec.prior_var = node.number_or("prior_var", spec.prior_var);
  spec.assumed_noise_var = node.number_or("assumed_noise_var", spec.assumed_noise_var);
  if (node.has("ucb")) {
    const Node ucb = node.child("ucb");
    ucb.allow_only({"epsilon", "beta", "delta"});
    spec.ucb.epsilon = ucb.number_or("epsilon", spec.ucb.epsilon);
    spec.ucb.beta = ucb.number_or("beta", spec.ucb.beta);
    spec.ucb.delta = ucb.number_or("delta", spec.ucb.delta);
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    fail(node.key("kind"), e.what());
  }
  return spec;
}

Process parse_process(const Node& root) {
  const Node node = root.child("process");
  const std::string kind = node.string("kind");
  if (kind == "bandit") {
    node.allow_only({"kind", "arm_means", "noise", "horizon"});
    if (!root.has("policy")) fail("policy", "missing required key for a bandit process");
    BanditProcess b;
    b.env.arm_means = node.vector("arm_means");
    b.env.noise = parse_noise(node.child("noise"));
    b.env.horizon = node.unsigned_integer("horizon");
    b.policy = parse_policy(root.child("policy"));
    try {
      b.env.validate();
    } catch (const Error& e) {
      fail(node.key("arm_means"), e.what());
    }
    return b;
  }
  if (kind == "ar") {
    node.allow_only({"kind", "coefficients", "n", "noise", "initial_values"});
    if (root.has("policy")) fail("policy", "not allowed for an AR process");
    ArSpec a;
    a.coefficients = node.vector("coefficients");
    a.n = node.unsigned_integer("n");
    a.noise = parse_noise(node.child("noise"));
    if (node.has("initial_values")) a.initial_values = node.vector("initial_values");
    try {
      a.validate();
    } catch (const Error& e) {
      fail(node.key("coefficients"), e.what());
    }
    return a;
  }
  fail(node.key("kind"), "expected \"bandit\" or \"ar\", got \"" + kind + "\"");
}

std::vector<IntervalMethod> parse_methods(const json& list, const std::string& path) {
  if (!list.is_array()) fail(path, "expected an array of method names");
  std::vector<IntervalMethod> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto m = list[i].is_string() ? parse_interval_method(list[i].get<std::string>()) : std::nullopt;
    if (!m) fail(path + "[" + std::to_string(i) + "]", "expected OLS_GSN, OLS_CONC or W_DECORR");
    out.push_back(*m);
  }
  return out;
}

LambdaRule parse_lambda(const Node& node) {
  node.allow_only({"rule", "percentile", "pilot_runs", "value", "loglog_discount"});
  LambdaRule rule;
  const std::string name = node.string("rule");
  const auto kind = parse_lambda_rule_kind(name);
  if (!kind) fail(node.key("rule"), "expected percentile, exploration or fixed, got \"" + name + "\"");
  rule.kind = *kind;
  rule.percentile = node.number_or("percentile", rule.percentile);
  if (node.has("pilot_runs")) rule.pilot_runs = node.unsigned_integer("pilot_runs");
  if (rule.kind == LambdaRuleKind::Fixed) rule.fixed_value = node.number("value");
  rule.loglog_discount = node.boolean_or("loglog_discount", rule.loglog_discount);
  try {
    rule.validate();
  } catch (const Error& e) {
    fail(node.key("rule"), e.what());
  }
  return rule;
}

RunConfig from_json(const json& doc) {
  const Node root(doc, "");
  root.allow_only({"process", "policy", "estimators", "intervals", "targets", "levels", "lambda",
                   "trials", "seed", "output_dir"});

  RunConfig out;
  ExperimentConfig& cfg = out.experiment;
  cfg.process = parse_process(root);
  const auto p = dimension(cfg.process);

  if (root.has("estimators")) {
    const json& list = root.get("estimators");
    if (!list.is_array() || list.empty()) fail("estimators", "expected a nonempty array");
    cfg.estimators.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto e = list[i].is_string() ? parse_estimator(list[i].get<std::string>()) : std::nullopt;
      if (!e) fail("estimators[" + std::to_string(i) + "]", "expected OLS or W_DECORR");
      cfg.estimators.push_back(*e);
    }
  }

  if (root.has("intervals")) {
    const json& iv = root.get("intervals");
    if (iv.is_array()) {
      cfg.methods = parse_methods(iv, "intervals");
    } else {
      const Node node = root.child("intervals");
      node.allow_only({"methods", "concentration"});
      if (node.has("methods")) cfg.methods = parse_methods(node.get("methods"), "intervals.methods");
      if (node.has("concentration")) {
        const Node conc = node.child("concentration");
        conc.allow_only({"R", "S", "c"});
        cfg.concentration.sub_gaussian_r = conc.number_or("R", cfg.concentration.sub_gaussian_r);
        if (conc.has("S") && !conc.get("S").is_null()) cfg.concentration.norm_bound_s = conc.number("S");
        cfg.concentration.reg_lambda_c = conc.number_or("c", cfg.concentration.reg_lambda_c);
      }
    }
  }

  const json& targets = root.get("targets");
  if (!targets.is_array() || targets.empty()) fail("targets", "expected a nonempty array");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const Node t(targets[i], "targets[" + std::to_string(i) + "]");
    t.allow_only({"label", "v"});
    Target target{t.string("label"), t.vector("v")};
    if (target.direction.size() != p) fail(t.key("v"), "expected " + std::to_string(p) + " entries");
    cfg.targets.push_back(std::move(target));
  }

  cfg.levels.clear();
  const Eigen::VectorXd levels = Node::to_vector(root.get("levels"), "levels");
  for (Eigen::Index i = 0; i < levels.size(); ++i) {
    if (!(levels(i) > 0.0 && levels(i) < 1.0)) {
      fail("levels[" + std::to_string(i) + "]", "levels must lie in (0, 1)");
    }
    cfg.levels.push_back(levels(i));
  }

  if (root.has("lambda")) cfg.lambda_rule = parse_lambda(root.child("lambda"));
  cfg.trials = root.unsigned_integer("trials");
  if (cfg.trials < 1) fail("trials", "must be >= 1");
  cfg.base_seed = root.unsigned_integer("seed");
  if (root.has("output_dir")) out.output_dir = root.string("output_dir");

  try {
    cfg.validate();
  } catch (const Error& e) {
    fail("<root>", e.what());
  }
  return out;
}

nlohmann::ordered_json noise_json(const NoiseSpec& noise) {
  nlohmann::ordered_json j;
  if (const auto* u = std::get_if<UniformNoise>(&noise.kind())) {
    j["kind"] = "uniform";
    j["low"] = u->low;
    j["high"] = u->high;
  } else {
    j["kind"] = "gaussian";
    j["sigma"] = std::get<GaussianNoise>(noise.kind()).sigma;
  }
  return j;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::ConfigError, "malformed JSON at line " + std::to_string(line) +
                                            ", column " + std::to_string(column));
  }
  return from_json(doc);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

nlohmann::ordered_json to_json(const RunConfig& config) {
  const ExperimentConfig& cfg = config.experiment;
  nlohmann::ordered_json j;
  if (const auto* b = std::get_if<BanditProcess>(&cfg.process)) {
    j["process"] = {{"kind", "bandit"},
                    {"arm_means", to_std(b->env.arm_means)},
                    {"noise", noise_json(b->env.noise)},
                    {"horizon", b->env.horizon}};
    j["policy"] = {{"kind", std::string(to_string(b->policy.kind))},
                   {"epsilon", b->policy.epsilon},
                   {"prior_mean", b->policy.prior_mean},
                   {"prior_var", b->policy.prior_var},
                   {"assumed_noise_var", b->policy.assumed_noise_var},
                   {"ucb",
                    {{"epsilon", b->policy.ucb.epsilon},
                     {"beta", b->policy.ucb.beta},
                     {"delta", b->policy.ucb.delta}}}};
  } else {
    const auto& a = std::get<ArSpec>(cfg.process);
    j["process"] = {{"kind", "ar"},
                    {"coefficients", to_std(a.coefficients)},
                    {"n", a.n},
                    {"noise", noise_json(a.noise)},
                    {"initial_values", to_std(a.lags())}};
  }
  j["estimators"] = nlohmann::ordered_json::array();
  for (const auto e : cfg.estimators) j["estimators"].push_back(std::string(to_string(e)));
  nlohmann::ordered_json methods = nlohmann::ordered_json::array();
  for (const auto m : cfg.methods) methods.push_back(std::string(to_string(m)));
  nlohmann::ordered_json conc = {{"R", cfg.concentration.sub_gaussian_r},
                                 {"S", nullptr},
                                 {"c", cfg.concentration.reg_lambda_c}};
  if (cfg.concentration.norm_bound_s) conc["S"] = *cfg.concentration.norm_bound_s;
  j["intervals"] = {{"methods", methods}, {"concentration", conc}};
  j["targets"] = nlohmann::ordered_json::array();
  for (const auto& t : cfg.targets) j["targets"].push_back({{"label", t.label}, {"v", to_std(t.direction)}});
  j["levels"] = cfg.levels;
  nlohmann::ordered_json lambda = {{"rule", std::string(to_string(cfg.lambda_rule.kind))},
                                   {"percentile", cfg.lambda_rule.percentile},
                                   {"pilot_runs", cfg.lambda_rule.pilot_runs},
                                   {"loglog_discount", cfg.lambda_rule.loglog_discount}};
  if (cfg.lambda_rule.kind == LambdaRuleKind::Fixed) lambda["value"] = cfg.lambda_rule.fixed_value;
  j["lambda"] = lambda;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.base_seed;
  j["output_dir"] = config.output_dir;
  return j;
}

}  // namespace wdecor
