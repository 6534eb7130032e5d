#include "lookdrift/run_config.hpp"

#include <filesystem>
#include <set>

#include "lookdrift/errors.hpp"
#include "lookdrift/io.hpp"

namespace lookdrift {
namespace {

using nlohmann::json;

// Reads fields from one JSON object, remembering which keys were consumed so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  std::string key(const std::string& k) const { return prefix_.empty() ? k : prefix_ + "." + k; }

  const json* find(const std::string& k) {
    seen_.insert(k);
    const auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void read(const std::string& k, T& out) {
    const json* v = find(k);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) throw ConfigError("");
        if constexpr (std::is_unsigned_v<T>) {
          if (v->is_number_integer() && !v->is_number_unsigned()) throw ConfigError("");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw ConfigError("");
      }
      out = v->get<T>();
    } catch (const std::exception&) {
      throw ConfigError(key(k) + ": wrong type (" + std::string(v->type_name()) + ")");
    }
  }

  Section sub(const std::string& k) {
    const json* v = find(k);
    static const json empty = json::object();
    return Section(v ? *v : empty, key(k));
  }

  void finish() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.contains(k)) throw ConfigError(key(k) + ": unknown key");
    }
  }

 private:
  std::string where() const { return prefix_.empty() ? "config" : prefix_; }

  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

template <class T>
void check(bool ok, const std::string& key, const T& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

}  // namespace

std::vector<int> RunConfig::layer_sizes() const {
  std::vector<int> sizes{noise_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(data_dim);
  return sizes;
}

void RunConfig::validate() const {
  dataset.validate();
  check(noise_dim >= 1, "model.noise_dim", "must be >= 1");
  check(data_dim == 2, "model.data_dim", "toy datasets are 2-dimensional");
  for (int h : hidden) check(h >= 1, "model.hidden", "sizes must be >= 1");
  try {
    plan.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  try {
    drift.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("drift.tau: ") + e.what());
  }
  try {
    optimizer.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("optimizer: ") + e.what());
  }
  check(ema_decay >= 0.0 && ema_decay < 1.0, "optimizer.ema_decay", "must be in [0, 1)");
  check(eval.every >= 1, "eval.every", "must be >= 1");
  check(eval.samples >= 2, "eval.samples", "must be >= 2");
  check(eval.projections >= 1, "eval.projections", "must be >= 1");
  check(batch_size_model >= 1, "batch_size_model", "must be >= 1");
  check(batch_size_data >= 1, "batch_size_data", "must be >= 1");
  check(steps >= 1, "steps", "must be >= 1");
  check(checkpoint_every >= 1, "checkpoint_every", "must be >= 1");
  check(!output_dir.empty(), "output_dir", "must not be empty");
}

nlohmann::json to_json(const RunConfig& c) {
  json j;
  j["dataset"] = {{"kind", to_string(c.dataset.kind)}, {"modes", c.dataset.modes},
                  {"radius", c.dataset.radius},        {"noise", c.dataset.noise},
                  {"arms", c.dataset.arms},            {"turns", c.dataset.turns},
                  {"extent", c.dataset.extent},        {"cells", c.dataset.cells}};
  j["model"] = {{"noise_dim", c.noise_dim},
                {"data_dim", c.data_dim},
                {"hidden", c.hidden},
                {"activation", to_string(c.activation)}};
  j["method"] = c.method == Method::lookahead ? "lookahead" : "drifting";
  j["plan"] = {{"k", c.plan.k}, {"weights", c.plan.weights}};
  j["drift"] = {{"tau", c.drift.taus},
                {"include_self", c.drift.include_self},
                {"stab_shift", c.drift.stab_shift},
                {"kernel_sign", c.drift.sign == KernelSign::decaying ? "negative" : "positive"}};
  j["optimizer"] = {{"lr", c.optimizer.lr},     {"beta1", c.optimizer.beta1},
                    {"beta2", c.optimizer.beta2}, {"eps", c.optimizer.eps},
                    {"ema_decay", c.ema_decay}};
  j["eval"] = {{"every", c.eval.every},
               {"samples", c.eval.samples},
               {"projections", c.eval.projections},
               {"use_ema", c.eval.use_ema}};
  j["batch_size_model"] = c.batch_size_model;
  j["batch_size_data"] = c.batch_size_data;
  j["steps"] = c.steps;
  j["checkpoint_every"] = c.checkpoint_every;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  Section root(j, "");

  {
    Section s = root.sub("dataset");
    std::string kind = to_string(c.dataset.kind);
    s.read("kind", kind);
    c.dataset.kind = toy_kind_from_string(kind);
    s.read("modes", c.dataset.modes);
    s.read("radius", c.dataset.radius);
    s.read("noise", c.dataset.noise);
    s.read("arms", c.dataset.arms);
    s.read("turns", c.dataset.turns);
    s.read("extent", c.dataset.extent);
    s.read("cells", c.dataset.cells);
    s.finish();
  }
  {
    Section s = root.sub("model");
    s.read("noise_dim", c.noise_dim);
    s.read("data_dim", c.data_dim);
    s.read("hidden", c.hidden);
    std::string act = to_string(c.activation);
    s.read("activation", act);
    try {
      c.activation = activation_from_string(act);
    } catch (const InvalidInput& e) {
      throw ConfigError(std::string("model.activation: ") + e.what());
    }
    s.finish();
  }
  {
    std::string method = "lookahead";
    root.read("method", method);
    if (method == "lookahead") {
      c.method = Method::lookahead;
    } else if (method == "drifting") {
      c.method = Method::drifting;
    } else {
      throw ConfigError("method: expected \"lookahead\" or \"drifting\", got \"" + method + "\"");
    }
  }
  {
    Section s = root.sub("plan");
    s.read("k", c.plan.k);
    check(c.plan.k >= 0, "plan.k", "must be >= 0");
    if (s.find("weights")) {
      s.read("weights", c.plan.weights);
    } else {
      c.plan = LookaheadPlan::uniform(c.plan.k);
    }
    s.finish();
  }
  {
    Section s = root.sub("drift");
    if (const json* tau = s.find("tau"); tau && tau->is_number()) {
      c.drift.taus = {tau->get<double>()};
    } else {
      s.read("tau", c.drift.taus);
    }
    s.read("include_self", c.drift.include_self);
    s.read("stab_shift", c.drift.stab_shift);
    std::string sign = "negative";
    s.read("kernel_sign", sign);
    if (sign == "negative") {
      c.drift.sign = KernelSign::decaying;
    } else if (sign == "positive") {
      c.drift.sign = KernelSign::growing;
    } else {
      throw ConfigError("drift.kernel_sign: expected \"negative\" or \"positive\"");
    }
    s.finish();
  }
  {
    Section s = root.sub("optimizer");
    s.read("lr", c.optimizer.lr);
    s.read("beta1", c.optimizer.beta1);
    s.read("beta2", c.optimizer.beta2);
    s.read("eps", c.optimizer.eps);
    s.read("ema_decay", c.ema_decay);
    s.finish();
  }
  {
    Section s = root.sub("eval");
    s.read("every", c.eval.every);
    s.read("samples", c.eval.samples);
    s.read("projections", c.eval.projections);
    s.read("use_ema", c.eval.use_ema);
    s.finish();
  }
  root.read("batch_size_model", c.batch_size_model);
  root.read("batch_size_data", c.batch_size_data);
  root.read("steps", c.steps);
  root.read("checkpoint_every", c.checkpoint_every);
  root.read("seed", c.seed);
  root.read("output_dir", c.output_dir);
  root.finish();

  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config not found: " + path);
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "': expected dotted.key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }

  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("override '" + assignment + "': empty key segment");
    if (!node->is_object()) throw ConfigError("override '" + key + "': parent is not an object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

}  // namespace lookdrift
