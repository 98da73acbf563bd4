#include <fstream>
#include <set>
#include <sstream>

#include "chaos/cli.hpp"

namespace chaos::cli {

namespace {

const std::map<std::string, Command> kCommands{
    {"simulate", Command::simulate},           {"chaos", Command::chaos},
    {"mv-solve", Command::mv_solve},           {"clt", Command::clt},
    {"partition-audit", Command::partition_audit}, {"operator-audit", Command::operator_audit},
};

std::string join_violations(const std::vector<std::string>& v) {
  std::string msg = "invalid experiment config:";
  for (const auto& s : v) msg += "\n  " + s;
  return msg;
}

// Strict view of one JSON object: reads typed keys, records type errors and
// flags every key that was never read.
class Section {
 public:
  Section(const Json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (!obj_.is_object()) {
      errors_.push_back(path_ + " must be a JSON object");
      valid_ = false;
    }
  }

  bool valid() const { return valid_; }
  bool has(const std::string& key) const { return valid_ && obj_.contains(key); }

  const Json* raw(const std::string& key, bool required) {
    seen_.insert(key);
    if (!valid_) return nullptr;
    auto it = obj_.find(key);
    if (it == obj_.end()) {
      if (required) errors_.push_back(where(key) + " is required");
      return nullptr;
    }
    return &*it;
  }

  template <class T>
  std::optional<T> get(const std::string& key, bool required = false) {
    const Json* j = raw(key, required);
    if (!j) return std::nullopt;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!j->is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!j->is_number_integer()) throw std::invalid_argument("expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!j->is_number()) throw std::invalid_argument("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!j->is_string()) throw std::invalid_argument("expected a string");
      }
      return j->get<T>();
    } catch (const std::exception& e) {
      errors_.push_back(where(key) + ": " + e.what());
      return std::nullopt;
    }
  }

  template <class T>
  std::optional<std::vector<T>> list(const std::string& key, bool required = false) {
    const Json* j = raw(key, required);
    if (!j) return std::nullopt;
    if (!j->is_array()) {
      errors_.push_back(where(key) + " must be an array");
      return std::nullopt;
    }
    std::vector<T> out;
    for (const auto& e : *j) {
      const bool ok = std::is_integral_v<T> ? e.is_number_integer() : e.is_number();
      if (!ok) {
        errors_.push_back(where(key) + " has a non-" + (std::is_integral_v<T> ? "integer" : "numeric") + " entry");
        return std::nullopt;
      }
      out.push_back(e.get<T>());
    }
    return out;
  }

  void finish() {
    if (!valid_) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) errors_.push_back("unknown key \"" + key + "\" in " + path_);
    }
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }
  std::vector<std::string>& errors() { return errors_; }

 private:
  const Json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
  bool valid_ = true;
};

template <class Fn>
auto guarded(std::vector<std::string>& errors, const std::string& where, Fn&& fn) -> std::optional<decltype(fn())> {
  try {
    return fn();
  } catch (const std::exception& e) {
    errors.push_back(where + ": " + e.what());
    return std::nullopt;
  }
}

bool is_shorthand(const Json& j, const char* key) { return j.is_object() && j.size() == 1 && j.contains(key); }

std::optional<KernelSpec> parse_kernel(const Json& j, const std::string& where, std::vector<std::string>& errors) {
  return guarded(errors, where, [&] {
    if (is_shorthand(j, "kuramoto")) return KernelSpec::kuramoto(j.at("kuramoto").get<double>());
    if (is_shorthand(j, "zero")) return KernelSpec::zero(j.at("zero").get<int>());
    return kernel_from_json(j);
  });
}

std::optional<SpectralField> parse_density(const Json& j, const std::string& where, std::vector<std::string>& errors) {
  return guarded(errors, where, [&] {
    if (is_shorthand(j, "uniform")) {
      const int d = j.at("uniform").get<int>();
      if (d < 1) throw std::invalid_argument("uniform dimension must be >= 1");
      auto f = SpectralField::constant(1, d, 1, 1.0);
      f.set_real_tag(true);
      return f;
    }
    if (is_shorthand(j, "cosine")) {
      // 1 + a cos(2 pi x) on T^1
      const double a = j.at("cosine").get<double>();
      SpectralField f(1, 1, 1, true);
      f.set(FreqVec(1, std::vector<int>{0}), 1.0);
      f.set(FreqVec(1, std::vector<int>{1}), a / 2);
      f.set(FreqVec(1, std::vector<int>{-1}), a / 2);
      return f;
    }
    return field_from_json(j);
  });
}

std::optional<TestFunction> parse_test_function(const Json& j, const std::string& where,
                                                std::vector<std::string>& errors) {
  return guarded(errors, where, [&] {
    if (is_shorthand(j, "cosine")) return TestFunction::cosine(j.at("cosine").get<int>());
    if (is_shorthand(j, "fejer")) return TestFunction::fejer(j.at("fejer").get<int>());
    if (is_shorthand(j, "constant")) return TestFunction::constant(1, j.at("constant").get<double>());
    return TestFunction(field_from_json(j));
  });
}

SimConfig parse_sim(Section& s) {
  SimConfig c;
  if (auto v = s.get<int>("N", true)) c.N = *v;
  if (auto v = s.get<int>("d")) c.d = *v;
  if (auto v = s.get<double>("sigma", true)) c.sigma = *v;
  if (auto v = s.get<double>("dt", true)) c.dt = *v;
  if (auto v = s.get<double>("t_end", true)) c.t_end = *v;
  if (auto v = s.list<double>("obs_times")) c.obs_times = *v;
  if (auto v = s.get<int>("replicas", true)) c.replicas = *v;
  if (auto v = s.get<double>("envelope")) c.envelope = *v;
  if (auto v = s.get<std::string>("drift_mode")) {
    if (*v == "spectral") {
      c.drift_mode = DriftMode::spectral;
    } else if (*v == "direct") {
      c.drift_mode = DriftMode::direct;
    } else {
      s.errors().push_back(s.where("drift_mode") + " must be \"spectral\" or \"direct\"");
    }
  }
  if (const Json* k = s.raw("kernel", true)) {
    if (auto v = parse_kernel(*k, s.where("kernel"), s.errors())) c.kernel = *v;
  }
  if (const Json* r = s.raw("rho0", true)) {
    if (auto v = parse_density(*r, s.where("rho0"), s.errors())) c.rho0 = *v;
  }
  return c;
}

PdeRunConfig parse_pde(Section& s) {
  PdeRunConfig c;
  if (auto v = s.get<double>("sigma", true)) c.sigma = *v;
  if (auto v = s.get<double>("dt", true)) c.dt = *v;
  if (auto v = s.get<double>("t_end", true)) c.t_end = *v;
  if (auto v = s.list<double>("obs_times")) c.obs_times = *v;
  if (auto v = s.get<int>("cutoff")) c.cutoff = *v;
  if (auto v = s.get<bool>("flip_y_transport")) c.flip_y_transport = *v;
  if (const Json* k = s.raw("kernel", true)) {
    if (auto v = parse_kernel(*k, s.where("kernel"), s.errors())) c.kernel = *v;
  }
  if (const Json* r = s.raw("rho0", true)) {
    if (auto v = parse_density(*r, s.where("rho0"), s.errors())) c.rho0 = *v;
  }
  return c;
}

ChaosSection parse_chaos(Section& s) {
  ChaosSection c;
  if (auto v = s.list<int>("orders")) c.orders = *v;
  if (auto v = s.list<int>("Ns")) c.Ns = *v;
  if (auto v = s.list<int>("probe_values")) c.probe_values = *v;
  if (auto v = s.get<int>("probe_cutoff")) c.probe_cutoff = *v;
  if (auto v = s.get<bool>("include_zero_planes")) c.include_zero_planes = *v;
  if (c.orders.empty()) s.errors().push_back(s.where("orders") + " must not be empty");
  for (int m : c.orders) {
    if (m < 2 || m > 3) s.errors().push_back(s.where("orders") + " entries must be 2 or 3");
  }
  for (int N : c.Ns) {
    if (N < 4) s.errors().push_back(s.where("Ns") + " entries must be >= 4");
  }
  if (c.probe_values.empty() && c.probe_cutoff < 1) s.errors().push_back(s.where("probe_cutoff") + " must be >= 1");
  return c;
}

CltSection parse_clt(Section& s) {
  CltSection c;
  if (const Json* p = s.raw("phi", true)) {
    if (auto v = parse_test_function(*p, s.where("phi"), s.errors())) {
      c.phi = *v;
      c.phi_json = to_json(v->field());
    }
  }
  if (auto v = s.list<int>("Ns")) c.Ns = *v;
  if (auto v = s.get<int>("max_order")) c.max_order = *v;
  if (c.max_order < 2 || c.max_order > 8) s.errors().push_back(s.where("max_order") + " must lie in 2..8");
  for (int N : c.Ns) {
    if (N < 2) s.errors().push_back(s.where("Ns") + " entries must be >= 2");
  }
  return c;
}

PartitionAuditSection parse_partition_audit(Section& s) {
  PartitionAuditSection c;
  if (auto v = s.get<int>("max_m")) c.max_m = *v;
  if (auto v = s.list<std::int64_t>("Ns")) c.Ns = *v;
  if (c.max_m < 1 || c.max_m > 10) s.errors().push_back(s.where("max_m") + " must lie in 1..10");
  if (c.Ns.empty()) s.errors().push_back(s.where("Ns") + " must not be empty");
  for (auto N : c.Ns) {
    if (N < 1) s.errors().push_back(s.where("Ns") + " entries must be >= 1");
  }
  return c;
}

OperatorAuditSection parse_operator_audit(Section& s) {
  OperatorAuditSection c;
  auto& sh = c.shape;
  if (auto v = s.get<int>("trials")) sh.trials = *v;
  if (auto v = s.get<int>("cutoff")) sh.cutoff = *v;
  if (auto v = s.list<int>("dims")) sh.dims = *v;
  if (auto v = s.get<int>("max_vars")) sh.max_vars = *v;
  if (auto v = s.get<int>("max_kernel_modes")) sh.max_kernel_modes = *v;
  if (auto v = s.get<int>("nonzeros")) sh.nonzeros = *v;
  if (auto v = s.get<double>("tolerance")) c.tolerance = *v;
  if (sh.trials < 1) s.errors().push_back(s.where("trials") + " must be >= 1");
  if (sh.cutoff < 1) s.errors().push_back(s.where("cutoff") + " must be >= 1");
  if (sh.dims.empty()) s.errors().push_back(s.where("dims") + " must not be empty");
  for (int d : sh.dims) {
    if (d < 1 || d > 3) s.errors().push_back(s.where("dims") + " entries must lie in 1..3");
  }
  if (sh.max_vars < 1 || sh.max_vars > 3) s.errors().push_back(s.where("max_vars") + " must lie in 1..3");
  if (sh.max_kernel_modes < 1) s.errors().push_back(s.where("max_kernel_modes") + " must be >= 1");
  if (sh.nonzeros < 1) s.errors().push_back(s.where("nonzeros") + " must be >= 1");
  if (!(c.tolerance >= 0.0)) s.errors().push_back(s.where("tolerance") + " must be >= 0");
  return c;
}

struct Needs {
  bool sim, pde, chaos, clt, partition_audit, operator_audit;
};

Needs needs_of(Command c) {
  switch (c) {
    case Command::simulate: return {true, false, false, false, false, false};
    case Command::chaos: return {true, false, true, false, false, false};
    case Command::mv_solve: return {false, true, false, false, false, false};
    case Command::clt: return {true, false, false, true, false, false};
    case Command::partition_audit: return {false, false, false, false, true, false};
    case Command::operator_audit: return {false, false, false, false, false, true};
  }
  return {};
}

void add_prefixed(std::vector<std::string>& errors, const std::vector<std::string>& v) {
  errors.insert(errors.end(), v.begin(), v.end());
}

}  // namespace

std::string command_name(Command c) {
  for (const auto& [name, cmd] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations)) {}

FreqProbe ChaosSection::probe(int m, int d) const {
  return probe_values.empty() ? FreqProbe::box(m, d, probe_cutoff, include_zero_planes)
                              : FreqProbe::grid(m, d, probe_values, include_zero_planes);
}

ExperimentConfig parse_config(const Json& doc) {
  std::vector<std::string> errors;
  ExperimentConfig cfg;
  Section top(doc, "config", errors);
  if (!top.valid()) throw ConfigError(errors);

  std::optional<Command> command;
  if (auto name = top.get<std::string>("command", true)) {
    auto it = kCommands.find(*name);
    if (it == kCommands.end()) {
      errors.push_back("unknown command \"" + *name + "\"");
    } else {
      command = it->second;
    }
  }
  if (auto v = top.get<std::uint64_t>("seed")) cfg.seed = *v;
  if (auto v = top.get<std::string>("out")) cfg.out_dir = *v;

  auto section = [&](const char* key, auto&& parse, auto& slot) {
    const Json* j = top.raw(key, false);
    if (!j) return;
    Section s(*j, key, errors);
    if (!s.valid()) return;
    slot = parse(s);
    s.finish();
  };
  section("sim", parse_sim, cfg.sim);
  section("pde", parse_pde, cfg.pde);
  section("chaos", parse_chaos, cfg.chaos);
  section("clt", parse_clt, cfg.clt);
  section("partition_audit", parse_partition_audit, cfg.partition_audit);
  section("operator_audit", parse_operator_audit, cfg.operator_audit);
  top.finish();

  if (command) {
    cfg.command = *command;
    const Needs n = needs_of(*command);
    const std::string cmd = "command " + command_name(*command);
    auto require = [&](bool needed, bool present, const char* key, bool optional_ok = false) {
      if (needed && !present) errors.push_back(cmd + " requires a \"" + key + "\" section");
      if (!needed && present && !optional_ok) errors.push_back(cmd + " does not use a \"" + key + "\" section");
    };
    require(n.sim, top.has("sim"), "sim");
    require(n.pde, top.has("pde"), "pde", *command == Command::clt);
    require(n.chaos, top.has("chaos"), "chaos");
    require(n.clt, top.has("clt"), "clt");
    if (*command == Command::partition_audit && !cfg.partition_audit) cfg.partition_audit.emplace();
    if (*command == Command::operator_audit && !cfg.operator_audit) cfg.operator_audit.emplace();
    if (!n.partition_audit && top.has("partition_audit")) errors.push_back(cmd + " does not use a \"partition_audit\" section");
    if (!n.operator_audit && top.has("operator_audit")) errors.push_back(cmd + " does not use a \"operator_audit\" section");
  }

  if (cfg.sim) {
    cfg.sim->seed = cfg.seed;
    add_prefixed(errors, cfg.sim->violations());
    if (cfg.sim->rho0.num_vars() == 1 && cfg.sim->rho0.dim() == cfg.sim->d) {
      guarded(errors, "sim.rho0", [&] {
        check_density(cfg.sim->rho0);
        return true;
      });
    }
  }
  if (cfg.pde) add_prefixed(errors, cfg.pde->violations());
  if (cfg.chaos && cfg.sim && cfg.sim->d >= 1) {
    for (int m : cfg.chaos->orders) {
      if (m >= 2 && m <= 3) {
        guarded(errors, "chaos probe", [&] { return cfg.chaos->probe(m, cfg.sim->d).freqs.size(); });
      }
    }
  }
  if (cfg.clt && cfg.sim && cfg.clt->phi.dim() != cfg.sim->d) errors.push_back("clt.phi dimension differs from sim.d");
  if (cfg.clt && cfg.sim && cfg.sim->replicas < 10 * cfg.clt->max_order) {
    errors.push_back("sim.replicas must be >= 10 * clt.max_order");
  }
  if (cfg.clt && cfg.pde && cfg.sim) {
    if (cfg.pde->sigma != cfg.sim->sigma) errors.push_back("pde.sigma differs from sim.sigma");
    for (double t : cfg.sim->obs_times) {
      if (t > cfg.pde->t_end) errors.push_back("pde.t_end does not cover sim.obs_times");
    }
  }

  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  return parse_config(doc);
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Json serialize_config(const ExperimentConfig& c) {
  Json j;
  j["command"] = command_name(c.command);
  j["seed"] = c.seed;
  if (c.out_dir) j["out"] = *c.out_dir;
  if (c.sim) {
    const auto& s = *c.sim;
    Json o{{"N", s.N},
           {"d", s.d},
           {"sigma", s.sigma},
           {"dt", s.dt},
           {"t_end", s.t_end},
           {"obs_times", s.obs_times},
           {"replicas", s.replicas},
           {"drift_mode", s.drift_mode == DriftMode::spectral ? "spectral" : "direct"},
           {"kernel", to_json(s.kernel)},
           {"rho0", to_json(s.rho0)}};
    if (s.envelope) o["envelope"] = *s.envelope;
    j["sim"] = o;
  }
  if (c.pde) {
    const auto& p = *c.pde;
    j["pde"] = Json{{"sigma", p.sigma},   {"dt", p.dt},
                    {"t_end", p.t_end},   {"obs_times", p.obs_times},
                    {"cutoff", p.cutoff}, {"flip_y_transport", p.flip_y_transport},
                    {"kernel", to_json(p.kernel)}, {"rho0", to_json(p.rho0)}};
  }
  if (c.chaos) {
    const auto& h = *c.chaos;
    j["chaos"] = Json{{"orders", h.orders},
                      {"Ns", h.Ns},
                      {"probe_values", h.probe_values},
                      {"probe_cutoff", h.probe_cutoff},
                      {"include_zero_planes", h.include_zero_planes}};
  }
  if (c.clt) {
    j["clt"] = Json{{"phi", c.clt->phi_json}, {"Ns", c.clt->Ns}, {"max_order", c.clt->max_order}};
  }
  if (c.partition_audit) {
    j["partition_audit"] = Json{{"max_m", c.partition_audit->max_m}, {"Ns", c.partition_audit->Ns}};
  }
  if (c.operator_audit) {
    const auto& sh = c.operator_audit->shape;
    j["operator_audit"] = Json{{"trials", sh.trials},
                               {"cutoff", sh.cutoff},
                               {"dims", sh.dims},
                               {"max_vars", sh.max_vars},
                               {"max_kernel_modes", sh.max_kernel_modes},
                               {"nonzeros", sh.nonzeros},
                               {"tolerance", c.operator_audit->tolerance}};
  }
  return j;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ExperimentConfig& config) {
  Json j = serialize_config(config);
  j.erase("out");
  return fnv1a_hex(j.dump());
}

}  // namespace chaos::cli
