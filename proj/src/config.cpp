#include "ymflow/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ymflow/sampling.hpp"
#include "ymflow/snapshot.hpp"

namespace ymflow {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& keys,
                    const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key()))
      throw ConfigError("config: unknown field '" + path + it.key() + "'");
}

template <typename T>
T get_or(const json& j, const std::string& key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field '" + key + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig parse_config_json(const json& j) {
  ExperimentConfig cfg;
  reject_unknown(j, {"N", "group", "twist", "seed", "threads", "start", "flow", "weight",
                     "kn_quad", "output"},
                 "");

  cfg.N = get_or<int>(j, "N", 16);
  if (cfg.N < 4) throw ConfigError("config: N must be at least 4");

  if (j.contains("group")) {
    const json& g = j.at("group");
    reject_unknown(g, {"kind", "n"}, "group.");
    const std::string kind = get_or<std::string>(g, "kind", "SU");
    if (kind == "SU")
      cfg.group.kind = GroupKind::SU;
    else if (kind == "U")
      cfg.group.kind = GroupKind::U;
    else
      throw ConfigError("config: group.kind must be 'U' or 'SU'");
    cfg.group.n = get_or<int>(g, "n", 2);
    if (cfg.group.n < 1 || cfg.group.n > kMaxFiber)
      throw ConfigError("config: group.n out of range [1, " + std::to_string(kMaxFiber) + "]");
  }

  cfg.twist_degrees.assign(cfg.group.n, 0);
  if (j.contains("twist")) {
    const json& t = j.at("twist");
    reject_unknown(t, {"degrees", "total_degree"}, "twist.");
    if (t.contains("degrees")) {
      cfg.twist_degrees = t.at("degrees").get<std::vector<long long>>();
      if (static_cast<int>(cfg.twist_degrees.size()) != cfg.group.n)
        throw ConfigError("config: twist.degrees must have group.n entries");
    }
    if (t.contains("total_degree")) {
      cfg.twist_total_declared = true;
      cfg.twist_total = t.at("total_degree").get<long long>();
      long long s = 0;
      for (long long d : cfg.twist_degrees) s += d;
      if (s != cfg.twist_total)
        throw ConfigError("config: twist.degrees sum to " + std::to_string(s) +
                          ", not the declared total_degree " + std::to_string(cfg.twist_total));
    }
  }
  if (cfg.group.kind == GroupKind::SU)
    for (long long d : cfg.twist_degrees)
      if (d != 0) throw ConfigError("config: SU(n) requires twist degrees all zero");

  cfg.seed = get_or<uint64_t>(j, "seed", 1);
  cfg.threads = get_or<int>(j, "threads", 1);
  if (cfg.threads < 1) throw ConfigError("config: threads must be positive");

  if (j.contains("start")) {
    const json& s = j.at("start");
    reject_unknown(s, {"kind", "path", "gauge_amplitude", "gauge_modes"}, "start.");
    cfg.start.kind = get_or<std::string>(s, "kind", "flat");
    if (cfg.start.kind != "flat" && cfg.start.kind != "split_standard" &&
        cfg.start.kind != "snapshot")
      throw ConfigError("config: start.kind must be flat, split_standard or snapshot");
    cfg.start.path = get_or<std::string>(s, "path", "");
    cfg.start.gauge_amplitude = get_or<double>(s, "gauge_amplitude", 0.0);
    cfg.start.gauge_modes = get_or<int>(s, "gauge_modes", 2);
    if (cfg.start.kind == "snapshot" && cfg.start.path.empty())
      throw ConfigError("config: start.kind snapshot requires start.path");
  }

  if (j.contains("flow")) {
    const json& f = j.at("flow");
    reject_unknown(f,
                   {"dt_init", "dt_max", "cfl_factor", "dt_min", "grad_tol", "max_steps",
                    "record_every", "tol_track"},
                   "flow.");
    cfg.flow.dt_init = get_or<double>(f, "dt_init", 0.0);
    cfg.flow.dt_max = get_or<double>(f, "dt_max", 0.0);
    cfg.flow.cfl_factor = get_or<double>(f, "cfl_factor", 0.2);
    cfg.flow.dt_min = get_or<double>(f, "dt_min", 1e-14);
    cfg.flow.grad_tol = get_or<double>(f, "grad_tol", 1e-5);
    cfg.flow.max_steps = get_or<long long>(f, "max_steps", 200000);
    cfg.flow.record_every = get_or<int>(f, "record_every", 50);
    cfg.flow.tol_track = get_or<double>(f, "tol_track", 1e-2);
    if (cfg.flow.grad_tol <= 0) throw ConfigError("config: flow.grad_tol must be positive");
    if (cfg.flow.cfl_factor <= 0) throw ConfigError("config: flow.cfl_factor must be positive");
  }

  if (j.contains("weight")) {
    const json& w = j.at("weight");
    reject_unknown(w, {"t_max", "cutoff", "blowup", "samples_per_unit"}, "weight.");
    cfg.weight.t_max = get_or<double>(w, "t_max", 200.0);
    cfg.weight.cutoff = get_or<double>(w, "cutoff", 1e-8);
    cfg.weight.blowup = get_or<double>(w, "blowup", 1e8);
    cfg.weight.samples_per_unit = get_or<int>(w, "samples_per_unit", 8);
  }

  cfg.kn_quad = get_or<int>(j, "kn_quad", 256);

  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, {"dir", "format", "trace_csv", "snapshot"}, "output.");
    cfg.output.dir = get_or<std::string>(o, "dir", ".");
    cfg.output.format = get_or<std::string>(o, "format", "json");
    if (cfg.output.format != "json" && cfg.output.format != "csv")
      throw ConfigError("config: output.format must be json or csv");
    cfg.output.trace_csv = get_or<std::string>(o, "trace_csv", "");
    cfg.output.snapshot = get_or<std::string>(o, "snapshot", "");
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_config_json(j);
}

json config_echo(const ExperimentConfig& cfg) {
  json j;
  j["N"] = cfg.N;
  j["group"] = {{"kind", cfg.group.kind == GroupKind::SU ? "SU" : "U"}, {"n", cfg.group.n}};
  j["twist"] = {{"degrees", cfg.twist_degrees}};
  if (cfg.twist_total_declared) j["twist"]["total_degree"] = cfg.twist_total;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["start"] = {{"kind", cfg.start.kind},
                {"path", cfg.start.path},
                {"gauge_amplitude", cfg.start.gauge_amplitude},
                {"gauge_modes", cfg.start.gauge_modes}};
  j["flow"] = {{"dt_init", cfg.flow.dt_init},
               {"dt_max", cfg.flow.dt_max},
               {"cfl_factor", cfg.flow.cfl_factor},
               {"dt_min", cfg.flow.dt_min},
               {"grad_tol", cfg.flow.grad_tol},
               {"max_steps", cfg.flow.max_steps},
               {"record_every", cfg.flow.record_every},
               {"tol_track", cfg.flow.tol_track}};
  j["weight"] = {{"t_max", cfg.weight.t_max},
                 {"cutoff", cfg.weight.cutoff},
                 {"blowup", cfg.weight.blowup},
                 {"samples_per_unit", cfg.weight.samples_per_unit}};
  j["kn_quad"] = cfg.kn_quad;
  j["output"] = {{"dir", cfg.output.dir},
                 {"format", cfg.output.format},
                 {"trace_csv", cfg.output.trace_csv},
                 {"snapshot", cfg.output.snapshot}};
  return j;
}

UnitaryConnection build_start(const ExperimentConfig& cfg) {
  UnitaryConnection a = [&] {
    if (cfg.start.kind == "snapshot") return load_connection(cfg.start.path);
    const GridGeometry g = make_geometry(cfg.N);
    if (cfg.start.kind == "split_standard") {
      UnitaryConnection c = make_split_connection(g, cfg.twist_degrees);
      c.group.kind = cfg.group.kind;
      return c;
    }
    UnitaryConnection c = make_flat_connection(g, cfg.group);
    c.twist = TwistData{cfg.twist_degrees};
    if (!c.twist.trivial())
      throw ConfigError("config: flat start requires trivial twist; use split_standard");
    return c;
  }();
  if (cfg.start.gauge_amplitude > 0.0) {
    Rng rng(derive_seed(cfg.seed, "start_gauge", 0));
    const GaugeTransform g = random_gauge(a.geo, a.twist, a.group.kind, rng,
                                          cfg.start.gauge_amplitude, false,
                                          cfg.start.gauge_modes);
    a = gauge_act(g, a);
  }
  return a;
}

bool ResultRecord::all_pass() const {
  for (const Assertion& a : assertions)
    if (!a.pass) return false;
  return true;
}

json ResultRecord::to_json() const {
  json j;
  j["command"] = command;
  j["version"] = "1";
  j["config"] = config;
  j["metrics"] = metrics;
  j["assertions"] = json::array();
  for (const Assertion& a : assertions)
    j["assertions"].push_back({{"name", a.name},
                               {"tolerance", a.tolerance},
                               {"measured", a.measured},
                               {"pass", a.pass}});
  j["all_pass"] = all_pass();
  j["wall_time_s"] = wall_time_s;
  return j;
}

std::string trace_to_csv(const FlowTrace& trace) {
  std::ostringstream os;
  os << "step,time,energy,grad_norm,mu_norm\n";
  os.precision(17);
  for (const FlowRecord& r : trace.records)
    os << r.step << "," << r.time << "," << r.energy << "," << r.grad_norm << ","
       << r.mu_norm << "\n";
  return os.str();
}

}  // namespace ymflow
