#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ymflow/config.hpp"
#include "ymflow/kempf_ness.hpp"
#include "ymflow/snapshot.hpp"
#include "ymflow/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ymflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitAssertion = 4;

struct GlobalArgs {
  std::string config_path;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  std::string out_dir;
  std::string format;
};

ExperimentConfig load_config(const GlobalArgs& g) {
  ExperimentConfig cfg;
  if (!g.config_path.empty()) cfg = parse_config_file(g.config_path);
  if (g.seed_set) cfg.seed = g.seed;
  if (g.threads > 0) cfg.threads = g.threads;
  if (!g.out_dir.empty()) cfg.output.dir = g.out_dir;
  if (!g.format.empty()) cfg.output.format = g.format;
  return cfg;
}

void emit(const ExperimentConfig& cfg, const std::string& name, const json& j) {
  std::cout << j.dump(2) << "\n";
  if (!cfg.output.dir.empty() && cfg.output.dir != "-") {
    fs::create_directories(cfg.output.dir);
    std::ofstream f(fs::path(cfg.output.dir) / (name + ".json"));
    f << j.dump(2) << "\n";
  }
}

json rational_pair(const Rational& r) {
  return json::array({numerator(r).str(), denominator(r).str()});
}

int cmd_roots(const ExperimentConfig& cfg, int n) {
  const RootDatum rd = roots_type_A(n);
  json j;
  j["n"] = rd.n;
  j["rank"] = rd.rank;
  auto dump_vecs = [](const std::vector<std::vector<Rational>>& vs) {
    json arr = json::array();
    for (const auto& v : vs) {
      json row = json::array();
      for (const auto& r : v) row.push_back(rational_pair(r));
      arr.push_back(row);
    }
    return arr;
  };
  j["roots"] = dump_vecs(rd.roots);
  j["simple_roots"] = dump_vecs(rd.simple_roots);
  j["dual_basis"] = dump_vecs(rd.dual_basis);
  json refl = json::array();
  for (auto& [a, b] : rd.reflections) refl.push_back(json::array({a, b}));
  j["reflections"] = refl;
  emit(cfg, "roots", j);
  return kExitOk;
}

int cmd_hn(const ExperimentConfig& cfg, const std::string& input_path) {
  std::ifstream f(input_path);
  if (!f) {
    std::cerr << "hn: cannot open " << input_path << "\n";
    return kExitConfig;
  }
  json in;
  f >> in;

  FiltrationSpec hn;
  BundleType total;
  std::vector<BundleType> signatures;
  if (in.contains("degrees")) {
    const auto degrees = in.at("degrees").get<std::vector<long long>>();
    hn = hn_split(degrees);
    total = hn.total();
    const auto sigs = split_oracle(degrees)->admissible(total);
    if (sigs) signatures = *sigs;
  } else if (in.contains("rank") && in.contains("degree") && in.contains("signatures")) {
    total = BundleType{in.at("rank").get<long long>(), in.at("degree").get<long long>()};
    std::vector<std::pair<BundleType, std::vector<BundleType>>> table;
    std::vector<BundleType> sigs;
    for (const auto& s : in.at("signatures"))
      sigs.push_back(BundleType{s.at(0).get<long long>(), s.at(1).get<long long>()});
    signatures = sigs;
    table.emplace_back(total, sigs);
    hn = hn_from_oracle(total, *table_oracle(std::move(table)));
  } else {
    std::cerr << "hn: input must contain 'degrees' or 'rank'+'degree'+'signatures'\n";
    return kExitConfig;
  }

  json j;
  j["hn_blocks"] = json::array();
  for (auto& [n, k] : hn.blocks) j["hn_blocks"].push_back(json::array({n, k}));
  j["polygon_vertices"] = json::array();
  for (auto& [x, y] : polygon(hn).vertices)
    j["polygon_vertices"].push_back(json::array({x, y}));
  j["char_vector"] = json::array();
  for (const auto& r : char_vector(hn)) j["char_vector"].push_back(rat_str(r));
  if (hn.blocks.size() >= 2) {
    const DominantWeightResult dw = dominant_weight(hn);
    j["dominant_lambda"] = dw.lambdas;
    j["dominant_norm"] = dw.norm;
  } else {
    j["dominant_lambda"] = nullptr;
    j["dominant_norm"] = nullptr;
  }
  const AlgebraicClassification cls = classify_algebraic(total, signatures);
  j["classification"] = cls.cls == StabilityClass::Stable      ? "stable"
                        : cls.cls == StabilityClass::Unstable ? "unstable"
                                                              : "semistable";
  emit(cfg, "hn", j);
  return kExitOk;
}

int cmd_flow(const ExperimentConfig& cfg) {
  const UnitaryConnection a0 = build_start(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const FlowTrace tr = run_flow(a0, cfg.flow);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(cfg.output.dir);
  const std::string csv_name =
      cfg.output.trace_csv.empty() ? "flow_trace.csv" : cfg.output.trace_csv;
  {
    std::ofstream f(fs::path(cfg.output.dir) / csv_name, std::ios::binary);
    f << trace_to_csv(tr);
  }
  if (!cfg.output.snapshot.empty())
    save_connection(tr.final, (fs::path(cfg.output.dir) / cfg.output.snapshot).string());

  json j;
  j["command"] = "flow";
  j["config"] = config_echo(cfg);
  j["converged"] = tr.converged;
  j["steps"] = tr.steps;
  j["time"] = tr.time;
  j["stop_reason"] = tr.stop_reason;
  j["final_energy"] = ym_energy(tr.final);
  j["final_mu_norm"] = mu_norm(tr.final, tr.final.tau());
  j["trace_csv"] = csv_name;
  j["wall_time_s"] = secs;
  emit(cfg, "flow", j);
  return tr.converged ? kExitOk : kExitNoConvergence;
}

LieSection diag_section(const UnitaryConnection& a, const std::vector<double>& entries) {
  Mat m = Mat::Zero(a.n(), a.n());
  for (int k = 0; k < a.n(); ++k) m(k, k) = Complex(0.0, entries[k]);
  return constant_section(a, m);
}

int cmd_weight(const ExperimentConfig& cfg, const std::vector<double>& xi_diag) {
  const UnitaryConnection a = build_start(cfg);
  if (static_cast<int>(xi_diag.size()) != a.n()) {
    std::cerr << "weight: --xi-diag needs exactly n entries\n";
    return kExitConfig;
  }
  const LieSection xi = diag_section(a, xi_diag);
  const WeightResult w = weight(a, xi, a.tau(), cfg.weight);
  json j;
  j["command"] = "weight";
  j["config"] = config_echo(cfg);
  j["finite"] = w.finite;
  j["value"] = w.finite ? json(w.value) : json(nullptr);
  j["tail_integral"] = w.tail_integral;
  j["t_stop"] = w.t_stop;
  j["final_integrand"] = w.final_integrand;
  j["divergence_reason"] = w.divergence_reason;
  if (w.finite) {
    const EigenFiltration filt = eigen_filtration(xi, a, 1e-3, 1e-6);
    j["certified"] = true;
    j["residuals"] = filt.residuals;
    j["block_degrees"] = filt.block_degrees;
    j["lambdas"] = filt.lambdas;
  } else {
    j["certified"] = false;
  }
  emit(cfg, "weight", j);
  return kExitOk;
}

int cmd_kn(const ExperimentConfig& cfg, const std::vector<double>& xi_diag) {
  const UnitaryConnection a = build_start(cfg);
  if (static_cast<int>(xi_diag.size()) != a.n()) {
    std::cerr << "kn: --xi-diag needs exactly n entries\n";
    return kExitConfig;
  }
  const LieSection xi = diag_section(a, xi_diag);
  const KNEvaluation ev = kempf_ness_value(a, xi, a.tau(), cfg.kn_quad);
  json j;
  j["command"] = "kn";
  j["config"] = config_echo(cfg);
  j["value"] = ev.value;
  j["quad_n"] = ev.quad_n;
  j["refinement_gap"] = ev.refinement_gap;
  j["min_second_difference"] = ev.min_second_difference;
  emit(cfg, "kn", j);
  return kExitOk;
}

int cmd_classify(const ExperimentConfig& cfg) {
  const UnitaryConnection a0 = build_start(cfg);
  ClassifyConfig ccfg;
  ccfg.flow = cfg.flow;
  ccfg.threads = cfg.threads;
  const Classification cls = classify(a0, ccfg);
  json j;
  j["command"] = "classify";
  j["config"] = config_echo(cfg);
  j["label"] = to_string(cls.label);
  j["final_energy"] = cls.final_energy;
  j["m"] = cls.m;
  j["energy_band"] = cls.energy_band;
  j["lambda_min"] = cls.lambda_min;
  j["orbit_residual"] = cls.orbit_residual;
  j["orbit_proxy_note"] =
      "polystable vs semistable decided by the orbit-tracking residual, a proxy for "
      "membership of the limit in the complexified orbit";
  j["converged"] = cls.converged;
  if (cls.label == StabilityLabel::Unstable) {
    const DominantDirectionResult dom = dominant_direction_from(cls);
    j["dominant_norm"] = dom.norm;
    j["dominant_block_degrees"] = dom.block_degrees;
    j["dominant_block_ranks"] = dom.block_ranks;
    j["dominant_hn_formula_norm"] = dom.hn_formula_norm;
  }
  emit(cfg, "classify", j);
  // exit code encodes the label: 10 stable, 11 polystable, 12 semistable,
  // 13 unstable; 3 when the flow did not converge.
  switch (cls.label) {
    case StabilityLabel::Stable: return 10;
    case StabilityLabel::Polystable: return 11;
    case StabilityLabel::Semistable: return 12;
    case StabilityLabel::Unstable: return 13;
    default: return kExitNoConvergence;
  }
}

int cmd_verify(const ExperimentConfig& cfg, bool quick) {
  VerifyOptions vo;
  vo.seed = cfg.seed;
  vo.threads = cfg.threads;
  vo.quick = quick;
  vo.log = &std::cout;
  ResultRecord rec = run_verify(vo);
  rec.config = config_echo(cfg);
  emit(cfg, "verify", rec.to_json());
  return rec.all_pass() ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ymflow: Yang-Mills gradient flow and stability toolkit on the torus"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "JSON experiment config")
      ->envname("YMFLOW_CONFIG");
  auto* seed_opt =
      app.add_option("--seed", g.seed, "random seed override")->envname("YMFLOW_SEED");
  app.add_option("--threads", g.threads, "worker threads for trial batches")
      ->envname("YMFLOW_THREADS");
  app.add_option("--out", g.out_dir, "output directory")->envname("YMFLOW_OUT");
  app.add_option("--format", g.format, "output format: json or csv")
      ->envname("YMFLOW_FORMAT");

  auto* roots = app.add_subcommand("roots", "emit type-A root data as exact rationals");
  int roots_n = 3;
  roots->add_option("-n,--n", roots_n, "matrix size n for U(n)/SU(n)");

  auto* hn = app.add_subcommand("hn", "Harder-Narasimhan data for a bundle description");
  std::string hn_input;
  hn->add_option("input", hn_input, "JSON file: {degrees:[..]} or {rank, degree, signatures}")
      ->required();

  auto* flow = app.add_subcommand("flow", "run the Yang-Mills gradient flow");
  auto* weightc = app.add_subcommand("weight", "weight w_tau(A, xi) for a diagonal xi");
  auto* kn = app.add_subcommand("kn", "Kempf-Ness functional value along e^{i xi}");
  std::vector<double> xi_diag;
  weightc->add_option("--xi-diag", xi_diag, "diagonal of -i*xi (imaginary parts)");
  kn->add_option("--xi-diag", xi_diag, "diagonal of -i*xi (imaginary parts)");

  auto* classifyc = app.add_subcommand("classify", "classify a connection via the flow");
  auto* verifyc = app.add_subcommand("verify", "run the full acceptance/invariant suite");
  bool quick = false;
  verifyc->add_flag("--quick", quick, "reduced sizes (smoke run, not the acceptance gate)");

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0 || std::getenv("YMFLOW_SEED") != nullptr;

  try {
    const ExperimentConfig cfg = load_config(g);
    if (roots->parsed()) return cmd_roots(cfg, roots_n);
    if (hn->parsed()) return cmd_hn(cfg, hn_input);
    if (flow->parsed()) return cmd_flow(cfg);
    if (weightc->parsed()) return cmd_weight(cfg, xi_diag);
    if (kn->parsed()) return cmd_kn(cfg, xi_diag);
    if (classifyc->parsed()) return cmd_classify(cfg);
    if (verifyc->parsed()) return cmd_verify(cfg, quick);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const SnapshotError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
