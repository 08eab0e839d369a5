#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ymflow/config.hpp"
#include "ymflow/sampling.hpp"
#include "ymflow/snapshot.hpp"

using namespace ymflow;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ymflow_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};
}  // namespace

TEST_CASE("minimal config fills defaults") {
  const json j = {{"N", 32}, {"group", {{"kind", "SU"}, {"n", 2}}}};
  const ExperimentConfig cfg = parse_config_json(j);
  CHECK(cfg.N == 32);
  CHECK(cfg.group.kind == GroupKind::SU);
  CHECK(cfg.flow.grad_tol == 1e-5);
  CHECK(cfg.weight.t_max == 200.0);
  CHECK(cfg.seed == 1);
  const json echo = config_echo(cfg);
  CHECK(echo.at("flow").at("cfl_factor") == 0.2);
}

TEST_CASE("unknown fields are rejected by name") {
  const json j = {{"N", 16}, {"grop", 1}};
  CHECK_THROWS_WITH_AS((void)parse_config_json(j), "config: unknown field 'grop'",
                       ConfigError);
  const json j2 = {{"flow", {{"dtmax", 1.0}}}};
  CHECK_THROWS_WITH_AS((void)parse_config_json(j2), "config: unknown field 'flow.dtmax'",
                       ConfigError);
}

TEST_CASE("twist consistency rules") {
  const json j = {{"group", {{"kind", "U"}, {"n", 2}}},
                  {"twist", {{"degrees", {1, -1}}, {"total_degree", 1}}}};
  CHECK_THROWS_AS((void)parse_config_json(j), ConfigError);
  const json ok = {{"group", {{"kind", "U"}, {"n", 2}}},
                   {"twist", {{"degrees", {1, -1}}, {"total_degree", 0}}}};
  CHECK(parse_config_json(ok).twist_degrees == std::vector<long long>({1, -1}));
  const json su = {{"group", {{"kind", "SU"}, {"n", 2}}},
                   {"twist", {{"degrees", {1, -1}}}}};
  CHECK_THROWS_AS((void)parse_config_json(su), ConfigError);
}

TEST_CASE("snapshot round trip is bitwise") {
  TempDir tmp;
  const GridGeometry g = make_geometry(8);
  Rng rng(derive_seed(23, "snap", 0));
  UnitaryConnection a = make_split_connection(g, {1, -1});
  const TangentField t = random_tangent(a, rng, 0.7, 2);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      a.ax.at(i, j) += Mat(t.x.at(i, j));
      a.ay.at(i, j) += Mat(t.y.at(i, j));
    }
  const std::string p = (tmp.path / "conn.ymf").string();
  save_connection(a, p);
  const UnitaryConnection b = load_connection(p);
  CHECK(b.N() == a.N());
  CHECK(b.n() == a.n());
  CHECK(b.twist.degrees == a.twist.degrees);
  CHECK(a.ax.raw() == b.ax.raw());
  CHECK(a.ay.raw() == b.ay.raw());
}

TEST_CASE("snapshot error paths: truncation and version mismatch") {
  TempDir tmp;
  const GridGeometry g = make_geometry(8);
  const UnitaryConnection a = make_flat_connection(g, {2, GroupKind::SU});
  const std::string p = (tmp.path / "conn.ymf").string();
  save_connection(a, p);

  // truncate
  const auto size = fs::file_size(p);
  fs::resize_file(p, size / 2);
  CHECK_THROWS_AS((void)load_connection(p), SnapshotError);

  // version tag mismatch
  save_connection(a, p);
  {
    std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(6);
    f.write("99", 2);
  }
  CHECK_THROWS_AS((void)load_connection(p), SnapshotError);
}

TEST_CASE("section snapshot round trip") {
  TempDir tmp;
  const GridGeometry g = make_geometry(8);
  Rng rng(derive_seed(23, "sect", 0));
  const LieSection s = random_smooth_section(g, 2, GroupKind::U, rng, 1.0, 2);
  const std::string p = (tmp.path / "sect.ymf").string();
  save_section(s, GroupKind::U, p);
  const LieSection s2 = load_section(p);
  CHECK(s.v.raw() == s2.v.raw());
}

TEST_CASE("flow trace CSV is deterministic for a fixed seed") {
  const json j = {{"N", 8},
                  {"group", {{"kind", "SU"}, {"n", 2}}},
                  {"seed", 42},
                  {"start", {{"kind", "flat"}, {"gauge_amplitude", 0.2}}},
                  {"flow", {{"grad_tol", 1e-4}, {"max_steps", 2000}, {"record_every", 10}}}};
  const ExperimentConfig cfg = parse_config_json(j);
  const FlowTrace t1 = run_flow(build_start(cfg), cfg.flow);
  const FlowTrace t2 = run_flow(build_start(cfg), cfg.flow);
  CHECK(trace_to_csv(t1) == trace_to_csv(t2));
  CHECK(trace_to_csv(t1).rfind("step,time,energy,grad_norm,mu_norm\n", 0) == 0);
}

TEST_CASE("build_start variants") {
  {
    const json j = {{"N", 8}, {"group", {{"kind", "U"}, {"n", 2}}},
                    {"twist", {{"degrees", {1, -1}}}},
                    {"start", {{"kind", "split_standard"}}}};
    const UnitaryConnection a = build_start(parse_config_json(j));
    CHECK(a.twist.degrees == std::vector<long long>({1, -1}));
    CHECK(ym_energy(a) > 1.0);
  }
  {
    const json j = {{"N", 8}, {"group", {{"kind", "U"}, {"n", 2}}},
                    {"twist", {{"degrees", {1, -1}}}}};
    CHECK_THROWS_AS((void)build_start(parse_config_json(j)), ConfigError);
  }
}
