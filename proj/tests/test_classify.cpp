#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ymflow/classify.hpp"
#include "ymflow/sampling.hpp"

using namespace ymflow;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("trivial U(1) connection is polystable") {
  const GridGeometry g = make_geometry(16);
  const UnitaryConnection a = make_flat_connection(g, {1, GroupKind::U});
  ClassifyConfig cfg;
  cfg.flow.grad_tol = 1e-7;
  const Classification cls = classify(a, cfg);
  CHECK(cls.label == StabilityLabel::Polystable);
  CHECK(cls.final_energy < 1e-12);
  CHECK(cls.orbit_residual < 1e-10);
}

TEST_CASE("complex gauge of the flat SU(2) connection is at most polystable") {
  // flat connections over the torus always have toral holonomy (pi_1 is
  // abelian), so the limit is reducible and the stable label cannot occur
  const GridGeometry g = make_geometry(16);
  Rng rng(derive_seed(17, "stable", 0));
  const UnitaryConnection flat = make_flat_connection(g, {2, GroupKind::SU});
  const GaugeTransform gt =
      random_semistable_gauge(g, flat.twist, GroupKind::SU, rng, 0.25, 3e-4, 1);
  ClassifyConfig cfg;
  cfg.flow.grad_tol = 1e-6;
  cfg.flow.max_steps = 150000;
  const Classification cls = classify(gauge_act(gt, flat), cfg);
  CHECK(cls.converged);
  CHECK((cls.label == StabilityLabel::Polystable ||
         cls.label == StabilityLabel::Semistable));
  CHECK(cls.lambda_min < cfg.eps_irr);
  CHECK(cls.final_energy <= cls.m + cls.energy_band);
}

TEST_CASE("split L1 + L-1 classifies unstable with the right energy") {
  const GridGeometry g = make_geometry(16);
  Rng rng(derive_seed(17, "unstable", 0));
  const UnitaryConnection astd = make_split_connection(g, {1, -1});
  const GaugeTransform gt = random_parabolic_gauge(g, astd.twist, rng, 0.25, 0.005, 1);
  ClassifyConfig cfg;
  cfg.flow.grad_tol = 1e-1;
  cfg.flow.max_steps = 200000;
  const Classification cls = classify(gauge_act(gt, astd), cfg);
  REQUIRE(cls.label == StabilityLabel::Unstable);
  CHECK(std::abs(cls.final_energy - 4.0 * kPi * kPi) < 0.05 * 4.0 * kPi * kPi);

  const DominantDirectionResult dom = dominant_direction_from(cls);
  const double exact = 2.0 * kPi * std::sqrt(2.0);
  CHECK(std::abs(dom.norm - exact) < 0.05 * exact);
  CHECK(dom.hn_formula_norm == doctest::Approx(exact).epsilon(1e-9));
  REQUIRE(dom.block_degrees.size() == 2);
  CHECK(dom.block_degrees[0] == 1);
  CHECK(dom.block_degrees[1] == -1);
  CHECK(dom.weight_gap < 0.05 * exact);
}

TEST_CASE("dominant direction requires an unstable input") {
  const GridGeometry g = make_geometry(16);
  const UnitaryConnection flat = make_flat_connection(g, {2, GroupKind::SU});
  ClassifyConfig cfg;
  CHECK_THROWS_AS((void)dominant_direction(flat, cfg), std::invalid_argument);
}

TEST_CASE("classification is invariant under unitary gauge") {
  const GridGeometry g = make_geometry(16);
  Rng rng(derive_seed(17, "invariance", 0));
  const UnitaryConnection astd = make_split_connection(g, {1, -1});
  ClassifyConfig cfg;
  cfg.flow.grad_tol = 1e-3;
  const Classification c1 = classify(astd, cfg);
  const GaugeTransform u = constant_gauge(g, astd.twist, GroupKind::U, rng, true);
  const Classification c2 = classify(gauge_act_unitary(u, astd), cfg);
  CHECK(c1.label == c2.label);
  CHECK(std::abs(c1.final_energy - c2.final_energy) < 1e-8 * (1.0 + c1.final_energy));
}

TEST_CASE("laplacian lambda_min separates irreducible from reducible") {
  const GridGeometry g = make_geometry(12);
  // reducible: the split connection commutes with constant diagonals
  const UnitaryConnection split = make_split_connection(g, {1, -1});
  CHECK(laplacian_lambda_min(split) < 1e-6);
  // flat U(1): after projecting the central constants, the gap is the first
  // Laplacian eigenvalue (2 pi)^2
  const UnitaryConnection u1 = make_flat_connection(g, {1, GroupKind::U});
  const double lam = laplacian_lambda_min(u1);
  CHECK(lam > 1.0);
}

TEST_CASE("uniqueness experiment on the flat orbit (small grid)") {
  const GridGeometry g = make_geometry(12);
  const UnitaryConnection flat = make_flat_connection(g, {2, GroupKind::SU});
  FlowConfig cfg;
  cfg.grad_tol = 1e-6;
  cfg.max_steps = 100000;
  const UniquenessReport rep = uniqueness_experiment(flat, 3, cfg, 5, 0.25, 2,
                                                     GaugeSampler::DiagonalDominant, 3e-4);
  CHECK(rep.max_energy_gap < 1e-8);
  CHECK(rep.max_spectra_gap < 1e-3);
  CHECK(rep.degrees_agree);

  // degenerate single-trial pass
  const UniquenessReport one = uniqueness_experiment(flat, 1, cfg, 5, 0.25, 1,
                                                     GaugeSampler::DiagonalDominant, 3e-4);
  CHECK(one.max_energy_gap == 0.0);
}

TEST_CASE("uniqueness experiment on the split orbit (small grid)") {
  const GridGeometry g = make_geometry(16);
  const UnitaryConnection split = make_split_connection(g, {1, -1});
  FlowConfig cfg;
  cfg.grad_tol = 3e-4;
  cfg.max_steps = 200000;
  const UniquenessReport rep = uniqueness_experiment(split, 2, cfg, 7, 0.2, 2,
                                                     GaugeSampler::Parabolic, 1e-6);
  CHECK(rep.max_spectra_gap < 5e-3);
  CHECK(rep.degrees_agree);
  REQUIRE(!rep.degrees.empty());
  REQUIRE(rep.degrees[0].size() == 2);
  CHECK(rep.degrees[0][0] == 1);
  CHECK(rep.degrees[0][1] == -1);
}
