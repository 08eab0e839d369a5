#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ymflow/flow.hpp"
#include "ymflow/sampling.hpp"

using namespace ymflow;

namespace {
constexpr double kPi = 3.14159265358979323846;

UnitaryConnection perturbed(const UnitaryConnection& a, Rng& rng, double amp) {
  UnitaryConnection out = a;
  const TangentField t = random_tangent(a, rng, amp, 2);
  for (int j = 0; j < a.N(); ++j)
    for (int i = 0; i < a.N(); ++i) {
      out.ax.at(i, j) += Mat(t.x.at(i, j));
      out.ay.at(i, j) += Mat(t.y.at(i, j));
    }
  return out;
}
}  // namespace

TEST_CASE("flow step at a Yang-Mills point is a fixed point") {
  const GridGeometry g = make_geometry(12);
  const UnitaryConnection a = make_split_connection(g, {1, -1});
  const auto [a2, dt] = flow_step(a, 1e-4);
  double diff = 0.0;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i)
      diff += (Mat(a2.ax.at(i, j)) - Mat(a.ax.at(i, j))).norm() +
              (Mat(a2.ay.at(i, j)) - Mat(a.ay.at(i, j))).norm();
  CHECK(diff < 1e-12);
}

TEST_CASE("accepted steps never increase the energy; first-order decrease") {
  const GridGeometry g = make_geometry(12);
  Rng rng(derive_seed(11, "step", 0));
  const UnitaryConnection a = random_connection(g, {2, GroupKind::SU}, rng, 1.0, 2);
  const double e0 = ym_energy(a);
  const double gn = l2_norm(grad_ym(a), g);
  const double dt = 1e-5;
  const auto [a2, used] = flow_step(a, dt);
  const double e1 = ym_energy(a2);
  CHECK(e1 <= e0);
  // dE = -dt ||grad||^2 to first order
  CHECK(std::abs((e0 - e1) - used * gn * gn) < 0.05 * used * gn * gn + 1e-12);
}

TEST_CASE("semistable flow reaches the flat minimum (small grid)") {
  const GridGeometry g = make_geometry(16);
  Rng rng(derive_seed(11, "semi", 0));
  const UnitaryConnection flat = make_flat_connection(g, {2, GroupKind::SU});
  const GaugeTransform gt =
      random_semistable_gauge(g, flat.twist, GroupKind::SU, rng, 0.3, 3e-4, 2);
  const UnitaryConnection a0 = gauge_act(gt, flat);

  FlowConfig cfg;
  cfg.grad_tol = 1e-6;
  cfg.max_steps = 100000;
  OrbitTracker tracker(a0, TrackerScheme::Midpoint);
  std::vector<FlowObserver*> obs{&tracker};
  const FlowTrace tr = run_flow(a0, cfg, obs);
  REQUIRE(tr.converged);
  CHECK(mu_norm(tr.final, tr.final.tau()) < 1e-5);
  for (size_t k = 1; k < tr.records.size(); ++k)
    CHECK(tr.records[k].energy <= tr.records[k - 1].energy + 1e-12);

  // orbit tracking: A(t) stays close to g(t)^{-1} A_0, determinants stay SU
  CHECK(tracker.residual(tr.final) < 5e-2);
  CHECK(tracker.det_drift() < 1e-6);
}

TEST_CASE("constant-curvature start converges immediately") {
  const GridGeometry g = make_geometry(12);
  const UnitaryConnection a = make_split_connection(g, {2, -2});
  FlowConfig cfg;
  cfg.grad_tol = 1e-8;
  const FlowTrace tr = run_flow(a, cfg);
  CHECK(tr.converged);
  CHECK(tr.steps == 0);
}

TEST_CASE("unstable split start flows to the split critical value (small grid)") {
  // a parabolic gauge stays on the Harder-Narasimhan stratum; the stopping
  // tolerance sits above the O(h) stratum-leak floor, so the flow halts on
  // the critical plateau
  const GridGeometry g = make_geometry(24);
  Rng rng(derive_seed(11, "unstable", 0));
  const UnitaryConnection astd = make_split_connection(g, {1, -1});
  const GaugeTransform gt = random_parabolic_gauge(g, astd.twist, rng, 0.25, 0.005, 1);
  const UnitaryConnection a0 = gauge_act(gt, astd);
  FlowConfig cfg;
  cfg.grad_tol = 8e-2;
  cfg.max_steps = 200000;
  const FlowTrace tr = run_flow(a0, cfg);
  REQUIRE(tr.converged);
  CHECK(std::abs(ym_energy(tr.final) - 4.0 * kPi * kPi) < 0.02 * 4.0 * kPi * kPi);
}

TEST_CASE("non-convergence is reported, not thrown") {
  const GridGeometry g = make_geometry(12);
  Rng rng(derive_seed(11, "noconv", 0));
  const UnitaryConnection a = random_connection(g, {2, GroupKind::SU}, rng, 1.0, 2);
  FlowConfig cfg;
  cfg.grad_tol = 1e-30;
  cfg.max_steps = 20;
  const FlowTrace tr = run_flow(a, cfg);
  CHECK(!tr.converged);
  CHECK(tr.stop_reason == "max_steps reached");
  CHECK_THROWS_AS((void)lojasiewicz_fit(tr), std::invalid_argument);
}

TEST_CASE("geodesic monitor: rho between lifted gauges") {
  const GridGeometry g = make_geometry(12);
  Rng rng(derive_seed(11, "rho", 0));
  const UnitaryConnection flat = make_flat_connection(g, {2, GroupKind::SU});
  const GaugeTransform g1 =
      random_semistable_gauge(g, flat.twist, GroupKind::SU, rng, 0.25, 3e-4, 1);
  const GaugeTransform g2 =
      random_semistable_gauge(g, flat.twist, GroupKind::SU, rng, 0.25, 3e-4, 1);

  // rho(g, g) = 0 and rho(e^{i eta} g, g) = ||eta|| for unitary-free eta
  CHECK(gauge_pair_rho(g1, g1) == doctest::Approx(0.0));
  LieSection eta = random_smooth_section(g, 2, GroupKind::SU, rng, 0.4, 1);
  LieSection ieta = eta;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) ieta.v.at(i, j) = Complex(0, 1) * Mat(eta.v.at(i, j));
  const GaugeTransform pre = exp_section(ieta);
  // g2' = g2 e^{i eta} pointwise: by definition g2 e^{i eta} u = g2' with
  // u = Id, so rho(g2, g2') = ||eta||
  GaugeTransform g2p = g2;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i)
      g2p.v.at(i, j) = Mat(g2.v.at(i, j)) * Mat(pre.v.at(i, j));
  CHECK(gauge_pair_rho(g2, g2p) == doctest::Approx(section_l2(eta)).epsilon(1e-9));

  const KNPairReport rep = run_kn_pair(flat, g1, g2, 0.1 * g.h() * g.h(), 1500, 10);
  CHECK(rep.rho0 > 0.0);
  CHECK(rep.max_uptick <= 1e-6 * rep.rho0);
  CHECK(rep.rho.back() <= rep.rho0);
}

TEST_CASE("lojasiewicz fit on a quadratic basin") {
  // the twisted U(1) minimum has a clean quadratic basin (the flow is linear
  // there), which is the Morse-type setting for the gamma = 1/2 decay
  const GridGeometry g = make_geometry(16);
  Rng rng(derive_seed(11, "loj", 0));
  const UnitaryConnection line = make_line_connection(g, 1);
  const UnitaryConnection a0 = perturbed(line, rng, 0.3);
  FlowConfig cfg;
  cfg.grad_tol = 1e-6;
  cfg.max_steps = 300000;
  cfg.record_every = 25;
  const FlowTrace tr = run_flow(a0, cfg);
  REQUIRE(tr.converged);
  const LojasiewiczFit fit = lojasiewicz_fit(tr);
  CHECK(fit.gamma == doctest::Approx(0.5).epsilon(0.2));
  CHECK(fit.points >= 5);
  // the energy-gap series is non-increasing
  for (size_t k = 1; k < tr.records.size(); ++k)
    CHECK(tr.records[k].energy <= tr.records[k - 1].energy + 1e-12);
}
