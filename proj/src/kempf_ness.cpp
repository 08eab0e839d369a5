#include "ymflow/kempf_ness.hpp"

#include <cmath>
#include <stdexcept>

#include "ymflow/weights.hpp"

namespace ymflow {

namespace {
constexpr Complex kI{0.0, 1.0};

double pairing_minus_xi(const UnitaryConnection& at, const LieSection& xi,
                        const CentralType& tau) {
  LieSection f = curvature(at);
  const Complex c = kI * tau.imag_coefficient();
  for (int j = 0; j < at.N(); ++j)
    for (int i = 0; i < at.N(); ++i) {
      auto m = f.v.at(i, j);
      for (int k = 0; k < at.n(); ++k) m(k, k) -= c;
    }
  return -l2_inner(f.v, xi.v, at.geo);
}

KNEvaluation midpoint_pass(const UnitaryConnection& a, const LieSection& xi,
                           const CentralType& tau, int quad_n) {
  KNEvaluation ev;
  ev.quad_n = quad_n;
  const double dt = 1.0 / quad_n;
  // walk t from 0 to 1 through the midpoints via the exact/RK one-parameter
  // action; each sample advances by dt.
  UnitaryConnection at = exp_i_action(a, xi, -0.5 * dt);
  double sum = 0.0;
  for (int k = 0; k < quad_n; ++k) {
    const double t = (k + 0.5) * dt;
    const double m = pairing_minus_xi(at, xi, tau);
    const TangentField d = d_A(at, xi);
    const double s = l2_norm(d, at.geo);
    ev.nodes.push_back(t);
    ev.integrand.push_back(m);
    ev.deriv_samples.push_back(s * s);
    sum += m;
    if (k + 1 < quad_n) at = exp_i_action(at, xi, -dt);
  }
  ev.value = sum * dt;
  double min2 = 0.0;
  for (size_t k = 1; k + 1 < ev.integrand.size(); ++k) {
    const double d2 =
        (ev.integrand[k + 1] - 2.0 * ev.integrand[k] + ev.integrand[k - 1]) / dt;
    min2 = std::min(min2, d2);
  }
  ev.min_second_difference = min2;
  return ev;
}

}  // namespace

KNEvaluation kempf_ness_value(const UnitaryConnection& a, const LieSection& xi,
                              const CentralType& tau, int quad_n, int max_refine) {
  KNEvaluation ev = midpoint_pass(a, xi, tau, quad_n);
  for (int r = 0; r < max_refine; ++r) {
    KNEvaluation fine = midpoint_pass(a, xi, tau, ev.quad_n * 2);
    fine.refinement_gap = std::abs(fine.value - ev.value);
    ev = std::move(fine);
    if (ev.refinement_gap <= 1e-7 * (1.0 + std::abs(ev.value))) break;
  }
  return ev;
}

LieSection polar_xi(const GaugeTransform& g) {
  const int N = g.N(), n = g.n();
  LieSection xi{g.geo, g.twist, MatField(N, n), false};
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const Mat gm = g.v.at(i, j);
      const Mat gg = gm * gm.adjoint();  // = e^{2 i xi}, positive definite
      Eigen::SelfAdjointEigenSolver<Mat> es(gg);
      Mat lg = Mat::Zero(n, n);
      for (int q = 0; q < n; ++q) lg(q, q) = std::log(std::max(es.eigenvalues()[q], 1e-300));
      const Mat h = es.eigenvectors() * lg * es.eigenvectors().adjoint();
      xi.v.at(i, j) = Complex(0, -0.5) * h;
    }
  return xi;
}

GaugeTransform polar_unitary(const GaugeTransform& g) {
  const LieSection xi = polar_xi(g);
  GaugeTransform u = g;
  u.unitary = true;
  const int N = g.N();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const Mat h = kI * Mat(xi.v.at(i, j));  // hermitian, e^{i xi} = herm_exp(h)
      u.v.at(i, j) = herm_exp(-h) * Mat(g.v.at(i, j));
    }
  return u;
}

KNEvaluation kempf_ness_of_gauge(const UnitaryConnection& a, const GaugeTransform& g,
                                 const CentralType& tau, int quad_n) {
  const LieSection xi = polar_xi(g);
  return kempf_ness_value(a, xi, tau, quad_n);
}

CocycleReport kn_cocycle_check(const UnitaryConnection& a, const GaugeTransform& g,
                               const GaugeTransform& h, const CentralType& tau,
                               int quad_n) {
  CocycleReport rep;
  const KNEvaluation pg = kempf_ness_of_gauge(a, g, tau, quad_n);
  const KNEvaluation ph = kempf_ness_of_gauge(a, h, tau, quad_n);
  // h^{-1} A through the polar pieces: h = e^{i eta} u, so h^{-1}(A) =
  // u^{-1}(e^{-i eta}(A)) with the geodesic factor applied as the exact
  // one-parameter flow.
  const LieSection eta = polar_xi(h);
  const UnitaryConnection ea = exp_i_action(a, eta, -1.0);
  const GaugeTransform u = polar_unitary(h);
  const UnitaryConnection ha = gauge_act(gauge_inverse(u), ea);
  const GaugeTransform hg = gauge_compose(gauge_inverse(h), g);
  const KNEvaluation lhs = kempf_ness_of_gauge(ha, hg, tau, quad_n);
  rep.lhs = lhs.value;
  rep.rhs = pg.value - ph.value;
  rep.gap = std::abs(rep.lhs - rep.rhs);
  rep.scale = 1.0 + std::abs(pg.value);
  return rep;
}

namespace {

class PhiAccumulator final : public FlowObserver {
 public:
  explicit PhiAccumulator(const CentralType& tau) : tau_(tau) {}

  void on_step(long long, double t, double dt, const UnitaryConnection& before,
               const LieSection& f_before, const UnitaryConnection&,
               const LieSection&) override {
    const Complex c = kI * tau_.imag_coefficient();
    LieSection df = f_before;
    for (int j = 0; j < before.N(); ++j)
      for (int i = 0; i < before.N(); ++i) {
        auto m = df.v.at(i, j);
        for (int k = 0; k < before.n(); ++k) m(k, k) -= c;
      }
    const double mu2 = l2_norm(df.v, before.geo);
    phi_ -= mu2 * mu2 * dt;
    times_.push_back(t + dt);
    phi_series_.push_back(phi_);
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& phi() const { return phi_series_; }

 private:
  CentralType tau_;
  double phi_ = 0.0;
  std::vector<double> times_;
  std::vector<double> phi_series_;
};

}  // namespace

KNFlowTrend kn_flow_trend(const UnitaryConnection& a0, const FlowConfig& cfg) {
  const CentralType tau = a0.tau();
  PhiAccumulator acc(tau);
  std::vector<FlowObserver*> obs{&acc};
  const FlowTrace tr = run_flow(a0, cfg, obs);

  KNFlowTrend out;
  out.times = acc.times();
  out.phi = acc.phi();
  const double mu = mu_norm(tr.final, tau);
  out.mu_inf_sq = mu * mu;
  if (out.times.size() >= 8) {
    const size_t q = out.times.size() / 4;
    const size_t i0 = out.times.size() - q, i1 = out.times.size() - 1;
    const double dtspan = out.times[i1] - out.times[i0];
    out.tail_slope = dtspan > 0 ? (out.phi[i1] - out.phi[i0]) / dtspan : 0.0;
  }
  out.bounded_looking = std::abs(out.tail_slope) < 1e-6 + 1e-3 * std::abs(out.phi.back());
  return out;
}

}  // namespace ymflow
