#include "ymflow/flow.hpp"

#include <cmath>
#include <stdexcept>

namespace ymflow {

namespace {
constexpr Complex kI{0.0, 1.0};

double energy_of(const LieSection& f) {
  const double n = section_l2(f);
  return 0.5 * n * n;
}

UnitaryConnection stepped(const UnitaryConnection& a, const TangentField& grad, double dt) {
  UnitaryConnection out = a;
  const int N = a.N();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      out.ax.at(i, j) -= dt * Mat(grad.x.at(i, j));
      out.ay.at(i, j) -= dt * Mat(grad.y.at(i, j));
    }
  return out;
}

}  // namespace

double FlowConfig::resolved_dt_init(const GridGeometry& g) const {
  const double cap = resolved_dt_max(g);
  if (dt_init > 0.0) return std::min(dt_init, cap);
  return cap;
}

double FlowConfig::resolved_dt_max(const GridGeometry& g) const {
  const double cfl = cfl_factor * g.h() * g.h();
  if (dt_max > 0.0) return std::min(dt_max, cfl);
  return cfl;
}

Mat herm_exp(const Mat& hermitian) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian);
  const auto& v = es.eigenvectors();
  Eigen::VectorXd ev = es.eigenvalues();
  Mat d = Mat::Zero(hermitian.rows(), hermitian.cols());
  for (int k = 0; k < ev.size(); ++k) d(k, k) = std::exp(ev[k]);
  return v * d * v.adjoint();
}

std::pair<UnitaryConnection, double> flow_step(const UnitaryConnection& a, double dt,
                                               const FlowConfig& cfg) {
  const LieSection f = curvature(a);
  const double e0 = energy_of(f);
  const TangentField grad = grad_from_curvature(a, f);
  while (true) {
    UnitaryConnection trial = stepped(a, grad, dt);
    const double e1 = ym_energy(trial);
    if (e1 <= e0 + 1e-15 * (1.0 + e0)) return {std::move(trial), dt};
    dt *= 0.5;
    if (dt < cfg.dt_min)
      throw std::runtime_error("flow_step: step underflow, no descent direction at dt_min");
  }
}

FlowTrace run_flow(const UnitaryConnection& a0, const FlowConfig& cfg,
                   const std::vector<FlowObserver*>& observers) {
  validate_connection(a0);
  const CentralType tau = a0.tau();
  double dt = cfg.resolved_dt_init(a0.geo);
  const double dt_cap = cfg.resolved_dt_max(a0.geo);

  FlowTrace trace{.records = {}, .final = a0, .converged = false, .steps = 0, .time = 0.0};
  UnitaryConnection a = a0;
  LieSection f = curvature(a);
  double energy = energy_of(f);
  double t = 0.0;

  auto record = [&](long long step, double gn) {
    LieSection df = f;
    const Complex c = kI * tau.imag_coefficient();
    for (int j = 0; j < a.N(); ++j)
      for (int i = 0; i < a.N(); ++i) {
        auto m = df.v.at(i, j);
        for (int k = 0; k < a.n(); ++k) m(k, k) -= c;
      }
    trace.records.push_back(FlowRecord{step, t, energy, gn, section_l2(df)});
  };

  long long step = 0;
  while (true) {
    const TangentField grad = grad_from_curvature(a, f);
    const double gn = l2_norm(grad, a.geo);
    if (step % cfg.record_every == 0) record(step, gn);
    if (gn < cfg.grad_tol) {
      if (step % cfg.record_every != 0) record(step, gn);
      trace.converged = true;
      trace.stop_reason = "grad_tol reached";
      break;
    }
    if (step >= cfg.max_steps) {
      trace.stop_reason = "max_steps reached";
      break;
    }

    bool accepted = false;
    while (!accepted) {
      UnitaryConnection trial = stepped(a, grad, dt);
      LieSection ftrial = curvature(trial);
      const double etrial = energy_of(ftrial);
      if (etrial <= energy + 1e-15 * (1.0 + energy)) {
        for (FlowObserver* obs : observers)
          obs->on_step(step, t, dt, a, f, trial, ftrial);
        a = std::move(trial);
        f = std::move(ftrial);
        energy = etrial;
        t += dt;
        accepted = true;
        dt = std::min(dt * 1.1, dt_cap);
      } else {
        dt *= 0.5;
        if (dt < cfg.dt_min) {
          trace.stop_reason = "step underflow (no descent at dt_min)";
          trace.final = a;
          trace.steps = step;
          trace.time = t;
          return trace;
        }
      }
    }
    ++step;
  }
  trace.final = std::move(a);
  trace.steps = step;
  trace.time = t;
  return trace;
}

OrbitTracker::OrbitTracker(const UnitaryConnection& a0, TrackerScheme scheme)
    : a0_(a0),
      g_{a0.geo, a0.twist, MatField(a0.N(), a0.n()), false},
      scheme_(scheme) {
  const Mat id = Mat::Identity(a0.n(), a0.n());
  for (int j = 0; j < a0.N(); ++j)
    for (int i = 0; i < a0.N(); ++i) g_.v.at(i, j) = id;
}

OrbitTracker::OrbitTracker(const UnitaryConnection& a0, GaugeTransform g0, TrackerScheme scheme)
    : a0_(a0), g_(std::move(g0)), scheme_(scheme) {}

void OrbitTracker::on_step(long long, double, double dt, const UnitaryConnection&,
                           const LieSection& f_before, const UnitaryConnection&,
                           const LieSection& f_after) {
  const int N = a0_.N();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      Mat h;
      if (scheme_ == TrackerScheme::Euler) {
        h = dt * (kI * Mat(f_before.v.at(i, j)));
      } else {
        h = 0.5 * dt * (kI * (Mat(f_before.v.at(i, j)) + Mat(f_after.v.at(i, j))));
      }
      // h is hermitian since *F is skew-hermitian
      g_.v.at(i, j) = Mat(g_.v.at(i, j)) * herm_exp(h);
    }
}

double OrbitTracker::residual(const UnitaryConnection& current) const {
  const UnitaryConnection back = gauge_act(gauge_inverse(g_), a0_);
  TangentField diff{current.ax, current.ay};
  diff.x -= back.ax;
  diff.y -= back.ay;
  return l2_norm(diff, current.geo);
}

double OrbitTracker::det_drift() const {
  double worst = 0.0;
  const int N = g_.N();
  const bool su = a0_.group.kind == GroupKind::SU;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const Complex det = Mat(g_.v.at(i, j)).determinant();
      if (su)
        worst = std::max(worst, std::abs(det - Complex(1, 0)));
      else
        worst = std::max(worst, std::abs(std::abs(det) > 0 ? 0.0 : 1.0));
    }
  return worst;
}

double gauge_pair_rho(const GaugeTransform& g1, const GaugeTransform& g2) {
  const int N = g1.N(), n = g1.n();
  MatField eta(N, n);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const Mat k = Mat(g1.v.at(i, j)).inverse() * Mat(g2.v.at(i, j));
      const Mat kk = k * k.adjoint();  // = e^{2 i eta}, positive definite
      Eigen::SelfAdjointEigenSolver<Mat> es(kk);
      Mat lg = Mat::Zero(n, n);
      for (int q = 0; q < n; ++q) lg(q, q) = std::log(std::max(es.eigenvalues()[q], 1e-300));
      const Mat h = es.eigenvectors() * lg * es.eigenvectors().adjoint();
      eta.at(i, j) = Complex(0, -0.5) * h;
    }
  return l2_norm(eta, g1.geo);
}

GeodesicMonitor::GeodesicMonitor(const OrbitTracker& t1, const OrbitTracker& t2, int every)
    : t1_(t1), t2_(t2), every_(every) {
  rep_.times.push_back(0.0);
  rep_.rho.push_back(gauge_pair_rho(t1_.gauge(), t2_.gauge()));
}

void GeodesicMonitor::on_step(long long step, double t, double dt, const UnitaryConnection&,
                              const LieSection&, const UnitaryConnection&, const LieSection&) {
  if (step % every_ != 0) return;
  const double r = gauge_pair_rho(t1_.gauge(), t2_.gauge());
  rep_.max_uptick = std::max(rep_.max_uptick, r - rep_.rho.back());
  rep_.times.push_back(t + dt);
  rep_.rho.push_back(r);
}

KNPairReport run_kn_pair(const UnitaryConnection& a0, const GaugeTransform& g10,
                         const GaugeTransform& g20, double dt, long long steps,
                         int record_every) {
  KNPairReport rep;
  GaugeTransform g1 = g10, g2 = g20;
  UnitaryConnection a1 = gauge_act(gauge_inverse(g1), a0);
  UnitaryConnection a2 = gauge_act(gauge_inverse(g2), a0);
  rep.rho0 = gauge_pair_rho(g1, g2);
  rep.times.push_back(0.0);
  rep.rho.push_back(rep.rho0);

  const int N = a0.N();
  auto advance = [&](UnitaryConnection& a, GaugeTransform& g) {
    const LieSection f = curvature(a);
    const TangentField grad = grad_from_curvature(a, f);
    UnitaryConnection next = a;
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        next.ax.at(i, j) -= dt * Mat(grad.x.at(i, j));
        next.ay.at(i, j) -= dt * Mat(grad.y.at(i, j));
      }
    const LieSection fnext = curvature(next);
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const Mat h = 0.5 * dt *
                      (kI * (Mat(f.v.at(i, j)) + Mat(fnext.v.at(i, j))));
        g.v.at(i, j) = Mat(g.v.at(i, j)) * herm_exp(h);
      }
    a = std::move(next);
  };

  for (long long s = 1; s <= steps; ++s) {
    advance(a1, g1);
    advance(a2, g2);
    if (s % record_every == 0 || s == steps) {
      const double r = gauge_pair_rho(g1, g2);
      rep.max_uptick = std::max(rep.max_uptick, r - rep.rho.back());
      rep.times.push_back(s * dt);
      rep.rho.push_back(r);
    }
  }
  return rep;
}

LojasiewiczFit lojasiewicz_fit(const FlowTrace& trace) {
  if (!trace.converged)
    throw std::invalid_argument("lojasiewicz_fit: trace did not converge");
  const double e_inf = trace.records.back().energy;
  const double e0 = trace.records.front().energy;
  std::vector<std::pair<double, double>> pts;  // (log gap, log grad)
  for (const FlowRecord& r : trace.records) {
    const double gap = r.energy - e_inf;
    if (gap < std::max(1e-13, 1e-12 * (1.0 + e0))) continue;
    if (gap > 0.5 * (e0 - e_inf + 1e-300)) continue;
    if (r.grad_norm <= 0.0) continue;
    pts.emplace_back(std::log(gap), std::log(r.grad_norm));
  }
  LojasiewiczFit fit;
  fit.points = static_cast<int>(pts.size());
  if (pts.size() < 5) throw std::runtime_error("lojasiewicz_fit: not enough tail records");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = pts.size();
  const double denom = m * sxx - sx * sx;
  fit.gamma = (m * sxy - sx * sy) / denom;
  fit.c = std::exp((sy - fit.gamma * sx) / m);
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / m;
  for (auto& [x, y] : pts) {
    const double pred = fit.gamma * x + std::log(fit.c);
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - ybar) * (y - ybar);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace ymflow
