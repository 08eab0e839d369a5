#include "ymflow/weights.hpp"

#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "ymflow/bundle.hpp"
#include "ymflow/sampling.hpp"

namespace ymflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr Complex kI{0.0, 1.0};

bool constant_twist_commuting(const LieSection& zeta, Mat& value, double tol = 1e-13) {
  const int N = zeta.N();
  value = zeta.v.at(0, 0);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      if ((Mat(zeta.v.at(i, j)) - value).norm() > tol * (1.0 + value.norm())) return false;
  return zeta.twist.commutes(value, 1e-13);
}

/// dbar datum B = (A_x + i A_y)/2 and back.
MatField dbar_datum(const UnitaryConnection& a) {
  MatField b(a.N(), a.n());
  for (int j = 0; j < a.N(); ++j)
    for (int i = 0; i < a.N(); ++i)
      b.at(i, j) = 0.5 * (Mat(a.ax.at(i, j)) + kI * Mat(a.ay.at(i, j)));
  return b;
}

void rebuild_from_dbar(UnitaryConnection& a, const MatField& b) {
  for (int j = 0; j < a.N(); ++j)
    for (int i = 0; i < a.N(); ++i) {
      const Mat bm = b.at(i, j);
      a.ax.at(i, j) = bm - bm.adjoint();
      a.ay.at(i, j) = -kI * (bm + bm.adjoint());
    }
}

/// Time derivative of A along the infinitesimal action of zeta.
TangentField action_velocity(const UnitaryConnection& a, const LieSection& zeta) {
  return infinitesimal_action(a, zeta);
}

UnitaryConnection add_scaled(const UnitaryConnection& a, const TangentField& t, double s) {
  UnitaryConnection out = a;
  for (int j = 0; j < a.N(); ++j)
    for (int i = 0; i < a.N(); ++i) {
      out.ax.at(i, j) += s * Mat(t.x.at(i, j));
      out.ay.at(i, j) += s * Mat(t.y.at(i, j));
    }
  return out;
}

UnitaryConnection rk4_step(const UnitaryConnection& a, const LieSection& zeta, double dt) {
  const TangentField k1 = action_velocity(a, zeta);
  const TangentField k2 = action_velocity(add_scaled(a, k1, 0.5 * dt), zeta);
  const TangentField k3 = action_velocity(add_scaled(a, k2, 0.5 * dt), zeta);
  const TangentField k4 = action_velocity(add_scaled(a, k3, dt), zeta);
  UnitaryConnection out = a;
  for (int j = 0; j < a.N(); ++j)
    for (int i = 0; i < a.N(); ++i) {
      out.ax.at(i, j) += (dt / 6.0) * (Mat(k1.x.at(i, j)) + 2.0 * Mat(k2.x.at(i, j)) +
                                       2.0 * Mat(k3.x.at(i, j)) + Mat(k4.x.at(i, j)));
      out.ay.at(i, j) += (dt / 6.0) * (Mat(k1.y.at(i, j)) + 2.0 * Mat(k2.y.at(i, j)) +
                                       2.0 * Mat(k3.y.at(i, j)) + Mat(k4.y.at(i, j)));
    }
  return out;
}

double zeta_scale(const LieSection& zeta) {
  return std::max(1e-12, section_linf(zeta));
}

}  // namespace

UnitaryConnection one_param_action(const UnitaryConnection& a, const LieSection& zeta,
                                   double t, double dt_hint) {
  Mat zconst;
  if (constant_twist_commuting(zeta, zconst)) {
    // exact pointwise solution: B(t) = e^{t zeta} B(0) e^{-t zeta}
    const CMatrix z = zconst;
    const CMatrix ez = (t * z).exp();
    const CMatrix ezi = (-t * z).exp();
    MatField b = dbar_datum(a);
    for (int j = 0; j < a.N(); ++j)
      for (int i = 0; i < a.N(); ++i) b.at(i, j) = Mat(ez * Mat(b.at(i, j)) * ezi);
    UnitaryConnection out = a;
    rebuild_from_dbar(out, b);
    return out;
  }
  double dt = dt_hint > 0.0 ? dt_hint : 0.05 / zeta_scale(zeta);
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt)));
  dt = t / steps;
  UnitaryConnection out = a;
  for (int s = 0; s < steps; ++s) out = rk4_step(out, zeta, dt);
  return out;
}

UnitaryConnection exp_i_action(const UnitaryConnection& a, const LieSection& xi, double t,
                               double dt_hint) {
  LieSection zeta = xi;
  zeta.complexified = true;
  for (int j = 0; j < a.N(); ++j)
    for (int i = 0; i < a.N(); ++i) zeta.v.at(i, j) = kI * Mat(xi.v.at(i, j));
  return one_param_action(a, zeta, t, dt_hint);
}

namespace {

double moment_pairing(const UnitaryConnection& a, const LieSection& xi,
                      const CentralType& tau) {
  LieSection f = curvature(a);
  const Complex c = kI * tau.imag_coefficient();
  for (int j = 0; j < a.N(); ++j)
    for (int i = 0; i < a.N(); ++i) {
      auto m = f.v.at(i, j);
      for (int k = 0; k < a.n(); ++k) m(k, k) -= c;
    }
  return l2_inner(f.v, xi.v, a.geo);
}

double integrand(const UnitaryConnection& a, const LieSection& xi) {
  const TangentField d = d_A(a, xi);
  const double n = l2_norm(d, a.geo);
  return n * n;
}

}  // namespace

WeightResult weight(const UnitaryConnection& a, const LieSection& xi, const CentralType& tau,
                    const WeightOptions& opts) {
  if (section_l2(xi) < 1e-14) throw std::invalid_argument("weight: xi must be nonzero");
  WeightResult out;
  const double dt = opts.dt > 0.0 ? opts.dt : 1.0 / opts.samples_per_unit;

  UnitaryConnection at = a;
  double t = 0.0;
  double s_prev = integrand(at, xi);
  const double s0 = s_prev;
  out.sample_t.push_back(t);
  out.sample_pairing.push_back(moment_pairing(at, xi, tau));
  out.min_integrand = s_prev;
  out.value_at_min = out.sample_pairing.back();
  if (s_prev < opts.cutoff) {
    out.finite = true;
    out.value = out.sample_pairing.back();
    out.final_integrand = s_prev;
    return out;
  }

  while (t < opts.t_max) {
    const double step = std::min(dt, opts.t_max - t);
    UnitaryConnection next = exp_i_action(at, xi, step, opts.dt);
    const double field_norm =
        std::max(l2_norm(next.ax, a.geo), l2_norm(next.ay, a.geo));
    if (!std::isfinite(field_norm) || field_norm > opts.blowup) {
      out.finite = false;
      out.divergence_reason = "field blowup along e^{it xi}";
      out.t_stop = t;
      out.final_integrand = s_prev;
      return out;
    }
    at = std::move(next);
    t += step;
    const double s = integrand(at, xi);
    out.tail_integral += 0.5 * (s + s_prev) * step;
    s_prev = s;
    out.sample_t.push_back(t);
    out.sample_pairing.push_back(moment_pairing(at, xi, tau));
    if (s < out.min_integrand) {
      out.min_integrand = s;
      out.value_at_min = out.sample_pairing.back();
    }
    if (s > std::max(1e4 * (1.0 + s0), 1e6)) {
      out.finite = false;
      out.divergence_reason = "growing integrand";
      out.t_stop = t;
      out.final_integrand = s;
      return out;
    }
    if (s < opts.cutoff) {
      out.finite = true;
      out.t_stop = t;
      out.final_integrand = s;
      out.value = out.sample_pairing.back();
      return out;
    }
  }
  out.finite = false;
  out.divergence_reason = "integrand did not decay below cutoff by t_max";
  out.t_stop = t;
  out.final_integrand = s_prev;
  return out;
}

EigenFiltration eigen_filtration(const LieSection& xi, const UnitaryConnection& a,
                                 double constancy_tol, double merge_tol) {
  const int N = xi.N(), n = xi.n();
  // reference spectrum at the first site
  Eigen::SelfAdjointEigenSolver<Mat> ref(Mat(kI * Mat(xi.v.at(0, 0))));
  const Eigen::VectorXd lam_ref = ref.eigenvalues();

  EigenFiltration out;
  double spread = 0.0;

  // block structure from the reference spectrum
  std::vector<int> block_of(n);
  {
    int b = 0;
    block_of[0] = 0;
    for (int k = 1; k < n; ++k) {
      if (lam_ref[k] - lam_ref[k - 1] > merge_tol) ++b;
      block_of[k] = b;
    }
    const int blocks = b + 1;
    out.lambdas.assign(blocks, 0.0);
    out.multiplicities.assign(blocks, 0);
    for (int k = 0; k < n; ++k) {
      out.lambdas[block_of[k]] += lam_ref[k];
      out.multiplicities[block_of[k]] += 1;
    }
    for (int q = 0; q < blocks; ++q) out.lambdas[q] /= out.multiplicities[q];
  }
  const int blocks = static_cast<int>(out.lambdas.size());
  if (blocks < 1) throw std::runtime_error("eigen_filtration: empty spectrum");

  // site-wise projectors onto the partial sums E_j = D_1 + ... + D_j
  std::vector<MatField> pi(blocks, MatField(N, n));
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      Eigen::SelfAdjointEigenSolver<Mat> es(Mat(kI * Mat(xi.v.at(i, j))));
      const Eigen::VectorXd lam = es.eigenvalues();
      for (int k = 0; k < n; ++k)
        spread = std::max(spread, std::abs(lam[k] - lam_ref[k]));
      const Mat v = es.eigenvectors();
      Mat acc = Mat::Zero(n, n);
      int k = 0;
      for (int q = 0; q < blocks; ++q) {
        for (int c = 0; c < out.multiplicities[q]; ++c, ++k)
          acc += v.col(k) * v.col(k).adjoint();
        pi[q].at(i, j) = acc;
      }
    }
  out.eigenvalue_spread = spread;
  if (spread > constancy_tol)
    throw std::runtime_error(
        "eigen_filtration: eigenvalue field is not constant (weight not finite)");

  // holomorphicity residuals (1 - pi) dbar_A pi
  const Seam seam(a.geo, a.twist);
  const double invh = static_cast<double>(N);
  const MatField b = dbar_datum(a);
  for (int q = 0; q < blocks; ++q) {
    MatField res(N, n);
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const Mat p = pi[q].at(i, j);
        const Mat dbar_p = 0.5 * ((seam.ad(pi[q], i + 1, j) - p) * invh +
                                  kI * (seam.ad(pi[q], i, j + 1) - p) * invh) +
                           Mat(b.at(i, j)) * p - p * Mat(b.at(i, j));
        res.at(i, j) = (Mat::Identity(n, n) - p) * dbar_p;
      }
    out.residuals.push_back(l2_norm(res, a.geo));
    out.sub_degrees.push_back(degree(a, pi[q]));
  }
  for (int q = 0; q < blocks; ++q)
    out.block_degrees.push_back(out.sub_degrees[q] - (q == 0 ? 0 : out.sub_degrees[q - 1]));
  out.projectors = std::move(pi);
  return out;
}

PushToLimitResult push_to_limit(const UnitaryConnection& a, const LieSection& xi,
                                double t_end) {
  const EigenFiltration filt = eigen_filtration(xi, a);
  const int blocks = static_cast<int>(filt.lambdas.size());
  if (blocks < 2) {
    // xi central: nothing to push
    return PushToLimitResult{a, 0.0, 0.0, 0.0, true};
  }
  double gap = 1e300;
  for (int q = 0; q + 1 < blocks; ++q)
    gap = std::min(gap, filt.lambdas[q + 1] - filt.lambdas[q]);

  auto offdiag_norm = [&](const UnitaryConnection& c) {
    const MatField b = dbar_datum(c);
    MatField off(c.N(), c.n());
    for (int j = 0; j < c.N(); ++j)
      for (int i = 0; i < c.N(); ++i) {
        Mat bm = b.at(i, j);
        Mat blockpart = Mat::Zero(c.n(), c.n());
        for (int q = 0; q < blocks; ++q) {
          const Mat pq = q == 0 ? Mat(filt.projectors[0].at(i, j))
                                : Mat(filt.projectors[q].at(i, j)) -
                                      Mat(filt.projectors[q - 1].at(i, j));
          blockpart += pq * bm * pq;
        }
        off.at(i, j) = bm - blockpart;
      }
    return l2_norm(off, c.geo);
  };

  PushToLimitResult out{a, offdiag_norm(a), 0.0, 0.0, false};
  out.a_plus = exp_i_action(a, xi, t_end);
  out.offdiag_final = offdiag_norm(out.a_plus);
  out.decay_bound = out.offdiag_initial * std::exp(-gap * t_end);
  out.decayed = out.offdiag_final <= 10.0 * out.decay_bound + 1e-12;
  if (!out.decayed)
    throw std::runtime_error("push_to_limit: off-diagonal blocks did not decay");
  return out;
}

MWCheckReport mw_check(const UnitaryConnection& a, const LieSection& xi,
                       const CentralType& tau, int gauge_samples, uint64_t seed,
                       double slack, const std::optional<FlowConfig>& flow_cfg,
                       double gauge_amplitude) {
  MWCheckReport rep;
  const WeightResult w = weight(a, xi, tau);
  if (!w.finite) throw std::invalid_argument("mw_check: weight is not finite");
  rep.weight_value = w.value;
  rep.lhs = -w.value / section_l2(xi);

  double min_rhs = mu_norm(a, tau);
  for (int s = 0; s < gauge_samples; ++s) {
    Rng rng(derive_seed(seed, "mw_gauge", s));
    const GaugeTransform g =
        random_gauge(a.geo, a.twist, a.group.kind, rng, gauge_amplitude, false);
    const UnitaryConnection ga = gauge_act(g, a);
    const double rhs = mu_norm(ga, tau);
    min_rhs = std::min(min_rhs, rhs);
    if (rhs < rep.lhs - slack) ++rep.violations;
  }
  rep.min_rhs = min_rhs;
  if (flow_cfg) {
    const FlowTrace tr = run_flow(a, *flow_cfg);
    rep.flow_rhs = mu_norm(tr.final, tau);
    min_rhs = std::min(min_rhs, rep.flow_rhs);
    if (rep.flow_rhs < rep.lhs - slack) ++rep.violations;
  }
  rep.tightest_gap = min_rhs - rep.lhs;
  return rep;
}

ProjectionWeightReport projection_weight(const UnitaryConnection& a, const LieSection& xi_h,
                                         SubgroupProjection target,
                                         const WeightOptions& opts) {
  ProjectionWeightReport rep;
  const CentralType tau_h = a.tau();

  LieSection xi = xi_h;
  CentralType tau_sub = tau_h;
  if (target == SubgroupProjection::SpecialUnitary) {
    const int n = a.n();
    for (int j = 0; j < a.N(); ++j)
      for (int i = 0; i < a.N(); ++i) {
        auto m = xi.v.at(i, j);
        const Complex t = m.trace() / static_cast<double>(n);
        for (int k = 0; k < n; ++k) m(k, k) -= t;
      }
    tau_sub = CentralType{a.n(), Rational(0)};  // Z(su(n)) = 0
  }

  const WeightResult wh = weight(a, xi_h, tau_h, opts);
  const WeightResult ws = weight(a, xi, tau_sub, opts);
  if (!wh.finite || !ws.finite)
    throw std::invalid_argument("projection_weight: weights must be finite");
  rep.w_ambient = wh.value;
  rep.w_sub = ws.value;

  // int <tau_H - tau, xi>; both central types are multiples of i * Id
  const double ch = tau_h.imag_coefficient();
  const double cs = tau_sub.imag_coefficient();
  double corr = 0.0;
  for (int j = 0; j < a.N(); ++j)
    for (int i = 0; i < a.N(); ++i) {
      const Complex tr = Mat(xi.v.at(i, j)).trace();
      // <c i Id, xi> = Re tr((c i Id) xi^*) = c * Im(tr xi)... with xi skew,
      // tr xi is purely imaginary: Re(c i conj(tr xi)) = c * Im(tr xi).
      corr += (ch - cs) * tr.imag() * a.geo.site_weight();
    }
  rep.correction = corr;
  rep.gap = std::abs(rep.w_sub - rep.w_ambient - rep.correction);
  return rep;
}

}  // namespace ymflow
