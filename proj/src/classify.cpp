#include "ymflow/classify.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

#include "ymflow/bundle.hpp"
#include "ymflow/sampling.hpp"

namespace ymflow {

namespace {
constexpr Complex kI{0.0, 1.0};
}

std::string to_string(StabilityLabel l) {
  switch (l) {
    case StabilityLabel::Stable: return "stable";
    case StabilityLabel::Polystable: return "polystable";
    case StabilityLabel::Semistable: return "semistable";
    case StabilityLabel::Unstable: return "unstable";
    default: return "undetermined";
  }
}

namespace {

LieSection new_section(const UnitaryConnection& a) {
  return LieSection{a.geo, a.twist, MatField(a.N(), a.n()), false};
}

LieSection laplacian_apply(const UnitaryConnection& a, const LieSection& xi) {
  return d_A_star(a, d_A(a, xi));
}

void project_central(const UnitaryConnection& a, LieSection& xi) {
  if (a.group.kind != GroupKind::U) return;
  // subtract the component along the constant section i * Id
  Complex mean{0, 0};
  const int N = a.N(), n = a.n();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) mean += Mat(xi.v.at(i, j)).trace();
  mean *= a.geo.site_weight() / static_cast<double>(n);
  // <xi, iId> / <iId, iId> * iId with <iId,iId> = n
  const Complex coef = mean / static_cast<double>(n) * static_cast<double>(n);
  const Complex sub = mean;  // projection coefficient times (1/n)*trace basis
  (void)coef;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      auto m = xi.v.at(i, j);
      for (int k = 0; k < n; ++k) m(k, k) -= sub / static_cast<double>(n);
    }
}

double section_inner(const LieSection& a, const LieSection& b) {
  return l2_inner(a.v, b.v, a.geo);
}

/// CG for the (positive semidefinite) Laplacian; returns the iterate.
LieSection cg_solve(const UnitaryConnection& a, const LieSection& b, int iters, double tol) {
  LieSection x = new_section(a);
  LieSection r = b;
  LieSection p = r;
  double rs = section_inner(r, r);
  const double rs0 = rs;
  for (int k = 0; k < iters && rs > tol * tol * rs0; ++k) {
    const LieSection ap = laplacian_apply(a, p);
    const double pap = section_inner(p, ap);
    if (pap <= 1e-300) break;
    const double alpha = rs / pap;
    for (int j = 0; j < a.N(); ++j)
      for (int i = 0; i < a.N(); ++i) {
        x.v.at(i, j) += alpha * Mat(p.v.at(i, j));
        r.v.at(i, j) -= alpha * Mat(ap.v.at(i, j));
      }
    const double rs_new = section_inner(r, r);
    const double beta = rs_new / rs;
    rs = rs_new;
    for (int j = 0; j < a.N(); ++j)
      for (int i = 0; i < a.N(); ++i)
        p.v.at(i, j) = Mat(r.v.at(i, j)) + beta * Mat(p.v.at(i, j));
  }
  return x;
}

UnitaryConnection coarsen(const UnitaryConnection& a) {
  const int N2 = a.N() / 2;
  UnitaryConnection c{GridGeometry{N2}, a.group, a.twist, MatField(N2, a.n()),
                      MatField(N2, a.n())};
  for (int j = 0; j < N2; ++j)
    for (int i = 0; i < N2; ++i) {
      c.ax.at(i, j) = a.ax.at(2 * i, 2 * j);
      c.ay.at(i, j) = a.ay.at(2 * i, 2 * j);
    }
  return c;
}

}  // namespace

double laplacian_lambda_min(const UnitaryConnection& a, int power_iters, int cg_iters,
                            double cg_tol) {
  Rng rng(derive_seed(0x5eed, "lambda_min", a.N()));
  LieSection x = random_smooth_section(a.geo, a.n(), a.group.kind, rng, 1.0, 2);
  x.twist = a.twist;
  project_central(a, x);
  double nrm = section_l2(x);
  if (nrm < 1e-14) throw std::runtime_error("lambda_min: degenerate start");
  x.v *= 1.0 / nrm;

  double rayleigh = section_inner(x, laplacian_apply(a, x));
  for (int it = 0; it < power_iters; ++it) {
    LieSection y = cg_solve(a, x, cg_iters, cg_tol);
    project_central(a, y);
    nrm = section_l2(y);
    if (nrm < 1e-250) break;
    y.v *= 1.0 / nrm;
    x = std::move(y);
    const double r = section_inner(x, laplacian_apply(a, x));
    const bool settled = std::abs(r - rayleigh) < 1e-4 * std::abs(r);
    rayleigh = r;
    if (settled && it >= 3) break;
  }
  return rayleigh;
}

Classification classify(const UnitaryConnection& a0, const ClassifyConfig& cfg) {
  Classification out;
  const CentralType tau = a0.tau();
  out.m = 0.5 * tau.norm_sq();

  OrbitTracker tracker(a0, TrackerScheme::Midpoint);
  std::vector<FlowObserver*> obs{&tracker};
  out.trace = run_flow(a0, cfg.flow, obs);
  out.converged = out.trace.converged;
  out.final_energy = ym_energy(out.trace.final);
  out.orbit_residual = tracker.residual(out.trace.final);

  if (!out.converged) {
    out.label = StabilityLabel::Undetermined;
    return out;
  }

  double band = cfg.energy_band_floor;
  if (cfg.refine_pair && a0.N() % 2 == 0 && a0.N() >= 16) {
    FlowConfig coarse_cfg = cfg.flow;
    coarse_cfg.max_steps = std::max<long long>(cfg.flow.max_steps / 2, 20000);
    const FlowTrace coarse = run_flow(coarsen(a0), coarse_cfg);
    const double de =
        coarse.converged ? std::abs(ym_energy(coarse.final) - out.final_energy) : 0.0;
    // a refinement pair that disagrees wildly means the two resolutions
    // landed in different basins; its band says nothing about the fine run
    if (coarse.converged && de <= 0.2 * (1.0 + std::max(out.final_energy, out.m))) {
      band = std::max(band, 3.0 * de);
    } else {
      band = std::max(band, 0.02 * (1.0 + out.m));
      out.refinement_unreliable = true;
    }
  }
  out.energy_band = band;

  if (out.final_energy > out.m + band) {
    out.label = StabilityLabel::Unstable;
    return out;
  }

  // energy at the minimum: semistable at least
  out.lambda_min = laplacian_lambda_min(out.trace.final);
  const bool irreducible =
      a0.group.discrete_center() && out.lambda_min > cfg.eps_irr;
  const bool in_orbit = out.orbit_residual <= cfg.flow.tol_track;  // proxy
  if (irreducible && in_orbit)
    out.label = StabilityLabel::Stable;
  else if (in_orbit)
    out.label = StabilityLabel::Polystable;
  else
    out.label = StabilityLabel::Semistable;
  return out;
}

DominantDirectionResult dominant_direction_from(const Classification& cls) {
  if (cls.label != StabilityLabel::Unstable)
    throw std::invalid_argument("dominant_direction: connection is not unstable");
  const UnitaryConnection& ainf = cls.trace.final;
  const CentralType tau = ainf.tau();

  LieSection xi = curvature(ainf);
  const Complex c = kI * tau.imag_coefficient();
  for (int j = 0; j < ainf.N(); ++j)
    for (int i = 0; i < ainf.N(); ++i) {
      auto m = xi.v.at(i, j);
      for (int k = 0; k < ainf.n(); ++k) m(k, k) -= c;
    }
  DominantDirectionResult out;
  out.norm = section_l2(xi);
  if (out.norm < 1e-12) throw std::runtime_error("dominant_direction: *F - tau vanishes");
  xi.v *= -1.0 / out.norm;
  out.xi_hat = xi;

  // along e^{it xi} the stratum-leak modes of the hover limit grow again, so
  // the weight may fail strict certification; the pairing at the integrand
  // minimum is the practical value
  WeightOptions wopts;
  wopts.t_max = 30.0;
  const WeightResult w = weight(ainf, xi, tau, wopts);
  out.weight_certified = w.finite;
  out.weight_at_limit = w.finite ? w.value : w.value_at_min;
  out.weight_gap = std::abs(-out.weight_at_limit - out.norm);

  const EigenFiltration filt = eigen_filtration(xi, ainf, 5e-2, 1e-3);
  out.block_degrees = filt.block_degrees;
  for (int m : filt.multiplicities) out.block_ranks.push_back(m);
  FiltrationSpec spec;
  for (size_t q = 0; q < filt.block_degrees.size(); ++q)
    spec.blocks.emplace_back(filt.multiplicities[q], filt.block_degrees[q]);
  bool strictly_decreasing = spec.blocks.size() >= 2;
  for (size_t q = 0; q + 1 < spec.blocks.size(); ++q)
    if (spec.block_slope(q) <= spec.block_slope(q + 1)) strictly_decreasing = false;
  if (strictly_decreasing) out.hn_formula_norm = dominant_weight(spec).norm;
  return out;
}

DominantDirectionResult dominant_direction(const UnitaryConnection& a0,
                                           const ClassifyConfig& cfg) {
  return dominant_direction_from(classify(a0, cfg));
}

std::vector<Eigen::VectorXd> curvature_spectra(const UnitaryConnection& a) {
  const LieSection f = curvature(a);
  std::vector<Eigen::VectorXd> out;
  out.reserve(a.geo.sites());
  for (int j = 0; j < a.N(); ++j)
    for (int i = 0; i < a.N(); ++i) {
      Eigen::SelfAdjointEigenSolver<Mat> es(Mat(kI * Mat(f.v.at(i, j))));
      out.push_back(es.eigenvalues());
    }
  return out;
}

double spectra_distance(const std::vector<Eigen::VectorXd>& s1,
                        const std::vector<Eigen::VectorXd>& s2, const GridGeometry& g,
                        bool optimize_shift) {
  const int N = g.N;
  auto dist_at = [&](int dx, int dy) {
    double s = 0.0;
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const int i2 = (i + dx) % N, j2 = (j + dy) % N;
        s += (s1[j * N + i] - s2[j2 * N + i2]).squaredNorm();
      }
    return std::sqrt(s * g.site_weight());
  };
  double best = dist_at(0, 0);
  if (!optimize_shift || best < 1e-8) return best;
  for (int dy = 0; dy < N; ++dy)
    for (int dx = 0; dx < N; ++dx) {
      if (dx == 0 && dy == 0) continue;
      best = std::min(best, dist_at(dx, dy));
    }
  return best;
}

namespace {

std::vector<long long> spectral_degrees(const UnitaryConnection& a) {
  constexpr double kPi = 3.14159265358979323846;
  const auto spectra = curvature_spectra(a);
  const int n = a.n();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (const auto& s : spectra) mean += s;
  mean *= a.geo.site_weight();
  // cluster by gaps of 0.5 and integer-quantize each cluster's trace;
  // reported in decreasing order, matching the filtration convention
  std::vector<long long> degs;
  int start = 0;
  for (int k = 1; k <= n; ++k) {
    if (k == n || mean[k] - mean[k - 1] > 0.5) {
      double tracesum = 0.0;
      for (int q = start; q < k; ++q) tracesum += mean[q];
      degs.push_back(std::llround(tracesum / (2.0 * kPi)));
      start = k;
    }
  }
  std::reverse(degs.begin(), degs.end());
  return degs;
}

}  // namespace

UniquenessReport uniqueness_experiment(const UnitaryConnection& a0, int trials,
                                       const FlowConfig& cfg, uint64_t seed,
                                       double gauge_amplitude, int threads,
                                       GaugeSampler sampler, double upper_amplitude) {
  if (trials < 1) throw std::invalid_argument("uniqueness_experiment: trials >= 1");
  UniquenessReport rep;
  rep.trials = trials;

  struct TrialOut {
    double energy;
    std::vector<Eigen::VectorXd> spectra;
    std::vector<long long> degrees;
  };
  auto run_one = [&](int t) {
    Rng rng(derive_seed(seed, "uniq_gauge", t));
    const GaugeTransform g = [&] {
      switch (sampler) {
        case GaugeSampler::Parabolic:
          return random_parabolic_gauge(a0.geo, a0.twist, rng, gauge_amplitude,
                                        upper_amplitude);
        case GaugeSampler::DiagonalDominant:
          return random_semistable_gauge(a0.geo, a0.twist, a0.group.kind, rng,
                                         gauge_amplitude, upper_amplitude);
        default:
          return random_gauge(a0.geo, a0.twist, a0.group.kind, rng, gauge_amplitude,
                              false);
      }
    }();
    const UnitaryConnection start = gauge_act(g, a0);
    const FlowTrace tr = run_flow(start, cfg);
    if (!tr.converged) throw std::runtime_error("uniqueness_experiment: trial did not converge");
    return TrialOut{ym_energy(tr.final), curvature_spectra(tr.final),
                    spectral_degrees(tr.final)};
  };

  std::vector<TrialOut> results;
  if (threads > 1) {
    std::vector<std::future<TrialOut>> futs;
    for (int t = 0; t < trials; ++t)
      futs.push_back(std::async(std::launch::async, run_one, t));
    for (auto& f : futs) results.push_back(f.get());
  } else {
    for (int t = 0; t < trials; ++t) results.push_back(run_one(t));
  }

  for (const auto& r : results) {
    rep.energies.push_back(r.energy);
    rep.degrees.push_back(r.degrees);
  }
  for (int i = 0; i < trials; ++i)
    for (int j = i + 1; j < trials; ++j) {
      rep.max_energy_gap =
          std::max(rep.max_energy_gap, std::abs(results[i].energy - results[j].energy));
      rep.max_spectra_gap = std::max(
          rep.max_spectra_gap,
          spectra_distance(results[i].spectra, results[j].spectra, a0.geo, true));
      if (results[i].degrees != results[j].degrees) rep.degrees_agree = false;
    }
  return rep;
}

}  // namespace ymflow
