#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ymflow/flow.hpp"
#include "ymflow/lattice.hpp"

namespace ymflow {

/// Flow of the one-parameter subgroup action: solves dA/dt = L_A(zeta) for a
/// fixed complexified section zeta. When zeta is a constant matrix commuting
/// with the twist, the exact pointwise solution (conjugation of the dbar
/// datum by e^{t zeta}) is used; otherwise classical RK4.
UnitaryConnection one_param_action(const UnitaryConnection& a, const LieSection& zeta,
                                   double t, double dt_hint = 0.0);

/// e^{i t xi} acting on A (the curve used by the weights).
UnitaryConnection exp_i_action(const UnitaryConnection& a, const LieSection& xi, double t,
                               double dt_hint = 0.0);

struct WeightOptions {
  double t_max = 200.0;
  double cutoff = 1e-8;   // integrand decay threshold for a finite weight
  double blowup = 1e8;    // field-norm cap: beyond this the weight is infinite
  double dt = 0.0;        // 0: auto
  int samples_per_unit = 8;
};

struct WeightResult {
  bool finite = false;
  double value = 0.0;          // <*F_{A_t} - tau, xi> at the stopping time
  double tail_integral = 0.0;  // accumulated int ||d_{A_t} xi||^2 dt
  double t_stop = 0.0;
  double final_integrand = 0.0;
  double min_integrand = 0.0;      // smallest integrand value seen
  double value_at_min = 0.0;       // pairing at the integrand minimum
  std::string divergence_reason;   // set when infinite
  std::vector<double> sample_t;
  std::vector<double> sample_pairing;  // monotone non-decreasing samples
};

WeightResult weight(const UnitaryConnection& a, const LieSection& xi, const CentralType& tau,
                    const WeightOptions& opts = {});

struct EigenFiltration {
  std::vector<double> lambdas;        // strictly increasing, constant over sites
  std::vector<int> multiplicities;
  std::vector<MatField> projectors;   // partial sums pi_j, j = 1..r-1 plus total
  std::vector<double> residuals;      // ||(1 - pi_j) dbar_A pi_j||_{L^2}
  std::vector<long long> sub_degrees;    // c_1(E_j)
  std::vector<long long> block_degrees;  // c_1(D_j)
  double eigenvalue_spread = 0.0;     // max over sites of |lambda(site) - lambda|
};

/// Site-wise eigen decomposition of i*xi; requires site-constant eigenvalues
/// (the finite-weight certificate) and reports holomorphicity residuals and
/// blockwise degrees.
EigenFiltration eigen_filtration(const LieSection& xi, const UnitaryConnection& a,
                                 double constancy_tol = 1e-6, double merge_tol = 1e-6);

struct PushToLimitResult {
  UnitaryConnection a_plus;
  double offdiag_initial = 0.0;
  double offdiag_final = 0.0;
  double decay_bound = 0.0;  // offdiag_initial * exp(-gap * t_end)
  bool decayed = false;
};

/// A_+ = lim e^{i t xi} A realized at t_end, with the exponential decay of the
/// off-diagonal dbar blocks checked against the spectral gap of xi.
PushToLimitResult push_to_limit(const UnitaryConnection& a, const LieSection& xi,
                                double t_end);

struct MWCheckReport {
  double weight_value = 0.0;     // w_tau(A, xi)
  double lhs = 0.0;              // -w / ||xi||
  double min_rhs = 0.0;          // min over samples of ||*F_{gA} - tau||
  double flow_rhs = 0.0;         // value at the flow limit (if run)
  int violations = 0;            // samples with rhs < lhs - slack
  double tightest_gap = 0.0;     // min rhs - lhs
};

/// Moment-weight inequality harness: samples random complexified gauges and
/// optionally the Yang-Mills flow limit.
MWCheckReport mw_check(const UnitaryConnection& a, const LieSection& xi,
                       const CentralType& tau, int gauge_samples, uint64_t seed,
                       double slack = 1e-6, const std::optional<FlowConfig>& flow_cfg = {},
                       double gauge_amplitude = 0.35);

enum class SubgroupProjection { FullUnitary, SpecialUnitary };

struct ProjectionWeightReport {
  double w_sub = 0.0;      // w_tau(A, xi) for the projected direction
  double w_ambient = 0.0;  // w_{tau_H}(A, xi_H)
  double correction = 0.0; // int <tau_H - tau, xi>
  double gap = 0.0;        // |w_sub - w_ambient - correction|
};

/// Lemma-5.7-style comparison of the weight of xi_H in U(n) with the weight of
/// its orthogonal projection into the subgroup's Lie algebra.
ProjectionWeightReport projection_weight(const UnitaryConnection& a, const LieSection& xi_h,
                                         SubgroupProjection target,
                                         const WeightOptions& opts = {});

}  // namespace ymflow
