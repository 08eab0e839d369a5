#pragma once

#include <vector>

#include "ymflow/flow.hpp"
#include "ymflow/lattice.hpp"

namespace ymflow {

struct KNEvaluation {
  double value = 0.0;
  int quad_n = 0;
  std::vector<double> nodes;            // midpoint nodes in [0, 1]
  std::vector<double> integrand;        // <*F_{e^{-i t xi} A} - tau, -xi>
  std::vector<double> deriv_samples;    // ||d_{A_t} xi||^2 >= 0
  double refinement_gap = 0.0;          // |value - previous refinement|
  double min_second_difference = 0.0;   // of the integrand, scaled by 1/dt
};

/// Phi_A(e^{i xi}) by composite midpoint quadrature along the geodesic, with
/// the node count doubled until two successive values agree to 1e-7.
KNEvaluation kempf_ness_value(const UnitaryConnection& a, const LieSection& xi,
                              const CentralType& tau, int quad_n = 256,
                              int max_refine = 3);

/// Phi_A(g) along the geodesic representative of g = e^{i xi} u.
KNEvaluation kempf_ness_of_gauge(const UnitaryConnection& a, const GaugeTransform& g,
                                 const CentralType& tau, int quad_n = 256);

/// xi with g = e^{i xi} u (left polar decomposition, pointwise).
LieSection polar_xi(const GaugeTransform& g);
/// the unitary factor u = e^{-i xi} g.
GaugeTransform polar_unitary(const GaugeTransform& g);

struct CocycleReport {
  double lhs = 0.0;  // Phi_{h^{-1}A}(h^{-1} g)
  double rhs = 0.0;  // Phi_A(g) - Phi_A(h)
  double gap = 0.0;
  double scale = 0.0;  // 1 + |Phi_A(g)|
};

CocycleReport kn_cocycle_check(const UnitaryConnection& a, const GaugeTransform& g,
                               const GaugeTransform& h, const CentralType& tau,
                               int quad_n = 256);

struct KNFlowTrend {
  std::vector<double> times;
  std::vector<double> phi;      // Phi_A(g(t)) accumulated along the flow
  double tail_slope = 0.0;      // average dPhi/dt over the last quarter
  double mu_inf_sq = 0.0;       // ||*F - tau||^2 at the end
  bool bounded_looking = false; // tail slope within tolerance of zero
};

/// Phi along the Kempf-Ness flow: dPhi/dt = -||*F_{A(t)} - tau||^2, so the
/// functional is evaluated for free along a Yang-Mills flow run. Semistable
/// data gives a bounded trace, unstable data a linear decrease.
KNFlowTrend kn_flow_trend(const UnitaryConnection& a0, const FlowConfig& cfg);

}  // namespace ymflow
