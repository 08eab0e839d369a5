#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ymflow/lattice.hpp"

namespace ymflow {

struct FlowConfig {
  double dt_init = 0.0;     // 0: use cfl_factor * h^2
  double dt_max = 0.0;      // 0: cfl_factor * h^2
  double cfl_factor = 0.2;  // step bound multiplier on h^2
  double dt_min = 1e-14;
  double grad_tol = 1e-5;
  long long max_steps = 200000;
  int record_every = 50;
  double tol_track = 1e-2;

  double resolved_dt_init(const GridGeometry& g) const;
  double resolved_dt_max(const GridGeometry& g) const;
};

struct FlowRecord {
  long long step = 0;
  double time = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double mu_norm = 0.0;
};

struct FlowTrace {
  std::vector<FlowRecord> records;
  UnitaryConnection final;
  bool converged = false;
  long long steps = 0;
  double time = 0.0;
  std::string stop_reason;
};

/// Called after every accepted step with the pre- and post-step state.
class FlowObserver {
 public:
  virtual ~FlowObserver() = default;
  virtual void on_step(long long step, double t, double dt, const UnitaryConnection& before,
                       const LieSection& f_before, const UnitaryConnection& after,
                       const LieSection& f_after) = 0;
};

/// One explicit Euler step A' = A - dt * d_A^* F_A with energy backtracking;
/// returns the accepted step size (halved as needed down to dt_min).
std::pair<UnitaryConnection, double> flow_step(const UnitaryConnection& a, double dt,
                                               const FlowConfig& cfg = {});

FlowTrace run_flow(const UnitaryConnection& a0, const FlowConfig& cfg,
                   const std::vector<FlowObserver*>& observers = {});

enum class TrackerScheme { Euler, Midpoint };

/// Integrates the Kempf-Ness lift g(t) with g^{-1} g' = i *F_{A(t)} alongside
/// the flow; A(t) = g(t)^{-1} A_0 up to the reported residual.
class OrbitTracker : public FlowObserver {
 public:
  OrbitTracker(const UnitaryConnection& a0, TrackerScheme scheme = TrackerScheme::Euler);
  OrbitTracker(const UnitaryConnection& a0, GaugeTransform g0,
               TrackerScheme scheme = TrackerScheme::Euler);

  void on_step(long long step, double t, double dt, const UnitaryConnection& before,
               const LieSection& f_before, const UnitaryConnection& after,
               const LieSection& f_after) override;

  const GaugeTransform& gauge() const { return g_; }
  /// || A - g^{-1} A_0 ||_{L^2}
  double residual(const UnitaryConnection& current) const;
  /// max |det g - expected| over sites; unit determinant for SU.
  double det_drift() const;

 private:
  UnitaryConnection a0_;
  GaugeTransform g_;
  TrackerScheme scheme_;
};

/// rho = ||eta||_{L^2} with g1 e^{i eta} u = g2 pointwise.
double gauge_pair_rho(const GaugeTransform& g1, const GaugeTransform& g2);

struct GeodesicMonitorReport {
  std::vector<double> times;
  std::vector<double> rho;
  double max_uptick = 0.0;  // max over consecutive records of rho_{k+1} - rho_k
};

/// Records rho(t) between two orbit trackers every `every` accepted steps.
class GeodesicMonitor : public FlowObserver {
 public:
  GeodesicMonitor(const OrbitTracker& t1, const OrbitTracker& t2, int every = 10);
  void on_step(long long step, double t, double dt, const UnitaryConnection&,
               const LieSection&, const UnitaryConnection&, const LieSection&) override;
  GeodesicMonitorReport report() const { return rep_; }

 private:
  const OrbitTracker& t1_;
  const OrbitTracker& t2_;
  int every_;
  GeodesicMonitorReport rep_;
};

struct KNPairReport {
  std::vector<double> times;
  std::vector<double> rho;
  double rho0 = 0.0;
  double max_uptick = 0.0;
};

/// Two Kempf-Ness flows with respect to the same a0, integrated on a shared
/// fixed time grid; reports rho(t) = ||eta(t)|| between the lifted gauges.
KNPairReport run_kn_pair(const UnitaryConnection& a0, const GaugeTransform& g10,
                         const GaugeTransform& g20, double dt, long long steps,
                         int record_every);

struct LojasiewiczFit {
  double gamma = 0.0;
  double c = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Least squares of log ||grad|| against log (E - E_inf) over the tail of a
/// converged trace. Diagnostic only.
LojasiewiczFit lojasiewicz_fit(const FlowTrace& trace);

/// Hermitian-eigendecomposition exponential of a skew field times i*dt:
/// exp(dt * i * F) pointwise.
Mat herm_exp(const Mat& hermitian);

}  // namespace ymflow
