#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ymflow/flow.hpp"
#include "ymflow/weights.hpp"

namespace ymflow {

enum class StabilityLabel { Stable, Polystable, Semistable, Unstable, Undetermined };

std::string to_string(StabilityLabel l);

struct ClassifyConfig {
  FlowConfig flow;
  double eps_irr = 1e-6;       // spectral-gap threshold for irreducibility
  bool refine_pair = true;     // estimate the discretization band from an N/2 run
  double energy_band_floor = 1e-6;
  int threads = 1;
};

struct Classification {
  StabilityLabel label = StabilityLabel::Undetermined;
  double final_energy = 0.0;
  double m = 0.0;            // (1/2) ||tau||^2
  double energy_band = 0.0;  // tolerance band used around m
  double lambda_min = 0.0;   // smallest Laplacian eigenvalue beyond the central kernel
  double orbit_residual = 0.0;
  bool orbit_proxy = true;   // polystable/semistable split is a residual proxy
  bool refinement_unreliable = false;  // N/2 run landed in another basin
  bool converged = false;
  FlowTrace trace;
};

Classification classify(const UnitaryConnection& a0, const ClassifyConfig& cfg);

/// Smallest eigenvalue of Delta_A = d_A^* d_A on compact sections, with the
/// constant central section projected out for U(n); inverse power iteration
/// with conjugate-gradient solves.
double laplacian_lambda_min(const UnitaryConnection& a, int power_iters = 25,
                            int cg_iters = 400, double cg_tol = 1e-10);

struct DominantDirectionResult {
  LieSection xi_hat;            // normalized -(*F_inf - tau)
  double norm = 0.0;            // ||*F_inf - tau||_{L^2} = -w/||xi||
  double weight_at_limit = 0.0; // numeric w_tau(A_inf, xi_hat)
  bool weight_certified = false;
  double weight_gap = 0.0;      // | -weight_at_limit - norm |
  std::vector<long long> block_degrees;
  std::vector<int> block_ranks;
  double hn_formula_norm = 0.0; // 2 pi sqrt(||mu||^2 - rk mu^2) from the blocks
};

/// Dominant destabilizing direction extracted from the flow limit of an
/// unstable connection, cross-checked against the exact filtration formula.
DominantDirectionResult dominant_direction(const UnitaryConnection& a0,
                                           const ClassifyConfig& cfg);
DominantDirectionResult dominant_direction_from(const Classification& cls);

struct UniquenessReport {
  int trials = 0;
  std::vector<double> energies;
  std::vector<std::vector<long long>> degrees;  // diagonal factor degrees per trial
  double max_energy_gap = 0.0;
  double max_spectra_gap = 0.0;  // L^2 distance of sorted *F spectra fields
  bool degrees_agree = true;
};

enum class GaugeSampler {
  Generic,           // exp of a random complexified section
  Parabolic,         // stabilizer of the clutching flag; stays on the HN stratum
  DiagonalDominant,  // diagonal part plus a small generic factor
};

/// Flows several random complexified gauge images of a0 and compares the
/// gauge-invariant data of the limits.
UniquenessReport uniqueness_experiment(const UnitaryConnection& a0, int trials,
                                       const FlowConfig& cfg, uint64_t seed,
                                       double gauge_amplitude = 0.3, int threads = 1,
                                       GaugeSampler sampler = GaugeSampler::Generic,
                                       double upper_amplitude = 0.0);

/// Sorted pointwise spectra of i * (*F) as scalar fields; gauge invariant.
std::vector<Eigen::VectorXd> curvature_spectra(const UnitaryConnection& a);

/// L^2 distance between two spectra fields minimized over cyclic site shifts.
double spectra_distance(const std::vector<Eigen::VectorXd>& s1,
                        const std::vector<Eigen::VectorXd>& s2, const GridGeometry& g,
                        bool optimize_shift = false);

}  // namespace ymflow
