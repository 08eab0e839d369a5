#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "ymflow/lattice.hpp"

namespace ymflow {

/// Stable seed derivation so that every sampled object is reproducible from
/// (base seed, tag, index) independent of call order.
uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index);

using Rng = std::mt19937_64;

CMatrix random_hermitian(int n, Rng& rng, double amplitude = 1.0);
CMatrix random_unitary(int n, Rng& rng);
/// Random skew-hermitian matrix; traceless for SU.
CMatrix random_algebra(int n, GroupKind kind, Rng& rng, double amplitude = 1.0);

/// Smooth periodic skew-hermitian section on the untwisted bundle, built from
/// low-frequency Fourier modes up to |k| <= modes.
LieSection random_smooth_section(const GridGeometry& g, int n, GroupKind kind, Rng& rng,
                                 double amplitude = 1.0, int modes = 2);

/// Seam-smooth skew-hermitian section on a twisted bundle. Off-diagonal
/// entries are theta-like quasi-periodic profiles matching the clutching.
LieSection random_twisted_section(const GridGeometry& g, const TwistData& twist,
                                  GroupKind kind, Rng& rng, double amplitude = 1.0,
                                  int modes = 2);

/// exp of a random (complexified: skew + i skew) section; unitary flag selects
/// the compact subgroup.
GaugeTransform random_gauge(const GridGeometry& g, const TwistData& twist, GroupKind kind,
                            Rng& rng, double amplitude = 0.3, bool unitary = false,
                            int modes = 2);

/// Constant gauge transform commuting with the twist (block-diagonal over
/// equal clutching degrees).
GaugeTransform constant_gauge(const GridGeometry& g, const TwistData& twist, GroupKind kind,
                              Rng& rng, bool unitary);

/// Diagonal-dominant complexified gauge: exp of a diagonal complexified
/// section composed with a small generic one. Keeps the slow non-commuting
/// constant-mode valley of the flat orbit essentially unexcited, so
/// semistable flows reach the minimum at the exponential rate.
GaugeTransform random_semistable_gauge(const GridGeometry& g, const TwistData& twist,
                                       GroupKind kind, Rng& rng, double diag_amplitude,
                                       double generic_amplitude, int modes = 2);

/// Complexified gauge in the parabolic stabilizer of the clutching flag:
/// complex diagonal part plus entries from higher to lower twist degree.
/// These preserve the upper-triangular form of the dbar datum exactly, so
/// the image stays on the Harder-Narasimhan stratum of the split connection.
GaugeTransform random_parabolic_gauge(const GridGeometry& g, const TwistData& twist,
                                      Rng& rng, double diag_amplitude,
                                      double upper_amplitude, int modes = 1);

/// Random smooth connection on the untwisted bundle.
UnitaryConnection random_connection(const GridGeometry& g, const MatrixGroupSpec& grp,
                                    Rng& rng, double amplitude = 1.0, int modes = 2);

/// Random smooth tangent field (pair of skew sections), twist-aware.
TangentField random_tangent(const UnitaryConnection& a, Rng& rng, double amplitude = 1.0,
                            int modes = 2);

/// Pointwise exponential of a section field.
GaugeTransform exp_section(const LieSection& zeta, bool unitary_hint = false);

}  // namespace ymflow
