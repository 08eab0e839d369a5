#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ymflow/rational.hpp"

namespace ymflow {

struct BundleType {
  long long rank = 1;
  long long degree = 0;

  friend bool operator==(const BundleType&, const BundleType&) = default;
};

Rational slope(const BundleType& b);

/// Ordered blocks (n_j, k_j) of subquotients E_j/E_{j-1}.
struct FiltrationSpec {
  std::vector<std::pair<long long, long long>> blocks;

  long long rank() const;
  long long degree() const;
  BundleType total() const { return {rank(), degree()}; }
  Rational block_slope(size_t j) const;

  friend bool operator==(const FiltrationSpec&, const FiltrationSpec&) = default;
};

/// Block slopes repeated with multiplicity; length equals the total rank.
std::vector<Rational> char_vector(const FiltrationSpec& f);

struct HNPolygon {
  std::vector<std::pair<long long, long long>> vertices;  // starts at (0,0)
};

HNPolygon polygon(const FiltrationSpec& f);
bool is_concave(const FiltrationSpec& f);

enum class Dominance { Equal, GreaterEqual, LessEqual, Incomparable };

/// Compares the interpolants at every integer abscissa, exactly.
Dominance dominates(const FiltrationSpec& f, const FiltrationSpec& g);

/// ||mu_vec||_2^2 as an exact rational.
Rational char_norm_sq(const FiltrationSpec& f);

/// HN filtration of a direct sum of line bundles with the given degrees.
FiltrationSpec hn_split(const std::vector<long long>& degrees);

/// Caller-supplied admissible-subbundle bookkeeping. admissible() returns the
/// proper subbundle signatures of the current total, or nullopt when the
/// caller has no data for it; quotient_by() produces the oracle for the
/// quotient after removing the chosen subbundle.
class SubbundleOracle {
 public:
  virtual ~SubbundleOracle() = default;
  virtual std::optional<std::vector<BundleType>> admissible(BundleType current) const = 0;
  virtual std::unique_ptr<SubbundleOracle> quotient_by(BundleType current,
                                                       BundleType chosen) const = 0;
};

/// Oracle for split bundles: admissible signatures are the subset sums.
std::unique_ptr<SubbundleOracle> split_oracle(std::vector<long long> degrees);

/// Oracle backed by a fixed signature table, reused on every quotient.
std::unique_ptr<SubbundleOracle> table_oracle(
    std::vector<std::pair<BundleType, std::vector<BundleType>>> table);

/// Greedy maximal-slope / maximal-rank recursion.
FiltrationSpec hn_from_oracle(BundleType total, const SubbundleOracle& oracle);

/// ||mu_vec(f)||_2 <= ||mu_vec(hn)||_2 with equality iff the characteristic
/// vectors agree. Throws on non-concave f or mismatched totals.
bool hn_norm_check(const FiltrationSpec& f, const FiltrationSpec& hn);

/// tau = -2 pi i mu(E) * Id.
struct CentralType {
  long long n = 1;
  Rational mu = 0;

  double imag_coefficient() const;  // -2 pi mu
  double norm_sq() const;           // pointwise |tau|^2 = n (2 pi mu)^2
};

CentralType central_type(const BundleType& b);

/// 2 pi sum_j lambda_j k_j - <tau, xi>; lambdas must be strictly increasing.
double weight_of_filtration(const FiltrationSpec& f, const std::vector<double>& lambdas,
                            const CentralType& tau);

struct DominantWeightResult {
  std::vector<double> lambdas;  // strictly increasing, sum lambda_j^2 n_j = 1
  double norm = 0.0;            // -w = 2 pi sqrt(norm_sq_exact)
  double xi_norm = 1.0;
  Rational norm_sq_exact;       // ||mu_vec||^2 - rk * mu^2, exact
};

DominantWeightResult dominant_weight(const FiltrationSpec& hn);

/// rk(E/F) rk(F) (mu(F) - mu(E/F)); the degree of ad of the corresponding
/// maximal parabolic reduction.
Rational c1_ad_parabolic(const BundleType& F, const BundleType& E);

enum class StabilityClass { Stable, Semistable, Unstable };

struct AlgebraicClassification {
  StabilityClass cls = StabilityClass::Semistable;
  bool polystable_certified = false;
};

AlgebraicClassification classify_algebraic(
    const BundleType& total, const std::vector<BundleType>& signatures,
    const std::optional<std::vector<BundleType>>& splitting_witness = std::nullopt);

/// All filtrations of the split bundle induced by ordered partitions of the
/// degree multiset, deduplicated at the block-data level.
std::vector<FiltrationSpec> split_filtrations(const std::vector<long long>& degrees);

/// The concave ones among split_filtrations().
std::vector<FiltrationSpec> concave_split_filtrations(const std::vector<long long>& degrees);

/// All degree multisets of the given size with entries in [lo, hi].
std::vector<std::vector<long long>> degree_multisets(int size, long long lo, long long hi);

/// Independent oracle for the dominant weight: minimizes f(x) = sum x_j (k_j -
/// n_j mu) over the ellipsoid sum x_j^2 n_j = 1 by spherical grid search plus
/// local refinement. Returns the minimizing x.
std::vector<double> dominant_weight_grid_oracle(const FiltrationSpec& hn,
                                                int coarse = 48, int rounds = 64);

}  // namespace ymflow
