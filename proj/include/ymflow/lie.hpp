#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "ymflow/rational.hpp"

namespace ymflow {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

enum class GroupKind { U, SU };

struct MatrixGroupSpec {
  int n = 1;
  GroupKind kind = GroupKind::U;

  // Z_0(G) is discrete exactly for SU(n).
  bool discrete_center() const { return kind == GroupKind::SU; }
};

enum class AlgebraPart { Compact, Complexified };

/// An element of g or g^c for G in {U(n), SU(n)} as an explicit matrix.
struct AlgebraElement {
  CMatrix m;
  AlgebraPart part = AlgebraPart::Compact;

  int n() const { return static_cast<int>(m.rows()); }

  /// Validates skew-hermitian up to tol, traceless as well for SU.
  static AlgebraElement compact(CMatrix mat, GroupKind kind = GroupKind::U,
                                double tol = 1e-12);
  static AlgebraElement complexified(CMatrix mat);
};

/// tr(xi eta^*); real and positive definite on the compact part.
double inner_product(const AlgebraElement& xi, const AlgebraElement& eta);

/// Eigen-structure of i*xi with nearby eigenvalues merged into blocks.
struct EigenSplit {
  std::vector<double> eigenvalues;   // strictly increasing after merging
  std::vector<int> multiplicities;   // sum equals n
  std::vector<CMatrix> projectors;   // hermitian idempotents, one per block

  int blocks() const { return static_cast<int>(eigenvalues.size()); }
};

EigenSplit eigen_split(const AlgebraElement& xi, double tol = 1e-9);

/// g lies in Q(xi): all blocks of g below the diagonal (in the ascending
/// eigenvalue order of i*xi) vanish up to tol * (1 + |g|).
bool parabolic_membership(const CMatrix& g, const AlgebraElement& xi,
                          double tol = 1e-8);

/// g lies in the Levi L(xi): block diagonal in the same splitting.
bool levi_membership(const CMatrix& g, const AlgebraElement& xi,
                     double tol = 1e-8);

/// Root data of type A_{n-1} in exact rational arithmetic. A vector
/// a = (a_1,...,a_n) of rationals encodes the toral element i*diag(a).
struct RootDatum {
  int n = 0;     // matrix size
  int rank = 0;  // n - 1
  std::vector<std::vector<Rational>> roots;         // i(E_jj - E_kk), j != k
  std::vector<std::vector<Rational>> simple_roots;  // t_j = i(E_jj - E_{j+1,j+1})
  std::vector<std::vector<Rational>> dual_basis;    // <tcheck_i, 2 t_j/|t_j|^2> = delta_ij
  std::vector<std::pair<int, int>> reflections;     // s_j = coordinate swap (j, j+1)

  CMatrix as_matrix(const std::vector<Rational>& diag) const;
  static Rational pairing(const std::vector<Rational>& a,
                          const std::vector<Rational>& b);
  static std::vector<Rational> reflect(const std::vector<Rational>& a, int j);
};

RootDatum roots_type_A(int n);

/// xi conjugated into the closed positive chamber: u xi u^* equals
/// sum_j x_j tcheck_j plus central * i * Id, with x_j >= 0.
struct ChamberCoordinates {
  std::vector<double> x;  // size rank
  double central = 0.0;   // 0 for SU(n) input
  CMatrix u;
};

ChamberCoordinates chamber_coordinates(const AlgebraElement& xi,
                                       const RootDatum& rd);

/// Lemma-2.19-style check: membership in Q(u xi u^*) agrees with the
/// intersection of the Q(tcheck_j) over the active chamber coordinates.
bool chamber_parabolic_consistent(const AlgebraElement& xi, const RootDatum& rd,
                                  const CMatrix& g, double tol = 1e-8,
                                  double active_threshold = 1e-9);

}  // namespace ymflow
