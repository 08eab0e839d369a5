#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "ymflow/bundle.hpp"
#include "ymflow/lie.hpp"

namespace ymflow {

/// Matrices in the lattice layer are small; cap the size so Eigen keeps them
/// on the stack inside the hot loops.
constexpr int kMaxFiber = 8;
using Mat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxFiber, kMaxFiber>;

struct GridGeometry {
  int N = 16;  // sites per side on the unit-area torus

  double h() const { return 1.0 / N; }
  double site_weight() const { return h() * h(); }
  int sites() const { return N * N; }
};

GridGeometry make_geometry(int N);  // validates N >= 4

/// Diagonal clutching data: one integer degree per line-bundle factor. The
/// transition acts on the seam in the x-direction with T(y) = diag(e^{2 pi i
/// d_k y}); fields wrap by conjugation, the y-component of a connection picks
/// up the extra -2 pi i diag(d) when crossing in +x.
struct TwistData {
  std::vector<long long> degrees;

  int n() const { return static_cast<int>(degrees.size()); }
  long long total_degree() const;
  bool trivial() const;
  static TwistData zero(int n) { return TwistData{std::vector<long long>(n, 0)}; }

  /// True when m commutes with every transition matrix (block structure of
  /// equal degrees).
  bool commutes(const Mat& m, double tol = 1e-12) const;
};

/// Dense site-indexed field of n x n complex matrices, row-major with x
/// fastest: entry (i, j) lives at data[(j * N + i) * n * n].
class MatField {
 public:
  MatField() = default;
  MatField(int N, int n) : N_(N), n_(n), data_(static_cast<size_t>(N) * N * n * n, Complex(0, 0)) {}

  int N() const { return N_; }
  int n() const { return n_; }

  Eigen::Map<Mat> at(int i, int j) {
    return Eigen::Map<Mat>(data_.data() + offset(i, j), n_, n_);
  }
  Eigen::Map<const Mat> at(int i, int j) const {
    return Eigen::Map<const Mat>(data_.data() + offset(i, j), n_, n_);
  }

  const std::vector<Complex>& raw() const { return data_; }
  std::vector<Complex>& raw() { return data_; }

  MatField& operator+=(const MatField& o);
  MatField& operator-=(const MatField& o);
  MatField& operator*=(double s);

 private:
  size_t offset(int i, int j) const {
    return (static_cast<size_t>(j) * N_ + i) * n_ * n_;
  }
  int N_ = 0, n_ = 0;
  std::vector<Complex> data_;
};

/// Twist-aware neighbor access. Precomputes the seam transitions for a fixed
/// grid. Shifts are at most one site.
class Seam {
 public:
  Seam(const GridGeometry& g, const TwistData& t);

  /// ad(P)-valued fields: conjugation wrap.
  Mat ad(const MatField& f, int i, int j) const;
  /// x-component of a connection: conjugation wrap (transition is x-independent).
  Mat conn_x(const MatField& ax, int i, int j) const { return ad(ax, i, j); }
  /// y-component of a connection: conjugation wrap plus the clutching term.
  Mat conn_y(const MatField& ay, int i, int j) const;

  const GridGeometry& geometry() const { return geo_; }
  const TwistData& twist() const { return twist_; }

 private:
  GridGeometry geo_;
  TwistData twist_;
  bool trivial_ = true;
  std::vector<Eigen::VectorXcd> tj_;  // T_j diagonal, j = 0..N-1
  Eigen::VectorXcd clutch_;           // 2 pi i d_k
};

struct UnitaryConnection {
  GridGeometry geo;
  MatrixGroupSpec group;
  TwistData twist;
  MatField ax, ay;

  int N() const { return geo.N; }
  int n() const { return group.n; }
  CentralType tau() const;
};

/// Grid field of algebra elements (compact unless flagged complexified).
struct LieSection {
  GridGeometry geo;
  TwistData twist;
  MatField v;
  bool complexified = false;

  int N() const { return geo.N; }
  int n() const { return v.n(); }
};

struct GaugeTransform {
  GridGeometry geo;
  TwistData twist;
  MatField v;
  bool unitary = false;

  int N() const { return geo.N; }
  int n() const { return v.n(); }
};

/// Pair of component fields (a_x, a_y); tangent vectors to the connection
/// space and values of d_A on sections.
struct TangentField {
  MatField x, y;
};

// -- validation -------------------------------------------------------------

bool is_skew_field(const MatField& f, double tol = 1e-10);
bool is_unitary_field(const MatField& f, double tol = 1e-10);
void validate_connection(const UnitaryConnection& a, double tol = 1e-10);

/// Max norm of second differences across every site (seams included) times h;
/// O(h) for a smooth field, used as a seam-smoothness diagnostic.
double seam_smoothness_defect(const UnitaryConnection& a);

// -- norms and pairings -----------------------------------------------------

double l2_inner(const MatField& a, const MatField& b, const GridGeometry& g);
double l2_norm(const MatField& a, const GridGeometry& g);
double linf_norm(const MatField& a);
double l2_inner(const TangentField& a, const TangentField& b, const GridGeometry& g);
double l2_norm(const TangentField& a, const GridGeometry& g);
double section_l2(const LieSection& s);
double section_linf(const LieSection& s);

/// Discrete int <a wedge b>.
double symplectic_pairing(const TangentField& a, const TangentField& b,
                          const GridGeometry& g);

// -- core operations ---------------------------------------------------------

/// *F = Dbar_x A_y - Dbar_y A_x + [A_x, A_y] with backward differences; the
/// exact-adjoint pairing with the forward-difference d_A makes the moment-map
/// identity hold to roundoff.
LieSection curvature(const UnitaryConnection& a);

double ym_energy(const UnitaryConnection& a);
double f_tau_energy(const UnitaryConnection& a, const CentralType& tau);
/// || *F - tau ||_{L^2}
double mu_norm(const UnitaryConnection& a, const CentralType& tau);

/// d_A xi = (D_x xi + [A_x, xi], D_y xi + [A_y, xi]) with forward differences.
TangentField d_A(const UnitaryConnection& a, const LieSection& xi);
/// Exact adjoint of d_A: backward differences plus commutator terms.
LieSection d_A_star(const UnitaryConnection& a, const TangentField& t);
/// grad YM(A) = d_A^* F_A.
TangentField grad_ym(const UnitaryConnection& a);
/// Same with the curvature already at hand.
TangentField grad_from_curvature(const UnitaryConnection& a, const LieSection& f);

/// Hodge star on tangent fields: (a_x, a_y) -> (-a_y, a_x).
TangentField hodge_star(const TangentField& t);

/// L_A(xi + i eta) = -d_A xi - * d_A eta for a complexified section.
TangentField infinitesimal_action(const UnitaryConnection& a, const LieSection& zeta);

struct MomentPairingReport {
  double lhs = 0, rhs = 0, gap = 0;
};
MomentPairingReport moment_pairing_check(const UnitaryConnection& a, const TangentField& dir,
                                         const LieSection& xi, double eps = 1e-4);

/// Finite gauge action through the dbar-datum: B = g A^{0,1} g^{-1} -
/// (dbar g) g^{-1}, rebuilt as A' = (B - B^*, -i(B + B^*)). The same routine
/// serves unitary and complexified g.
UnitaryConnection gauge_act(const GaugeTransform& g, const UnitaryConnection& a);
UnitaryConnection gauge_act_unitary(const GaugeTransform& u, const UnitaryConnection& a);
GaugeTransform gauge_inverse(const GaugeTransform& g);
GaugeTransform gauge_compose(const GaugeTransform& g1, const GaugeTransform& g2);

/// Largest pointwise condition number of g (ratio of singular values).
double gauge_condition(const GaugeTransform& g);

// -- constructors -------------------------------------------------------------

/// Rank-1 connection with A_y = -2 pi i d x, A_x = 0; *F = -2 pi i d exactly.
UnitaryConnection make_line_connection(const GridGeometry& g, long long d);
/// Diagonal direct sum of line connections.
UnitaryConnection make_split_connection(const GridGeometry& g,
                                        const std::vector<long long>& degrees);
UnitaryConnection make_flat_connection(const GridGeometry& g, const MatrixGroupSpec& grp);

/// (i / 2 pi) sum tr(P *F) h^2 rounded to the nearest integer; throws when the
/// value sits further than 0.1 from an integer. P is a constant projector
/// commuting with the twist.
long long degree(const UnitaryConnection& a, const Mat& projector);
/// Same with a site-dependent projector field.
long long degree(const UnitaryConnection& a, const MatField& projector);

/// Constant section c * value at every site.
LieSection constant_section(const UnitaryConnection& a, const Mat& value,
                            bool complexified = false);

}  // namespace ymflow
