#include "ymflow/lie.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ymflow {

AlgebraElement AlgebraElement::compact(CMatrix mat, GroupKind kind, double tol) {
  if (mat.rows() != mat.cols()) throw std::invalid_argument("algebra element must be square");
  const double skew = (mat + mat.adjoint()).norm();
  if (skew > tol * (1.0 + mat.norm()))
    throw std::invalid_argument("compact algebra element must be skew-hermitian");
  if (kind == GroupKind::SU && std::abs(mat.trace()) > tol * (1.0 + mat.norm()))
    throw std::invalid_argument("su(n) element must be traceless");
  return AlgebraElement{std::move(mat), AlgebraPart::Compact};
}

AlgebraElement AlgebraElement::complexified(CMatrix mat) {
  if (mat.rows() != mat.cols()) throw std::invalid_argument("algebra element must be square");
  return AlgebraElement{std::move(mat), AlgebraPart::Complexified};
}

double inner_product(const AlgebraElement& xi, const AlgebraElement& eta) {
  if (xi.n() != eta.n()) throw std::invalid_argument("inner_product: dimension mismatch");
  return (xi.m * eta.m.adjoint()).trace().real();
}

EigenSplit eigen_split(const AlgebraElement& xi, double tol) {
  const CMatrix h = Complex(0.0, 1.0) * xi.m;
  if ((h - h.adjoint()).norm() > 1e-10 * (1.0 + h.norm()))
    throw std::invalid_argument("eigen_split: input is not skew-hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen_split: solver failed");
  const Eigen::VectorXd ev = es.eigenvalues();
  const CMatrix v = es.eigenvectors();
  const int n = xi.n();

  EigenSplit out;
  int start = 0;
  for (int k = 1; k <= n; ++k) {
    if (k == n || ev[k] - ev[k - 1] > tol) {
      double mean = 0.0;
      for (int j = start; j < k; ++j) mean += ev[j];
      mean /= (k - start);
      CMatrix p = CMatrix::Zero(n, n);
      for (int j = start; j < k; ++j) p += v.col(j) * v.col(j).adjoint();
      out.eigenvalues.push_back(mean);
      out.multiplicities.push_back(k - start);
      out.projectors.push_back(std::move(p));
      start = k;
    }
  }
  return out;
}

namespace {

void require_invertible(const CMatrix& g) {
  Eigen::FullPivLU<CMatrix> lu(g);
  if (!lu.isInvertible()) throw std::invalid_argument("membership test: singular g");
}

}  // namespace

bool parabolic_membership(const CMatrix& g, const AlgebraElement& xi, double tol) {
  if (g.rows() != xi.n() || g.cols() != xi.n())
    throw std::invalid_argument("parabolic_membership: dimension mismatch");
  require_invertible(g);
  const EigenSplit sp = eigen_split(xi);
  const double scale = tol * (1.0 + g.norm());
  for (int i = 0; i < sp.blocks(); ++i)
    for (int j = 0; j < i; ++j)
      if ((sp.projectors[i] * g * sp.projectors[j]).norm() > scale) return false;
  return true;
}

bool levi_membership(const CMatrix& g, const AlgebraElement& xi, double tol) {
  if (g.rows() != xi.n() || g.cols() != xi.n())
    throw std::invalid_argument("levi_membership: dimension mismatch");
  require_invertible(g);
  const EigenSplit sp = eigen_split(xi);
  const double scale = tol * (1.0 + g.norm());
  for (int i = 0; i < sp.blocks(); ++i)
    for (int j = 0; j < sp.blocks(); ++j)
      if (i != j && (sp.projectors[i] * g * sp.projectors[j]).norm() > scale) return false;
  return true;
}

CMatrix RootDatum::as_matrix(const std::vector<Rational>& diag) const {
  CMatrix m = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = Complex(0.0, to_double(diag[k]));
  return m;
}

Rational RootDatum::pairing(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

std::vector<Rational> RootDatum::reflect(const std::vector<Rational>& a, int j) {
  std::vector<Rational> out = a;
  std::swap(out[j], out[j + 1]);
  return out;
}

RootDatum roots_type_A(int n) {
  if (n < 2) throw std::invalid_argument("roots_type_A: need n >= 2");
  RootDatum rd;
  rd.n = n;
  rd.rank = n - 1;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      std::vector<Rational> r(n, Rational(0));
      r[j] = 1;
      r[k] = -1;
      rd.roots.push_back(std::move(r));
    }
  for (int j = 0; j + 1 < n; ++j) {
    std::vector<Rational> r(n, Rational(0));
    r[j] = 1;
    r[j + 1] = -1;
    rd.simple_roots.push_back(std::move(r));
    rd.reflections.emplace_back(j, j + 1);
  }
  // tcheck_i has entries 1 - i/n (first i slots) and -i/n (the rest); the
  // defining relation <tcheck_i, 2 t_j / |t_j|^2> = delta_ij then holds with
  // |t_j|^2 = 2 for every type-A root.
  for (int i = 1; i <= n - 1; ++i) {
    std::vector<Rational> d(n);
    for (int k = 0; k < n; ++k)
      d[k] = (k < i) ? Rational(n - i, n) : Rational(-i, n);
    rd.dual_basis.push_back(std::move(d));
  }
  return rd;
}

ChamberCoordinates chamber_coordinates(const AlgebraElement& xi, const RootDatum& rd) {
  const int n = xi.n();
  if (n != rd.n) throw std::invalid_argument("chamber_coordinates: dimension mismatch");
  const CMatrix h = Complex(0.0, 1.0) * xi.m;
  if ((h - h.adjoint()).norm() > 1e-10 * (1.0 + h.norm()))
    throw std::invalid_argument("chamber_coordinates: input is not skew-hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Eigen::VectorXd mu = es.eigenvalues();  // ascending
  const CMatrix v = es.eigenvectors();

  ChamberCoordinates cc;
  cc.u = v.adjoint();  // u xi u^* = i * diag(-mu), entries non-increasing
  cc.x.resize(n - 1);
  for (int j = 0; j + 1 < n; ++j) cc.x[j] = mu[j + 1] - mu[j];
  cc.central = -mu.mean();
  return cc;
}

bool chamber_parabolic_consistent(const AlgebraElement& xi, const RootDatum& rd,
                                  const CMatrix& g, double tol, double active_threshold) {
  const ChamberCoordinates cc = chamber_coordinates(xi, rd);
  const AlgebraElement chambered =
      AlgebraElement{cc.u * xi.m * cc.u.adjoint(), AlgebraPart::Compact};
  const bool lhs = parabolic_membership(g, chambered, tol);
  bool rhs = true;
  for (int j = 0; j < rd.rank; ++j) {
    if (cc.x[j] <= active_threshold) continue;
    const AlgebraElement tc{rd.as_matrix(rd.dual_basis[j]), AlgebraPart::Compact};
    rhs = rhs && parabolic_membership(g, tc, tol);
  }
  return lhs == rhs;
}

}  // namespace ymflow
