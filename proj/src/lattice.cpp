#include "ymflow/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "lattice_kernels.h"

namespace ymflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr Complex kI{0.0, 1.0};
}  // namespace

GridGeometry make_geometry(int N) {
  if (N < 4) throw std::invalid_argument("grid: need N >= 4");
  return GridGeometry{N};
}

long long TwistData::total_degree() const {
  long long s = 0;
  for (long long d : degrees) s += d;
  return s;
}

bool TwistData::trivial() const {
  for (long long d : degrees)
    if (d != 0) return false;
  return true;
}

bool TwistData::commutes(const Mat& m, double tol) const {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (degrees[r] != degrees[c] && std::abs(m(r, c)) > tol) return false;
  return true;
}

MatField& MatField::operator+=(const MatField& o) {
  for (size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}
MatField& MatField::operator-=(const MatField& o) {
  for (size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}
MatField& MatField::operator*=(double s) {
  for (auto& z : data_) z *= s;
  return *this;
}

Seam::Seam(const GridGeometry& g, const TwistData& t) : geo_(g), twist_(t) {
  trivial_ = twist_.trivial();
  const int n = twist_.n();
  clutch_.resize(n);
  for (int k = 0; k < n; ++k) clutch_[k] = 2.0 * kPi * kI * static_cast<double>(twist_.degrees[k]);
  if (!trivial_) {
    tj_.resize(geo_.N);
    for (int j = 0; j < geo_.N; ++j) {
      tj_[j].resize(n);
      for (int k = 0; k < n; ++k)
        tj_[j][k] = std::exp(2.0 * kPi * kI * static_cast<double>(twist_.degrees[k]) *
                             (static_cast<double>(j) / geo_.N));
    }
  }
}

Mat Seam::ad(const MatField& f, int i, int j) const {
  const int N = geo_.N;
  int jj = j;
  if (jj < 0) jj += N;
  else if (jj >= N) jj -= N;
  if (i >= 0 && i < N) return f.at(i, jj);
  const bool up = i >= N;
  const int ii = up ? i - N : i + N;
  Mat m = f.at(ii, jj);
  if (trivial_) return m;
  const auto& t = tj_[jj];
  // crossing +x: T M T^{-1}; crossing -x: T^{-1} M T
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      m(r, c) *= up ? t[r] * std::conj(t[c]) : std::conj(t[r]) * t[c];
  return m;
}

Mat Seam::conn_y(const MatField& ay, int i, int j) const {
  const int N = geo_.N;
  Mat m = ad(ay, i, j);
  if (i >= N) {
    for (int k = 0; k < m.rows(); ++k) m(k, k) -= clutch_[k];
  } else if (i < 0) {
    for (int k = 0; k < m.rows(); ++k) m(k, k) += clutch_[k];
  }
  return m;
}

CentralType UnitaryConnection::tau() const {
  return central_type(BundleType{group.n, twist.total_degree()});
}

bool is_skew_field(const MatField& f, double tol) {
  const int N = f.N();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      auto m = f.at(i, j);
      if ((m + m.adjoint()).norm() > tol * (1.0 + m.norm())) return false;
    }
  return true;
}

bool is_unitary_field(const MatField& f, double tol) {
  const int N = f.N();
  const Mat id = Mat::Identity(f.n(), f.n());
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      auto m = f.at(i, j);
      if ((m.adjoint() * m - id).norm() > tol) return false;
    }
  return true;
}

void validate_connection(const UnitaryConnection& a, double tol) {
  if (a.group.n != a.twist.n()) throw std::invalid_argument("connection: twist size mismatch");
  if (a.group.kind == GroupKind::SU && !a.twist.trivial())
    throw std::invalid_argument("connection: SU(n) requires trivial twist");
  if (!is_skew_field(a.ax, tol) || !is_skew_field(a.ay, tol))
    throw std::invalid_argument("connection: components must be skew-hermitian");
}

double seam_smoothness_defect(const UnitaryConnection& a) {
  const Seam s(a.geo, a.twist);
  const int N = a.N();
  const double h = a.geo.h();
  double worst = 0.0;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const Mat dxx = s.conn_x(a.ax, i + 1, j) - 2.0 * Mat(a.ax.at(i, j)) + s.conn_x(a.ax, i - 1, j);
      const Mat dyy = s.conn_y(a.ay, i + 1, j) - 2.0 * Mat(a.ay.at(i, j)) + s.conn_y(a.ay, i - 1, j);
      worst = std::max(worst, dxx.norm() / h);
      worst = std::max(worst, dyy.norm() / h);
    }
  return worst;
}

double l2_inner(const MatField& a, const MatField& b, const GridGeometry& g) {
  double s = 0.0;
  const auto& ra = a.raw();
  const auto& rb = b.raw();
  for (size_t k = 0; k < ra.size(); ++k)
    s += ra[k].real() * rb[k].real() + ra[k].imag() * rb[k].imag();
  return s * g.site_weight();
}

double l2_norm(const MatField& a, const GridGeometry& g) {
  return std::sqrt(l2_inner(a, a, g));
}

double linf_norm(const MatField& a) {
  const int N = a.N();
  double m = 0.0;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) m = std::max(m, a.at(i, j).norm());
  return m;
}

double l2_inner(const TangentField& a, const TangentField& b, const GridGeometry& g) {
  return l2_inner(a.x, b.x, g) + l2_inner(a.y, b.y, g);
}

double l2_norm(const TangentField& a, const GridGeometry& g) {
  return std::sqrt(l2_inner(a, a, g));
}

double section_l2(const LieSection& s) { return l2_norm(s.v, s.geo); }
double section_linf(const LieSection& s) { return linf_norm(s.v); }

double symplectic_pairing(const TangentField& a, const TangentField& b,
                          const GridGeometry& g) {
  return l2_inner(a.x, b.y, g) - l2_inner(a.y, b.x, g);
}

LieSection curvature(const UnitaryConnection& a) {
  const int N = a.N(), n = a.n();
  LieSection f{a.geo, a.twist, MatField(N, n), false};
  switch (n) {
    case 1: kernels::curvature_t<1>(a, f.v); return f;
    case 2: kernels::curvature_t<2>(a, f.v); return f;
    case 3: kernels::curvature_t<3>(a, f.v); return f;
    case 4: kernels::curvature_t<4>(a, f.v); return f;
    default: break;
  }
  const double invh = static_cast<double>(N);
  const Seam s(a.geo, a.twist);
  Mat tmp(n, n);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      auto ax = a.ax.at(i, j);
      auto ay = a.ay.at(i, j);
      tmp.noalias() = ax * ay;
      tmp.noalias() -= ay * ax;
      tmp += (Mat(ay) - s.conn_y(a.ay, i - 1, j)) * invh;
      tmp -= (Mat(ax) - s.conn_x(a.ax, i, j - 1)) * invh;
      f.v.at(i, j) = tmp;
    }
  return f;
}

double ym_energy(const UnitaryConnection& a) {
  const LieSection f = curvature(a);
  const double nrm = section_l2(f);
  return 0.5 * nrm * nrm;
}

double f_tau_energy(const UnitaryConnection& a, const CentralType& tau) {
  const double m = mu_norm(a, tau);
  return 0.5 * m * m;
}

double mu_norm(const UnitaryConnection& a, const CentralType& tau) {
  LieSection f = curvature(a);
  const Complex c = kI * tau.imag_coefficient();
  const int N = a.N(), n = a.n();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      auto m = f.v.at(i, j);
      for (int k = 0; k < n; ++k) m(k, k) -= c;
    }
  return section_l2(f);
}

TangentField d_A(const UnitaryConnection& a, const LieSection& xi) {
  const int N = a.N(), n = a.n();
  TangentField t{MatField(N, n), MatField(N, n)};
  switch (n) {
    case 1: kernels::d_A_t<1>(a, xi.v, t.x, t.y); return t;
    case 2: kernels::d_A_t<2>(a, xi.v, t.x, t.y); return t;
    case 3: kernels::d_A_t<3>(a, xi.v, t.x, t.y); return t;
    case 4: kernels::d_A_t<4>(a, xi.v, t.x, t.y); return t;
    default: break;
  }
  const double invh = static_cast<double>(N);
  const Seam s(a.geo, a.twist);
  Mat tmp(n, n);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      auto x = xi.v.at(i, j);
      auto ax = a.ax.at(i, j);
      auto ay = a.ay.at(i, j);
      tmp = (s.ad(xi.v, i + 1, j) - Mat(x)) * invh;
      tmp.noalias() += ax * x;
      tmp.noalias() -= x * ax;
      t.x.at(i, j) = tmp;
      tmp = (s.ad(xi.v, i, j + 1) - Mat(x)) * invh;
      tmp.noalias() += ay * x;
      tmp.noalias() -= x * ay;
      t.y.at(i, j) = tmp;
    }
  return t;
}

LieSection d_A_star(const UnitaryConnection& a, const TangentField& t) {
  const int N = a.N(), n = a.n();
  LieSection out{a.geo, a.twist, MatField(N, n), false};
  switch (n) {
    case 1: kernels::d_A_star_t<1>(a, t.x, t.y, out.v); return out;
    case 2: kernels::d_A_star_t<2>(a, t.x, t.y, out.v); return out;
    case 3: kernels::d_A_star_t<3>(a, t.x, t.y, out.v); return out;
    case 4: kernels::d_A_star_t<4>(a, t.x, t.y, out.v); return out;
    default: break;
  }
  const double invh = static_cast<double>(N);
  const Seam s(a.geo, a.twist);
  Mat tmp(n, n);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      auto tx = t.x.at(i, j);
      auto ty = t.y.at(i, j);
      auto ax = a.ax.at(i, j);
      auto ay = a.ay.at(i, j);
      tmp = -(Mat(tx) - s.ad(t.x, i - 1, j)) * invh;
      tmp -= (Mat(ty) - s.ad(t.y, i, j - 1)) * invh;
      tmp.noalias() -= ax * tx;
      tmp.noalias() += tx * ax;
      tmp.noalias() -= ay * ty;
      tmp.noalias() += ty * ay;
      out.v.at(i, j) = tmp;
    }
  return out;
}

TangentField grad_ym(const UnitaryConnection& a) {
  return grad_from_curvature(a, curvature(a));
}

TangentField grad_from_curvature(const UnitaryConnection& a, const LieSection& f) {
  const int N = a.N(), n = a.n();
  TangentField gr{MatField(N, n), MatField(N, n)};
  switch (n) {
    case 1: kernels::grad_t<1>(a, f.v, gr.x, gr.y); return gr;
    case 2: kernels::grad_t<2>(a, f.v, gr.x, gr.y); return gr;
    case 3: kernels::grad_t<3>(a, f.v, gr.x, gr.y); return gr;
    case 4: kernels::grad_t<4>(a, f.v, gr.x, gr.y); return gr;
    default: break;
  }
  const double invh = static_cast<double>(N);
  const Seam s(a.geo, a.twist);
  Mat tmp(n, n);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      auto fm = f.v.at(i, j);
      auto ax = a.ax.at(i, j);
      auto ay = a.ay.at(i, j);
      // g_x = D_y *F + [A_y, *F]
      tmp = (s.ad(f.v, i, j + 1) - Mat(fm)) * invh;
      tmp.noalias() += ay * fm;
      tmp.noalias() -= fm * ay;
      gr.x.at(i, j) = tmp;
      // g_y = -D_x *F - [A_x, *F]
      tmp = -(s.ad(f.v, i + 1, j) - Mat(fm)) * invh;
      tmp.noalias() -= ax * fm;
      tmp.noalias() += fm * ax;
      gr.y.at(i, j) = tmp;
    }
  return gr;
}

TangentField hodge_star(const TangentField& t) {
  TangentField out{t.y, t.x};
  out.x *= -1.0;
  return out;
}

TangentField infinitesimal_action(const UnitaryConnection& a, const LieSection& zeta) {
  const int N = a.N(), n = a.n();
  LieSection re{a.geo, a.twist, MatField(N, n), false};
  LieSection im{a.geo, a.twist, MatField(N, n), false};
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const Mat z = zeta.v.at(i, j);
      const Mat xi = 0.5 * (z - z.adjoint());
      const Mat eta = Complex(0, -0.5) * (z + z.adjoint());
      re.v.at(i, j) = xi;
      im.v.at(i, j) = eta;
    }
  TangentField dxi = d_A(a, re);
  const TangentField deta = d_A(a, im);
  const TangentField sd = hodge_star(deta);
  dxi.x += sd.x;
  dxi.y += sd.y;
  dxi.x *= -1.0;
  dxi.y *= -1.0;
  return dxi;
}

namespace {

UnitaryConnection add_tangent(const UnitaryConnection& a, const TangentField& t, double s) {
  UnitaryConnection out = a;
  const int N = a.N();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      out.ax.at(i, j) += s * Mat(t.x.at(i, j));
      out.ay.at(i, j) += s * Mat(t.y.at(i, j));
    }
  return out;
}

}  // namespace

MomentPairingReport moment_pairing_check(const UnitaryConnection& a, const TangentField& dir,
                                         const LieSection& xi, double eps) {
  const LieSection fp = curvature(add_tangent(a, dir, eps));
  const LieSection fm = curvature(add_tangent(a, dir, -eps));
  MatField diff = fp.v;
  diff -= fm.v;
  diff *= 1.0 / (2.0 * eps);
  const double lhs = l2_inner(diff, xi.v, a.geo);

  TangentField l = d_A(a, xi);
  l.x *= -1.0;
  l.y *= -1.0;
  const double rhs = symplectic_pairing(l, dir, a.geo);
  const double gap = std::abs(lhs - rhs) / (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
  return MomentPairingReport{lhs, rhs, gap};
}

UnitaryConnection gauge_act(const GaugeTransform& g, const UnitaryConnection& a) {
  const int N = a.N(), n = a.n();
  const double invh = static_cast<double>(N);
  const Seam s(a.geo, a.twist);
  const bool su = a.group.kind == GroupKind::SU;
  UnitaryConnection out = a;
  Mat b(n, n), gi(n, n), dbar(n, n);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const Mat gm = g.v.at(i, j);
      gi = gm.inverse();
      const Mat a01 = 0.5 * (Mat(a.ax.at(i, j)) + kI * Mat(a.ay.at(i, j)));
      dbar = 0.5 * ((s.ad(g.v, i + 1, j) - gm) * invh +
                    kI * (s.ad(g.v, i, j + 1) - gm) * invh);
      b.noalias() = gm * a01 * gi;
      b.noalias() -= dbar * gi;
      if (su) {
        // the finite-difference dbar of an SL(n) field has an O(h) trace
        // residue; project it out so su(n) connections stay in su(n)
        const Complex t = b.trace() / static_cast<double>(n);
        for (int k = 0; k < n; ++k) b(k, k) -= t;
      }
      out.ax.at(i, j) = b - b.adjoint();
      out.ay.at(i, j) = -kI * (b + b.adjoint());
    }
  return out;
}

UnitaryConnection gauge_act_unitary(const GaugeTransform& u, const UnitaryConnection& a) {
  if (!is_unitary_field(u.v, 1e-10))
    throw std::invalid_argument("gauge_act_unitary: transform is not unitary");
  return gauge_act(u, a);
}

GaugeTransform gauge_inverse(const GaugeTransform& g) {
  GaugeTransform out = g;
  const int N = g.N();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) out.v.at(i, j) = Mat(g.v.at(i, j)).inverse();
  return out;
}

GaugeTransform gauge_compose(const GaugeTransform& g1, const GaugeTransform& g2) {
  GaugeTransform out = g1;
  out.unitary = g1.unitary && g2.unitary;
  const int N = g1.N();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      out.v.at(i, j) = Mat(g1.v.at(i, j)) * Mat(g2.v.at(i, j));
  return out;
}

double gauge_condition(const GaugeTransform& g) {
  const int N = g.N();
  double worst = 1.0;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      Eigen::JacobiSVD<Mat> svd(Mat(g.v.at(i, j)));
      const auto& sv = svd.singularValues();
      const double lo = sv[sv.size() - 1];
      if (lo <= 0.0) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, sv[0] / lo);
    }
  return worst;
}

UnitaryConnection make_line_connection(const GridGeometry& g, long long d) {
  return make_split_connection(g, {d});
}

UnitaryConnection make_split_connection(const GridGeometry& g,
                                        const std::vector<long long>& degrees) {
  const int n = static_cast<int>(degrees.size());
  if (n < 1 || n > kMaxFiber) throw std::invalid_argument("split connection: bad fiber size");
  UnitaryConnection a{g, MatrixGroupSpec{n, GroupKind::U}, TwistData{degrees},
                      MatField(g.N, n), MatField(g.N, n)};
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      auto m = a.ay.at(i, j);
      for (int k = 0; k < n; ++k)
        m(k, k) = -2.0 * kPi * kI * static_cast<double>(degrees[k]) *
                  (static_cast<double>(i) / g.N);
    }
  return a;
}

UnitaryConnection make_flat_connection(const GridGeometry& g, const MatrixGroupSpec& grp) {
  return UnitaryConnection{g, grp, TwistData::zero(grp.n), MatField(g.N, grp.n),
                           MatField(g.N, grp.n)};
}

namespace {

long long degree_from_sum(Complex s) {
  const Complex val = Complex(0, 1) / (2.0 * kPi) * s;
  const double d = val.real();
  const double r = std::round(d);
  if (std::abs(val.imag()) > 0.1 || std::abs(d - r) > 0.1)
    throw std::runtime_error("degree: value is not integer-quantized");
  return static_cast<long long>(r);
}

}  // namespace

long long degree(const UnitaryConnection& a, const Mat& projector) {
  if (!a.twist.commutes(projector))
    throw std::invalid_argument("degree: projector must respect the twist blocks");
  const LieSection f = curvature(a);
  Complex s{0, 0};
  const int N = a.N();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) s += (projector * Mat(f.v.at(i, j))).trace();
  return degree_from_sum(s * a.geo.site_weight());
}

long long degree(const UnitaryConnection& a, const MatField& projector) {
  const LieSection f = curvature(a);
  Complex s{0, 0};
  const int N = a.N();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) s += (Mat(projector.at(i, j)) * Mat(f.v.at(i, j))).trace();
  return degree_from_sum(s * a.geo.site_weight());
}

LieSection constant_section(const UnitaryConnection& a, const Mat& value, bool complexified) {
  LieSection s{a.geo, a.twist, MatField(a.N(), a.n()), complexified};
  for (int j = 0; j < a.N(); ++j)
    for (int i = 0; i < a.N(); ++i) s.v.at(i, j) = value;
  return s;
}

}  // namespace ymflow
