// Fixed-fiber-size kernels for the hot lattice loops. Included by lattice.cpp
// only. The twist transition is diagonal, so wrapped fetches are entrywise
// phase multiplications.
#pragma once

#include "ymflow/lattice.hpp"

namespace ymflow {
namespace kernels {

template <int NF>
struct SeamT {
  using M = Eigen::Matrix<Complex, NF, NF>;

  int N = 0;
  bool trivial = true;
  // phases[j](r, c) = t_r(y_j) * conj(t_c(y_j)); clutch(k) = 2 pi i d_k
  std::vector<M> phases;
  Eigen::Vector<Complex, NF> clutch;

  SeamT(const GridGeometry& g, const TwistData& t) : N(g.N), trivial(t.trivial()) {
    constexpr double kPi = 3.14159265358979323846;
    const Complex kI{0.0, 1.0};
    for (int k = 0; k < NF; ++k)
      clutch[k] = 2.0 * kPi * kI * static_cast<double>(t.degrees[k]);
    if (!trivial) {
      phases.resize(N);
      for (int j = 0; j < N; ++j) {
        Eigen::Vector<Complex, NF> tj;
        for (int k = 0; k < NF; ++k)
          tj[k] = std::exp(2.0 * kPi * kI * static_cast<double>(t.degrees[k]) *
                           (static_cast<double>(j) / N));
        for (int r = 0; r < NF; ++r)
          for (int c = 0; c < NF; ++c) phases[j](r, c) = tj[r] * std::conj(tj[c]);
      }
    }
  }

  inline void load(const MatField& f, int i, int j, M& out) const {
    out = Eigen::Map<const M>(f.raw().data() +
                              (static_cast<size_t>(j) * N + i) * NF * NF);
  }

  // ad-valued fetch with conjugation wrap; i in [-1, N], j in [-1, N]
  inline void ad(const MatField& f, int i, int j, M& out) const {
    int jj = j;
    if (jj < 0) jj += N;
    else if (jj >= N) jj -= N;
    if (i >= 0 && i < N) {
      load(f, i, jj, out);
      return;
    }
    const bool up = i >= N;
    load(f, up ? i - N : i + N, jj, out);
    if (trivial) return;
    const M& ph = phases[jj];
    for (int r = 0; r < NF; ++r)
      for (int c = 0; c < NF; ++c) out(r, c) *= up ? ph(r, c) : std::conj(ph(r, c));
  }

  inline void conn_y(const MatField& ay, int i, int j, M& out) const {
    ad(ay, i, j, out);
    if (i >= N)
      for (int k = 0; k < NF; ++k) out(k, k) -= clutch[k];
    else if (i < 0)
      for (int k = 0; k < NF; ++k) out(k, k) += clutch[k];
  }
};

template <int NF>
void curvature_t(const UnitaryConnection& a, MatField& out) {
  using M = typename SeamT<NF>::M;
  const SeamT<NF> s(a.geo, a.twist);
  const int N = a.N();
  const double invh = static_cast<double>(N);
  M ax, ay, aym, axm, tmp;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      s.load(a.ax, i, j, ax);
      s.load(a.ay, i, j, ay);
      s.conn_y(a.ay, i - 1, j, aym);
      s.ad(a.ax, i, j - 1, axm);
      tmp.noalias() = ax * ay;
      tmp.noalias() -= ay * ax;
      tmp += (ay - aym) * invh;
      tmp -= (ax - axm) * invh;
      Eigen::Map<M>(out.raw().data() + (static_cast<size_t>(j) * N + i) * NF * NF) = tmp;
    }
}

template <int NF>
void grad_t(const UnitaryConnection& a, const MatField& f, MatField& gx, MatField& gy) {
  using M = typename SeamT<NF>::M;
  const SeamT<NF> s(a.geo, a.twist);
  const int N = a.N();
  const double invh = static_cast<double>(N);
  M ax, ay, fm, fxp, fyp, tmp;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      s.load(a.ax, i, j, ax);
      s.load(a.ay, i, j, ay);
      s.load(f, i, j, fm);
      s.ad(f, i + 1, j, fxp);
      s.ad(f, i, j + 1, fyp);
      tmp = (fyp - fm) * invh;
      tmp.noalias() += ay * fm;
      tmp.noalias() -= fm * ay;
      Eigen::Map<M>(gx.raw().data() + (static_cast<size_t>(j) * N + i) * NF * NF) = tmp;
      tmp = (fm - fxp) * invh;
      tmp.noalias() -= ax * fm;
      tmp.noalias() += fm * ax;
      Eigen::Map<M>(gy.raw().data() + (static_cast<size_t>(j) * N + i) * NF * NF) = tmp;
    }
}

template <int NF>
void d_A_t(const UnitaryConnection& a, const MatField& xi, MatField& tx, MatField& ty) {
  using M = typename SeamT<NF>::M;
  const SeamT<NF> s(a.geo, a.twist);
  const int N = a.N();
  const double invh = static_cast<double>(N);
  M ax, ay, x, xp, yp, tmp;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      s.load(a.ax, i, j, ax);
      s.load(a.ay, i, j, ay);
      s.load(xi, i, j, x);
      s.ad(xi, i + 1, j, xp);
      s.ad(xi, i, j + 1, yp);
      tmp = (xp - x) * invh;
      tmp.noalias() += ax * x;
      tmp.noalias() -= x * ax;
      Eigen::Map<M>(tx.raw().data() + (static_cast<size_t>(j) * N + i) * NF * NF) = tmp;
      tmp = (yp - x) * invh;
      tmp.noalias() += ay * x;
      tmp.noalias() -= x * ay;
      Eigen::Map<M>(ty.raw().data() + (static_cast<size_t>(j) * N + i) * NF * NF) = tmp;
    }
}

template <int NF>
void d_A_star_t(const UnitaryConnection& a, const MatField& tx, const MatField& ty,
                MatField& out) {
  using M = typename SeamT<NF>::M;
  const SeamT<NF> s(a.geo, a.twist);
  const int N = a.N();
  const double invh = static_cast<double>(N);
  M ax, ay, x, y, xm, ym, tmp;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      s.load(a.ax, i, j, ax);
      s.load(a.ay, i, j, ay);
      s.load(tx, i, j, x);
      s.load(ty, i, j, y);
      s.ad(tx, i - 1, j, xm);
      s.ad(ty, i, j - 1, ym);
      tmp = (xm - x) * invh;
      tmp += (ym - y) * invh;
      tmp.noalias() -= ax * x;
      tmp.noalias() += x * ax;
      tmp.noalias() -= ay * y;
      tmp.noalias() += y * ay;
      Eigen::Map<M>(out.raw().data() + (static_cast<size_t>(j) * N + i) * NF * NF) = tmp;
    }
}

}  // namespace kernels
}  // namespace ymflow
