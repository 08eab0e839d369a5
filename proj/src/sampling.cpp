#include "ymflow/sampling.hpp"

#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace ymflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr Complex kI{0.0, 1.0};

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return splitmix64(base ^ splitmix64(h ^ splitmix64(index)));
}

CMatrix random_hermitian(int n, Rng& rng, double amplitude) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = Complex(nd(rng), nd(rng));
  CMatrix h = 0.5 * (m + m.adjoint());
  return amplitude * h;
}

CMatrix random_unitary(int n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = Complex(nd(rng), nd(rng));
  Eigen::HouseholderQR<CMatrix> qr(m);
  CMatrix q = qr.householderQ();
  CMatrix rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const Complex d = rmat(k, k);
    q.col(k) *= (std::abs(d) > 0 ? d / std::abs(d) : Complex(1, 0));
  }
  return q;
}

CMatrix random_algebra(int n, GroupKind kind, Rng& rng, double amplitude) {
  CMatrix xi = kI * random_hermitian(n, rng, amplitude);
  if (kind == GroupKind::SU) {
    const Complex t = xi.trace() / static_cast<double>(n);
    for (int k = 0; k < n; ++k) xi(k, k) -= t;
  }
  return xi;
}

namespace {

/// Real scalar field from low-frequency Fourier modes.
class ScalarWave {
 public:
  ScalarWave(Rng& rng, int modes) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
    double total = 0.0;
    for (int kx = -modes; kx <= modes; ++kx)
      for (int ky = -modes; ky <= modes; ++ky) {
        if (kx == 0 && ky == 0) continue;
        const double amp = nd(rng) / (1.0 + kx * kx + ky * ky);
        terms_.push_back({amp, ph(rng), static_cast<double>(kx), static_cast<double>(ky)});
        total += std::abs(amp);
      }
    constant_ = 0.3 * nd(rng);
    total += std::abs(constant_);
    // normalize so the field is bounded by 1 pointwise
    if (total > 1.0) {
      for (auto& t : terms_) t.amp /= total;
      constant_ /= total;
    }
  }

  double operator()(double x, double y) const {
    double s = constant_;
    for (const auto& t : terms_) s += t.amp * std::cos(2.0 * kPi * (t.kx * x + t.ky * y) + t.phase);
    return s;
  }

 private:
  struct Term {
    double amp, phase, kx, ky;
  };
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

/// Quasi-periodic scalar profile for an off-diagonal entry of a twisted
/// section: psi(x + 1, y) = e^{2 pi i D y} psi(x, y), psi periodic in y.
/// Built as sum_m rho(m - D x) e^{2 pi i m y} with a Gaussian bump profile.
class ThetaWave {
 public:
  ThetaWave(Rng& rng, long long D) : D_(static_cast<double>(D)) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    double total = 0.0;
    for (int g = 0; g < 3; ++g) {
      bumps_.push_back({Complex(nd(rng), nd(rng)), ud(rng)});
      total += std::abs(bumps_.back().amp);
    }
    // the m-sum of shifted Gaussians has mass about 1; bound the result by 1
    if (total > 1.0)
      for (auto& b : bumps_) b.amp /= total;
  }

  Complex operator()(double x, double y) const {
    Complex s{0, 0};
    const double center = D_ * x;
    const long long m0 = static_cast<long long>(std::floor(center));
    for (long long m = m0 - 5; m <= m0 + 5; ++m) {
      Complex rho{0, 0};
      for (const auto& b : bumps_) {
        const double a = static_cast<double>(m) - center - b.shift;
        rho += b.amp * std::exp(-kPi * a * a);
      }
      s += rho * std::exp(2.0 * kPi * kI * static_cast<double>(m) * y);
    }
    return s;
  }

 private:
  struct Bump {
    Complex amp;
    double shift;
  };
  double D_;
  std::vector<Bump> bumps_;
};

void project_su(MatField& f) {
  const int N = f.N(), n = f.n();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      auto m = f.at(i, j);
      const Complex t = m.trace() / static_cast<double>(n);
      for (int k = 0; k < n; ++k) m(k, k) -= t;
    }
}

}  // namespace

LieSection random_smooth_section(const GridGeometry& g, int n, GroupKind kind, Rng& rng,
                                 double amplitude, int modes) {
  LieSection s{g, TwistData::zero(n), MatField(g.N, n), false};
  // hermitian H(x,y) from scalar waves, then xi = i H
  std::vector<ScalarWave> diag;
  std::vector<std::pair<ScalarWave, ScalarWave>> off;
  for (int k = 0; k < n; ++k) diag.emplace_back(rng, modes);
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) off.emplace_back(ScalarWave(rng, modes), ScalarWave(rng, modes));
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const double x = static_cast<double>(i) / g.N, y = static_cast<double>(j) / g.N;
      auto m = s.v.at(i, j);
      int o = 0;
      for (int r = 0; r < n; ++r) {
        m(r, r) = kI * diag[r](x, y);
        for (int c = r + 1; c < n; ++c) {
          const Complex z{off[o].first(x, y), off[o].second(x, y)};
          m(r, c) = kI * z;
          m(c, r) = kI * std::conj(z);
          ++o;
        }
      }
      m *= amplitude;
    }
  if (kind == GroupKind::SU) project_su(s.v);
  return s;
}

LieSection random_twisted_section(const GridGeometry& g, const TwistData& twist,
                                  GroupKind kind, Rng& rng, double amplitude, int modes) {
  const int n = twist.n();
  if (twist.trivial()) {
    LieSection s = random_smooth_section(g, n, kind, rng, amplitude, modes);
    s.twist = twist;
    return s;
  }
  LieSection s{g, twist, MatField(g.N, n), false};
  std::vector<ScalarWave> diag;
  for (int k = 0; k < n; ++k) diag.emplace_back(rng, modes);
  struct OffEntry {
    int r, c;
    ThetaWave wave;
  };
  std::vector<OffEntry> off;
  std::vector<std::pair<ScalarWave, ScalarWave>> off_flat;
  std::vector<std::pair<int, int>> off_flat_idx;
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) {
      const long long D = twist.degrees[r] - twist.degrees[c];
      if (D == 0) {
        off_flat.emplace_back(ScalarWave(rng, modes), ScalarWave(rng, modes));
        off_flat_idx.emplace_back(r, c);
      } else {
        off.push_back({r, c, ThetaWave(rng, D)});
      }
    }
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const double x = static_cast<double>(i) / g.N, y = static_cast<double>(j) / g.N;
      auto m = s.v.at(i, j);
      for (int k = 0; k < n; ++k) m(k, k) = kI * diag[k](x, y);
      for (size_t o = 0; o < off_flat.size(); ++o) {
        const auto [r, c] = off_flat_idx[o];
        const Complex z{off_flat[o].first(x, y), off_flat[o].second(x, y)};
        m(r, c) = kI * z;
        m(c, r) = kI * std::conj(z);
      }
      for (const auto& e : off) {
        const Complex z = e.wave(x, y);
        m(e.r, e.c) = z;
        m(e.c, e.r) = -std::conj(z);
      }
      m *= amplitude;
    }
  if (kind == GroupKind::SU) project_su(s.v);
  return s;
}

GaugeTransform exp_section(const LieSection& zeta, bool unitary_hint) {
  GaugeTransform g{zeta.geo, zeta.twist, MatField(zeta.N(), zeta.n()), unitary_hint};
  const int N = zeta.N();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const Eigen::MatrixXcd z = zeta.v.at(i, j);
      g.v.at(i, j) = z.exp();
    }
  return g;
}

GaugeTransform random_gauge(const GridGeometry& g, const TwistData& twist, GroupKind kind,
                            Rng& rng, double amplitude, bool unitary, int modes) {
  LieSection zeta = random_twisted_section(g, twist, kind, rng, amplitude, modes);
  if (!unitary) {
    const LieSection im = random_twisted_section(g, twist, kind, rng, amplitude, modes);
    zeta.complexified = true;
    const int N = g.N;
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) zeta.v.at(i, j) += kI * Mat(im.v.at(i, j));
  }
  return exp_section(zeta, unitary);
}

GaugeTransform constant_gauge(const GridGeometry& g, const TwistData& twist, GroupKind kind,
                              Rng& rng, bool unitary) {
  const int n = twist.n();
  CMatrix zeta = random_algebra(n, kind, rng, 0.5);
  if (!unitary) zeta += kI * random_algebra(n, kind, rng, 0.5);
  // zero the entries that fail to commute with the twist
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (twist.degrees[r] != twist.degrees[c]) zeta(r, c) = Complex(0, 0);
  const CMatrix val = zeta.exp();
  GaugeTransform out{g, twist, MatField(g.N, n), unitary};
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) out.v.at(i, j) = val;
  return out;
}

GaugeTransform random_semistable_gauge(const GridGeometry& g, const TwistData& twist,
                                       GroupKind kind, Rng& rng, double diag_amplitude,
                                       double generic_amplitude, int modes) {
  const int n = twist.n();
  LieSection zeta{g, twist, MatField(g.N, n), true};
  std::vector<ScalarWave> waves;
  for (int k = 0; k < 2 * n; ++k) waves.emplace_back(rng, modes);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const double x = static_cast<double>(i) / g.N, y = static_cast<double>(j) / g.N;
      auto m = zeta.v.at(i, j);
      Complex tr{0, 0};
      for (int k = 0; k < n; ++k) {
        m(k, k) = diag_amplitude * Complex(0, 1) *
                  Complex(waves[2 * k](x, y), waves[2 * k + 1](x, y));
        tr += m(k, k);
      }
      if (kind == GroupKind::SU)
        for (int k = 0; k < n; ++k) m(k, k) -= tr / static_cast<double>(n);
    }
  const GaugeTransform diag = exp_section(zeta, false);
  if (generic_amplitude <= 0.0) return diag;
  const GaugeTransform gen = random_gauge(g, twist, kind, rng, generic_amplitude, false, modes);
  return gauge_compose(gen, diag);
}

GaugeTransform random_parabolic_gauge(const GridGeometry& g, const TwistData& twist,
                                      Rng& rng, double diag_amplitude,
                                      double upper_amplitude, int modes) {
  const int n = twist.n();
  LieSection zeta{g, twist, MatField(g.N, n), true};
  std::vector<ScalarWave> diag_re;
  for (int k = 0; k < 2 * n; ++k) diag_re.emplace_back(rng, modes);
  struct Upper {
    int r, c;
    ThetaWave wave;
  };
  std::vector<Upper> upper;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (twist.degrees[r] > twist.degrees[c])
        upper.push_back({r, c, ThetaWave(rng, twist.degrees[r] - twist.degrees[c])});
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      const double x = static_cast<double>(i) / g.N, y = static_cast<double>(j) / g.N;
      auto m = zeta.v.at(i, j);
      for (int k = 0; k < n; ++k)
        m(k, k) = diag_amplitude *
                  Complex(diag_re[2 * k](x, y), diag_re[2 * k + 1](x, y)) *
                  Complex(0, 1);
      for (const auto& u : upper) m(u.r, u.c) = upper_amplitude * u.wave(x, y);
    }
  return exp_section(zeta, false);
}

UnitaryConnection random_connection(const GridGeometry& g, const MatrixGroupSpec& grp,
                                    Rng& rng, double amplitude, int modes) {
  UnitaryConnection a = make_flat_connection(g, grp);
  const LieSection sx = random_smooth_section(g, grp.n, grp.kind, rng, amplitude, modes);
  const LieSection sy = random_smooth_section(g, grp.n, grp.kind, rng, amplitude, modes);
  a.ax = sx.v;
  a.ay = sy.v;
  return a;
}

TangentField random_tangent(const UnitaryConnection& a, Rng& rng, double amplitude, int modes) {
  const LieSection sx =
      random_twisted_section(a.geo, a.twist, a.group.kind, rng, amplitude, modes);
  const LieSection sy =
      random_twisted_section(a.geo, a.twist, a.group.kind, rng, amplitude, modes);
  return TangentField{sx.v, sy.v};
}

}  // namespace ymflow
