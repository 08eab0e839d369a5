#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ymflow/lie.hpp"
#include "ymflow/sampling.hpp"

using namespace ymflow;

namespace {
constexpr Complex kI{0.0, 1.0};

CMatrix idiag(std::initializer_list<double> d) {
  const int n = static_cast<int>(d.size());
  CMatrix m = CMatrix::Zero(n, n);
  int k = 0;
  for (double v : d) m(k, k) = kI * v, ++k;
  return m;
}
}  // namespace

TEST_CASE("inner product tr(xi eta^*)") {
  const AlgebraElement a = AlgebraElement::compact(idiag({1, -1}));
  CHECK(inner_product(a, a) == doctest::Approx(2.0).epsilon(1e-14));

  const AlgebraElement zero = AlgebraElement::compact(CMatrix::Zero(2, 2));
  CHECK(inner_product(zero, a) == doctest::Approx(0.0));

  const AlgebraElement center = AlgebraElement::compact(idiag({1, 1}));
  CHECK(inner_product(a, center) == doctest::Approx(0.0));

  const AlgebraElement b3 = AlgebraElement::compact(idiag({1, 2, 3}));
  CHECK_THROWS_AS((void)inner_product(a, b3), std::invalid_argument);
}

TEST_CASE("eigen_split basics") {
  // i*xi = diag(-1, 1): ascending eigenvalues with e1 in the lambda=-1 block
  const AlgebraElement xi = AlgebraElement::compact(idiag({1, -1}));
  const EigenSplit sp = eigen_split(xi);
  REQUIRE(sp.blocks() == 2);
  CHECK(sp.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(sp.eigenvalues[1] == doctest::Approx(1.0));
  CMatrix p0 = CMatrix::Zero(2, 2);
  p0(0, 0) = 1;
  CHECK((sp.projectors[0] - p0).norm() < 1e-12);
  CHECK((sp.projectors[1] - (CMatrix::Identity(2, 2) - p0)).norm() < 1e-12);

  const AlgebraElement z3 = AlgebraElement::compact(CMatrix::Zero(3, 3));
  const EigenSplit spz = eigen_split(z3);
  REQUIRE(spz.blocks() == 1);
  CHECK(spz.multiplicities[0] == 3);
  CHECK((spz.projectors[0] - CMatrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("eigen_split properties on random conjugates") {
  Rng rng(derive_seed(7, "eigen_split", 0));
  for (int s = 0; s < 20; ++s) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const CMatrix xi = random_algebra(n, GroupKind::U, rng);
    const EigenSplit sp = eigen_split(AlgebraElement::compact(xi), 1e-9);
    CMatrix sum = CMatrix::Zero(n, n);
    int mult = 0;
    for (int b = 0; b < sp.blocks(); ++b) {
      const CMatrix& p = sp.projectors[b];
      sum += p;
      mult += sp.multiplicities[b];
      CHECK((p * p - p).norm() < 1e-10);
      CHECK((p - p.adjoint()).norm() < 1e-10);
      for (int b2 = 0; b2 < b; ++b2)
        CHECK((p * sp.projectors[b2]).norm() < 1e-10);
    }
    CHECK((sum - CMatrix::Identity(n, n)).norm() < 1e-10);
    CHECK(mult == n);

    const CMatrix u = random_unitary(n, rng);
    const EigenSplit sp2 = eigen_split(AlgebraElement::compact(u * xi * u.adjoint()));
    REQUIRE(sp2.blocks() == sp.blocks());
    for (int b = 0; b < sp.blocks(); ++b)
      CHECK(sp2.eigenvalues[b] == doctest::Approx(sp.eigenvalues[b]).epsilon(1e-9));
  }
}

TEST_CASE("parabolic and levi membership block patterns") {
  const AlgebraElement xi = AlgebraElement::compact(idiag({1, -1}));
  CMatrix gu(2, 2), gl(2, 2), gd(2, 2);
  gu << 1, 1, 0, 1;
  gl << 1, 0, 1, 1;
  gd << 2, 0, 0, 0.5;
  // eigen-order: e1 has lambda = -1, so upper triangular = parabolic
  CHECK(parabolic_membership(gu, xi));
  CHECK(!parabolic_membership(gl, xi));
  CHECK(levi_membership(gd, xi));
  CHECK(!levi_membership(gu, xi));

  // Q(0) = G^c, L(0) = G^c
  const AlgebraElement zero = AlgebraElement::compact(CMatrix::Zero(2, 2));
  CHECK(parabolic_membership(gl, zero));
  CHECK(levi_membership(gu, zero));

  CHECK_THROWS_AS((void)parabolic_membership(CMatrix::Zero(2, 2), xi), std::invalid_argument);
}

TEST_CASE("levi implies parabolic") {
  Rng rng(derive_seed(7, "levi", 0));
  for (int s = 0; s < 50; ++s) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const CMatrix xi = random_algebra(n, GroupKind::U, rng);
    const AlgebraElement ax = AlgebraElement::compact(xi);
    const EigenSplit sp = eigen_split(ax);
    // build a block-diagonal g in the eigenbasis
    CMatrix g = CMatrix::Zero(n, n);
    for (int b = 0; b < sp.blocks(); ++b)
      g += sp.projectors[b] * Complex(1.0 + 0.2 * b, 0.1) ;
    if (levi_membership(g, ax)) CHECK(parabolic_membership(g, ax));
  }
}

TEST_CASE("roots of type A, exact dual basis") {
  const RootDatum r2 = roots_type_A(2);
  CHECK(r2.roots.size() == 2);
  CHECK(r2.simple_roots.size() == 1);
  // t1 = i diag(1, -1), |t1|^2 = 2, dual = i diag(1/2, -1/2)
  CHECK(RootDatum::pairing(r2.simple_roots[0], r2.simple_roots[0]) == Rational(2));
  CHECK(r2.dual_basis[0][0] == Rational(1, 2));
  CHECK(r2.dual_basis[0][1] == Rational(-1, 2));

  const RootDatum r3 = roots_type_A(3);
  CHECK(r3.roots.size() == 6);
  CHECK(r3.simple_roots.size() == 2);

  for (int n = 2; n <= 6; ++n) {
    const RootDatum rd = roots_type_A(n);
    // every root's negative is present
    for (const auto& r : rd.roots) {
      std::vector<Rational> neg(r.size());
      for (size_t k = 0; k < r.size(); ++k) neg[k] = -r[k];
      bool found = false;
      for (const auto& o : rd.roots) found = found || o == neg;
      CHECK(found);
    }
    // exact delta relation
    for (int i = 0; i < rd.rank; ++i)
      for (int j = 0; j < rd.rank; ++j) {
        const Rational lhs = RootDatum::pairing(rd.dual_basis[i], rd.simple_roots[j]) * 2 /
                             RootDatum::pairing(rd.simple_roots[j], rd.simple_roots[j]);
        CHECK(lhs == Rational(i == j ? 1 : 0));
      }
    // reflections permute the roots
    for (int j = 0; j < rd.rank; ++j)
      for (const auto& r : rd.roots) {
        const auto img = RootDatum::reflect(r, j);
        bool found = false;
        for (const auto& o : rd.roots) found = found || o == img;
        CHECK(found);
      }
  }
  CHECK_THROWS_AS((void)roots_type_A(1), std::invalid_argument);
}

TEST_CASE("chamber coordinates") {
  const RootDatum rd = roots_type_A(2);
  {
    const ChamberCoordinates cc =
        chamber_coordinates(AlgebraElement::compact(idiag({1, -1})), rd);
    CHECK(cc.x[0] == doctest::Approx(2.0));
    CHECK(cc.central == doctest::Approx(0.0));
    CHECK((cc.u - CMatrix::Identity(2, 2)).norm() < 1e-12);
  }
  {
    const ChamberCoordinates cc =
        chamber_coordinates(AlgebraElement::compact(idiag({-1, 1})), rd);
    CHECK(cc.x[0] == doctest::Approx(2.0));
    // u is the swap permutation up to phases
    CHECK(std::abs(cc.u(0, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(cc.u(1, 0)) == doctest::Approx(1.0));
  }
  {
    const ChamberCoordinates cc =
        chamber_coordinates(AlgebraElement::compact(idiag({1, 1})), rd);
    CHECK(cc.x[0] == doctest::Approx(0.0));
    CHECK(cc.central == doctest::Approx(1.0));
  }
  // reconstruction: u xi u^* = sum x_j tcheck_j + central i Id
  Rng rng(derive_seed(7, "chamber", 1));
  for (int s = 0; s < 30; ++s) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const RootDatum rdn = roots_type_A(n);
    const CMatrix xi = random_algebra(n, GroupKind::U, rng);
    const ChamberCoordinates cc = chamber_coordinates(AlgebraElement::compact(xi), rdn);
    CMatrix rec = CMatrix::Zero(n, n);
    for (int j = 0; j < rdn.rank; ++j) {
      CHECK(cc.x[j] >= -1e-12);
      rec += cc.x[j] * rdn.as_matrix(rdn.dual_basis[j]);
    }
    rec += cc.central * kI * CMatrix::Identity(n, n);
    CHECK((cc.u * xi * cc.u.adjoint() - rec).norm() < 1e-9);
  }
}

TEST_CASE("parabolic membership equals boundedness of the conjugated flow") {
  // A compact version of the acceptance sweep: membership iff
  // sup_t ||e^{it xi} g e^{-it xi}|| stays bounded.
  Rng rng(derive_seed(7, "bounded", 0));
  for (int s = 0; s < 100; ++s) {
    const int n = 2 + static_cast<int>(rng() % 2);
    std::uniform_real_distribution<double> gap(0.6, 1.4);
    std::vector<double> lam(n);
    double acc = -1.5;
    for (int k = 0; k < n; ++k) {
      acc += gap(rng);
      lam[k] = acc;
    }
    const CMatrix v = random_unitary(n, rng);
    CMatrix h = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) h(k, k) = lam[k];
    const AlgebraElement xi{-kI * (v * h * v.adjoint()), AlgebraPart::Compact};

    CMatrix gtri = CMatrix::Identity(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c) gtri(r, c) = Complex(0.7, 0.2);
    const bool member_expected = s % 2 == 0;
    if (!member_expected) gtri(n - 1, 0) = Complex(0.4, 0.1);
    const CMatrix g = v * gtri * v.adjoint();

    CHECK(parabolic_membership(g, xi) == member_expected);
    // e^{it xi} g e^{-it xi} = v (e^{t Lam} gtri e^{-t Lam}) v^*; evaluate in
    // the eigenframe so the exact zero pattern is not polluted by roundoff
    bool bounded = true;
    for (int ts = 0; ts <= 20; ++ts) {
      const double t = 2.5 * ts;
      double norm_sq = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const double f = std::exp(std::min(700.0, t * (lam[r] - lam[c])));
          norm_sq += std::norm(f * gtri(r, c));
        }
      if (std::sqrt(norm_sq) > 1e6) bounded = false;
    }
    CHECK(bounded == member_expected);
  }
}

TEST_CASE("chamber-parabolic consistency (intersection of maximal parabolics)") {
  Rng rng(derive_seed(7, "chamber_consistency", 0));
  for (int s = 0; s < 40; ++s) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const RootDatum rd = roots_type_A(n);
    std::uniform_real_distribution<double> ud(0.3, 1.5);
    CMatrix diag = CMatrix::Zero(n, n);
    for (int j = 0; j < rd.rank; ++j) {
      const double x = (rng() % 2) ? ud(rng) : 0.0;
      for (int k = 0; k < n; ++k) diag(k, k) += kI * x * to_double(rd.dual_basis[j][k]);
    }
    const CMatrix u = random_unitary(n, rng);
    const AlgebraElement xi{u * diag * u.adjoint(), AlgebraPart::Compact};
    CMatrix g = CMatrix::Identity(n, n);
    if (s % 2) {
      for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) g(r, c) = Complex(ud(rng), ud(rng));
    } else {
      g(n - 1, 0) = Complex(0.6, 0.0);
    }
    CHECK(chamber_parabolic_consistent(xi, rd, g));
  }
}
