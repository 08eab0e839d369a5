#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ymflow/bundle.hpp"

using namespace ymflow;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("slope") {
  CHECK(slope({2, 3}) == Rational(3, 2));
  CHECK(slope({1, 0}) == Rational(0));
  CHECK(slope({4, -2}) == Rational(-1, 2));
}

TEST_CASE("characteristic vector") {
  const FiltrationSpec f{{{1, 3}, {2, 2}}};
  const auto v = char_vector(f);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == Rational(3));
  CHECK(v[1] == Rational(1));
  CHECK(v[2] == Rational(1));

  const FiltrationSpec single{{{4, 6}}};
  for (const auto& r : char_vector(single)) CHECK(r == Rational(3, 2));

  const FiltrationSpec g{{{1, 3}, {2, 2}, {1, -2}}};
  const auto w = char_vector(g);
  CHECK(w == std::vector<Rational>({3, 1, 1, -2}));
}

TEST_CASE("polygon, concavity, dominance") {
  const FiltrationSpec f{{{1, 3}, {2, 2}, {1, -2}}};
  const HNPolygon p = polygon(f);
  REQUIRE(p.vertices.size() == 4);
  CHECK(p.vertices[0] == std::pair<long long, long long>(0, 0));
  CHECK(p.vertices[1] == std::pair<long long, long long>(1, 3));
  CHECK(p.vertices[2] == std::pair<long long, long long>(3, 5));
  CHECK(p.vertices[3] == std::pair<long long, long long>(4, 3));
  CHECK(is_concave(f));
  CHECK(is_concave(FiltrationSpec{{{3, 2}}}));
  CHECK(!is_concave(FiltrationSpec{{{1, -1}, {1, 1}}}));

  const FiltrationSpec one{{{4, 3}}};
  CHECK(dominates(f, one) == Dominance::GreaterEqual);
  CHECK(dominates(one, f) == Dominance::LessEqual);
  CHECK(dominates(f, f) == Dominance::Equal);
  CHECK_THROWS_AS((void)dominates(f, FiltrationSpec{{{4, 2}}}), std::invalid_argument);
}

TEST_CASE("characteristic vector sums to the degree, polygon ends at (rank, degree)") {
  for (const auto& degrees : degree_multisets(4, -3, 3)) {
    for (const FiltrationSpec& f : split_filtrations(degrees)) {
      Rational s = 0;
      for (const auto& r : char_vector(f)) s += r;
      CHECK(s == Rational(f.degree()));
      const auto& last = polygon(f).vertices.back();
      CHECK(last.first == f.rank());
      CHECK(last.second == f.degree());
    }
  }
}

TEST_CASE("hn_split groups equal degrees in decreasing order") {
  const FiltrationSpec f = hn_split({3, 1, 1, -2});
  REQUIRE(f.blocks.size() == 3);
  CHECK(f.blocks[0] == std::pair<long long, long long>(1, 3));
  CHECK(f.blocks[1] == std::pair<long long, long long>(2, 2));
  CHECK(f.blocks[2] == std::pair<long long, long long>(1, -2));

  CHECK(hn_split({0, 0}) == FiltrationSpec{{{2, 0}}});
  CHECK(hn_split({1, -1}) == FiltrationSpec{{{1, 1}, {1, -1}}});
}

TEST_CASE("hn_from_oracle") {
  // split oracle reproduces hn_split
  const std::vector<long long> degrees{3, 1, 1, -2};
  CHECK(hn_from_oracle(BundleType{4, 3}, *split_oracle(degrees)) == hn_split(degrees));

  // semistable: no admissible slope above mu(E)
  const auto semi = table_oracle({{BundleType{2, 0}, {BundleType{1, 0}}}});
  CHECK(hn_from_oracle(BundleType{2, 0}, *semi) == FiltrationSpec{{{2, 0}}});

  // single destabilizing signature
  const auto tab = table_oracle({{BundleType{2, 0}, {BundleType{1, 1}}}});
  CHECK(hn_from_oracle(BundleType{2, 0}, *tab) == FiltrationSpec{{{1, 1}, {1, -1}}});

  // missing bookkeeping is reported
  const auto empty = table_oracle({});
  CHECK_THROWS_AS((void)hn_from_oracle(BundleType{3, 0}, *empty), std::invalid_argument);
}

TEST_CASE("hn_norm_check") {
  const FiltrationSpec hn = hn_split({3, 1, 1, -2});
  const FiltrationSpec f{{{4, 3}}};
  CHECK(char_norm_sq(f) == Rational(9, 4));
  CHECK(char_norm_sq(hn) == Rational(15));
  CHECK(hn_norm_check(f, hn));
  CHECK(hn_norm_check(hn, hn));  // equality branch
  CHECK_THROWS_AS((void)hn_norm_check(FiltrationSpec{{{1, -1}, {3, 4}}}, hn),
                  std::invalid_argument);
}

TEST_CASE("norm comparison of nested concave filtrations (exhaustive, small)") {
  for (const auto& degrees : degree_multisets(4, -3, 3)) {
    const auto concave = concave_split_filtrations(degrees);
    for (const auto& f1 : concave)
      for (const auto& f2 : concave) {
        const Dominance d = dominates(f2, f1);
        if (d == Dominance::GreaterEqual || d == Dominance::Equal) {
          CHECK(char_norm_sq(f1) <= char_norm_sq(f2));
          if (char_norm_sq(f1) == char_norm_sq(f2))
            CHECK(char_vector(f1) == char_vector(f2));
        }
      }
  }
}

TEST_CASE("central type") {
  CHECK(central_type({2, 0}).norm_sq() == doctest::Approx(0.0));
  const CentralType t22 = central_type({2, 2});
  CHECK(t22.imag_coefficient() == doctest::Approx(-2.0 * kPi));
  CHECK(t22.norm_sq() == doctest::Approx(8.0 * kPi * kPi));
  const CentralType t31 = central_type({3, 1});
  CHECK(t31.imag_coefficient() == doctest::Approx(-2.0 * kPi / 3.0));
}

TEST_CASE("weight of a filtration") {
  const FiltrationSpec f{{{1, 1}, {1, -1}}};
  const CentralType tau0 = central_type({2, 0});
  CHECK(weight_of_filtration(f, {-1.0, 1.0}, tau0) == doctest::Approx(-4.0 * kPi));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(weight_of_filtration(f, {-s, s}, tau0) ==
        doctest::Approx(-2.0 * kPi * std::sqrt(2.0)));
  CHECK_THROWS_AS((void)weight_of_filtration(f, {1.0, -1.0}, tau0), std::invalid_argument);
}

TEST_CASE("dominant weight") {
  const FiltrationSpec hn{{{1, 1}, {1, -1}}};
  const DominantWeightResult dw = dominant_weight(hn);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(dw.lambdas[0] == doctest::Approx(-s).epsilon(1e-12));
  CHECK(dw.lambdas[1] == doctest::Approx(s).epsilon(1e-12));
  CHECK(dw.norm == doctest::Approx(2.0 * kPi * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(dw.norm == doctest::Approx(8.885765876316732).epsilon(1e-10));

  for (long long d = 1; d <= 3; ++d) {
    const DominantWeightResult dwd = dominant_weight(FiltrationSpec{{{1, d}, {1, -d}}});
    CHECK(dwd.norm ==
          doctest::Approx(2.0 * kPi * std::sqrt(2.0) * static_cast<double>(d)).epsilon(1e-12));
  }

  // normalization sum lambda_j^2 n_j = 1 and ordering
  const FiltrationSpec hn3{{{1, 3}, {2, 2}, {1, -2}}};
  const DominantWeightResult dw3 = dominant_weight(hn3);
  double norm = 0.0;
  for (size_t j = 0; j < dw3.lambdas.size(); ++j) {
    norm += dw3.lambdas[j] * dw3.lambdas[j] * static_cast<double>(hn3.blocks[j].first);
    if (j) CHECK(dw3.lambdas[j] > dw3.lambdas[j - 1]);
  }
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));

  // consistency of the two weight formulas
  const CentralType tau = central_type(hn3.total());
  CHECK(-weight_of_filtration(hn3, dw3.lambdas, tau) ==
        doctest::Approx(dw3.norm).epsilon(1e-12));

  CHECK_THROWS_AS((void)dominant_weight(FiltrationSpec{{{2, 0}}}), std::invalid_argument);
}

TEST_CASE("dominant weight against the grid oracle") {
  const std::vector<FiltrationSpec> cases{
      {{{1, 1}, {1, -1}}},
      {{{1, 3}, {2, 2}, {1, -2}}},
      {{{2, 3}, {1, 1}, {1, 0}, {2, -4}}},
      {{{1, 2}, {3, 3}, {2, -1}}},
  };
  for (const auto& hn : cases) {
    const DominantWeightResult dw = dominant_weight(hn);
    const auto oracle = dominant_weight_grid_oracle(hn);
    for (size_t j = 0; j < dw.lambdas.size(); ++j)
      CHECK(std::abs(dw.lambdas[j] - oracle[j]) < 1e-7);
  }
}

TEST_CASE("c1 of ad of a maximal parabolic") {
  CHECK(c1_ad_parabolic({1, 1}, {2, 0}) == Rational(2));
  CHECK(c1_ad_parabolic({1, 0}, {2, 0}) == Rational(0));
  CHECK(c1_ad_parabolic({1, -1}, {2, 0}) == Rational(-2));
  CHECK_THROWS_AS((void)c1_ad_parabolic({2, 0}, {2, 0}), std::invalid_argument);
}

TEST_CASE("algebraic classification") {
  CHECK(classify_algebraic({2, 0}, {{1, 1}}).cls == StabilityClass::Unstable);
  CHECK(classify_algebraic({2, 1}, {{1, 0}}).cls == StabilityClass::Stable);
  const auto semi = classify_algebraic({2, 0}, {{1, 0}});
  CHECK(semi.cls == StabilityClass::Semistable);
  CHECK(!semi.polystable_certified);
  const auto poly = classify_algebraic(
      {2, 0}, {{1, 0}}, std::vector<BundleType>{{1, 0}, {1, 0}});
  CHECK(poly.cls == StabilityClass::Semistable);
  CHECK(poly.polystable_certified);
}

TEST_CASE("unstable iff some c1_ad_parabolic is positive") {
  for (const auto& degrees : degree_multisets(3, -2, 2)) {
    const FiltrationSpec hn = hn_split(degrees);
    const BundleType total = hn.total();
    const auto sigs = split_oracle(degrees)->admissible(total);
    if (!sigs || sigs->empty()) continue;
    const auto cls = classify_algebraic(total, *sigs);
    bool has_positive = false;
    for (const BundleType& s : *sigs)
      if (c1_ad_parabolic(s, total) > 0) has_positive = true;
    CHECK((cls.cls == StabilityClass::Unstable) == has_positive);
  }
}
