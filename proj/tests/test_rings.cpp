#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "conormal/fp.hpp"
#include "conormal/ring.hpp"
#include "conormal/sketch.hpp"

using namespace conormal;

static Polynomial random_form(const PrimeField& F, const GradedRing& R, const Multideg& d,
                              Splitmix& rng) {
  Polynomial p(&R);
  for (const Expo& e : R.degree_basis(d)) p.add_term(F, e, rng.field_elt(F));
  return p;
}

TEST_CASE("degree bases are deterministic graded-lex enumerations") {
  SUBCASE("two variables, degree 2") {
    GradedRing R = GradedRing::standard(2);
    const auto& b = R.degree_basis({2});
    REQUIRE(b.size() == 3);
    CHECK(b[0] == Expo{2, 0});
    CHECK(b[1] == Expo{1, 1});
    CHECK(b[2] == Expo{0, 2});
    CHECK(R.monomial_index({2}, Expo{1, 1}) == 1);
  }
  SUBCASE("scroll (2,1), bidegree (1,0)") {
    ScrollRing S({2, 1});
    const auto& b = S.ring->degree_basis({1, 0});
    CHECK(b.size() == 5);  // f + d
    // y1 carries t-degree 2, y2 t-degree 1
    CHECK(b[0] == Expo{1, 0, 2, 0});
    CHECK(b[1] == Expo{1, 0, 1, 1});
    CHECK(b[2] == Expo{1, 0, 0, 2});
    CHECK(b[3] == Expo{0, 1, 1, 0});
    CHECK(b[4] == Expo{0, 1, 0, 1});
  }
  SUBCASE("scroll (1,1,1), negative twist is empty") {
    ScrollRing S({1, 1, 1});
    CHECK(S.ring->degree_dim({0, -1}) == 0);
  }
  SUBCASE("bigraded counts") {
    GradedRing R = GradedRing::bigraded(3, 2);
    CHECK(R.degree_dim({2, 2}) == 6 * 3);  // C(4,2) * C(3,1)
  }
}

TEST_CASE("polynomial arithmetic") {
  PrimeField F(FieldConfig::defaults().prime);
  GradedRing R = GradedRing::standard(5);
  Splitmix rng(5);

  SUBCASE("partial derivative of z0^2 z1") {
    Polynomial p = monomial(R, Expo{2, 1, 0, 0, 0});
    Polynomial d = partial_derivative(F, p, 0);
    Polynomial expect = monomial(R, Expo{1, 1, 0, 0, 0}, 2);
    CHECK(d == expect);
  }
  SUBCASE("Euler identity on 100 random cubics") {
    for (int t = 0; t < 100; ++t) {
      Polynomial p = random_form(F, R, {3}, rng);
      Polynomial sum(&R);
      for (uint32_t j = 0; j < 5; ++j) {
        Expo zj(5, 0);
        zj[j] = 1;
        sum = add(F, sum, multiply(F, monomial(R, zj), partial_derivative(F, p, j)));
      }
      CHECK(sum == scale(F, p, 3));
    }
  }
  SUBCASE("Leibniz rule on random pairs") {
    for (int t = 0; t < 50; ++t) {
      Polynomial p = random_form(F, R, {2}, rng);
      Polynomial q = random_form(F, R, {3}, rng);
      uint32_t j = static_cast<uint32_t>(rng.below(5));
      Polynomial lhs = partial_derivative(F, multiply(F, p, q), j);
      Polynomial rhs = add(F, multiply(F, partial_derivative(F, p, j), q),
                           multiply(F, p, partial_derivative(F, q, j)));
      CHECK(lhs == rhs);
    }
  }
  SUBCASE("derivative drops homogeneous degree by one") {
    Polynomial p = random_form(F, R, {4}, rng);
    Polynomial d = partial_derivative(F, p, 2);
    if (!d.is_zero()) CHECK(d.degree() == Multideg{3});
  }
  SUBCASE("ring mismatch is an error") {
    GradedRing R2 = GradedRing::standard(5);
    Polynomial p = monomial(R, Expo{1, 0, 0, 0, 0});
    Polynomial q = monomial(R2, Expo{1, 0, 0, 0, 0});
    CHECK_THROWS(multiply(F, p, q));
  }
}

TEST_CASE("p1 cohomology") {
  CHECK(p1_cohomology({0}).h0 == 1);
  CHECK(p1_cohomology({0}).h1 == 0);
  CHECK(p1_cohomology({-2}).h0 == 0);
  CHECK(p1_cohomology({-2}).h1 == 1);
  CHECK(p1_cohomology({-1}).h0 == 0);
  CHECK(p1_cohomology({-1}).h1 == 0);
  // S^3 of E(-1) for E = O(2) + O(1): twists {3,2,1,0}
  auto tw = sym_twists({1, 0}, 3, 0);
  std::vector<int64_t> sorted(tw.begin(), tw.end());
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int64_t>{0, 1, 2, 3});
  CHECK(p1_cohomology(tw).h0 == 10);
  CHECK(p1_cohomology(tw).h1 == 0);
}

TEST_CASE("scroll bidegree dimensions match weight enumeration") {
  for (auto& e : {std::vector<int>{2, 1}, std::vector<int>{3, 2, 1}, std::vector<int>{2, 2, 1},
                  std::vector<int>{1, 1, 1, 1}}) {
    ScrollRing S(e);
    for (int a = 0; a <= 5; ++a)
      for (int b = -6; b <= 6; ++b) {
        CAPTURE(a);
        CAPTURE(b);
        CHECK(static_cast<int64_t>(S.dim(a, b)) == S.h0(a, b));
      }
  }
}
