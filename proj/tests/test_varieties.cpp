#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "conormal/variety.hpp"

using namespace conormal;

static FieldConfig test_cfg() {
  FieldConfig cfg = FieldConfig::defaults();
  cfg.retry_primes = {1073741783u};  // one confirmation prime keeps tests quick
  return cfg;
}

static uint32_t ideal_dim(EmbeddedVariety& X, uint32_t k) { return X.ideal_piece(k).dim(); }

TEST_CASE("veronese embeddings") {
  FieldConfig cfg = test_cfg();
  PrimeField F(cfg.prime);
  SUBCASE("conic (1,2)") {
    auto X = veronese(F, 1, 2);
    CHECK(X->n_vars() == 3);
    CHECK(ideal_dim(*X, 2) == 1);
  }
  SUBCASE("twisted cubic (1,3)") {
    auto X = veronese(F, 1, 3);
    CHECK(X->n_vars() == 4);
    CHECK(ideal_dim(*X, 2) == 3);
    CHECK(ideal_dim(*X, 1) == 0);
  }
  SUBCASE("veronese surface (2,2)") {
    auto X = veronese(F, 2, 2);
    CHECK(X->n_vars() == 6);
    CHECK(ideal_dim(*X, 2) == 6);
  }
}

TEST_CASE("segre embeddings") {
  PrimeField F(test_cfg().prime);
  CHECK(ideal_dim(*segre(F, 1, 1), 2) == 1);
  CHECK(ideal_dim(*segre(F, 1, 2), 2) == 3);
  CHECK(ideal_dim(*segre(F, 2, 2), 2) == 9);
}

TEST_CASE("rational normal scrolls") {
  PrimeField F(test_cfg().prime);
  SUBCASE("X(1,1) is the Segre quadric") {
    auto X = scroll_variety(F, {1, 1});
    CHECK(X->n_vars() == 4);
    CHECK(ideal_dim(*X, 2) == 1);
  }
  SUBCASE("cubic scroll X(2,1)") {
    auto X = scroll_variety(F, {2, 1});
    CHECK(X->n_vars() == 5);
    CHECK(ideal_dim(*X, 2) == 3);
  }
  SUBCASE("X(2,2,1) sections match weight enumeration") {
    auto X = scroll_variety(F, {2, 2, 1});
    CHECK(X->n_vars() == 8);
    ScrollRing S({2, 2, 1});
    for (uint32_t k = 1; k <= 3; ++k)
      CHECK(static_cast<int64_t>(X->dimA(k)) == S.h0(static_cast<int>(k), 0));
  }
}

TEST_CASE("complete intersections") {
  FieldConfig cfg = test_cfg();
  PrimeField F(cfg.prime);
  SUBCASE("genus-4 canonical curve: quadric and cubic in P^3") {
    auto X = complete_intersection(cfg, F, 3, {2, 3}, 7);
    CHECK(X->meta().genus == 4);
    CHECK(ideal_dim(*X, 2) == 1);
    CHECK(ideal_dim(*X, 3) == 5);
  }
  SUBCASE("genus-5 canonical curve: three quadrics in P^4") {
    auto X = complete_intersection(cfg, F, 4, {2, 2, 2}, 7);
    CHECK(X->meta().genus == 5);
    CHECK(ideal_dim(*X, 2) == 3);
  }
  SUBCASE("plane septic Hilbert value") {
    auto X = complete_intersection(cfg, F, 2, {7}, 7);
    CHECK(static_cast<int64_t>(X->dimA(7)) == binom(9, 2) - 1);
  }
}

TEST_CASE("canonical plane curves") {
  FieldConfig cfg = test_cfg();
  PrimeField F(cfg.prime);
  SUBCASE("quintic: genus 6") {
    auto X = plane_curve_canonical(cfg, F, 5, 11);
    CHECK(X->meta().genus == 6);
    CHECK(X->dimA(1) == 6);
    CHECK(ideal_dim(*X, 2) == 21 - 15);
  }
  SUBCASE("septic: genus 15") {
    auto X = plane_curve_canonical(cfg, F, 7, 11);
    CHECK(X->meta().genus == 15);
    CHECK(X->dimA(1) == 15);
    CHECK(X->dimA(2) == 42);
    CHECK(ideal_dim(*X, 2) == 120 - 42);
  }
}

TEST_CASE("tetragonal curves") {
  FieldConfig cfg = test_cfg();
  PrimeField F(cfg.prime);
  SUBCASE("g=7, b=(1,1)") {
    auto X = tetragonal_curve(cfg, F, {2, 1, 1}, 1, 1, 3);
    CHECK(X->meta().genus == 7);
    CHECK(X->n_vars() == 7);
    CHECK(X->dimA(2) == 18);
  }
  SUBCASE("g=8, b=(1,2)") {
    auto X = tetragonal_curve(cfg, F, {2, 2, 1}, 1, 2, 3);
    CHECK(X->meta().genus == 8);
    CHECK(ideal_dim(*X, 2) == 36 - 21);
  }
  SUBCASE("g=7, b=(0,2)") {
    auto X = tetragonal_curve(cfg, F, {2, 1, 1}, 0, 2, 3);
    CHECK(X->meta().genus == 7);
    CHECK(X->dimA(3) == 30);
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS(tetragonal_curve(cfg, F, {2, 1, 1}, 2, 1, 3));   // b1 > b2
    CHECK_THROWS(tetragonal_curve(cfg, F, {2, 1, 1}, 1, 2, 3));   // b1+b2 != f-2
  }
}

TEST_CASE("pentagonal curves") {
  FieldConfig cfg = test_cfg();
  PrimeField F(cfg.prime);
  SUBCASE("balanced genus 8") {
    auto X = pentagonal_for_genus(cfg, F, 8, 5);
    CHECK(X->meta().genus == 8);
    CHECK(X->n_vars() == 8);
    auto& d = *X->scroll_data;
    CHECK(d.scroll->e == std::vector<int>{1, 1, 1, 1});
    // four a_i equal to one and one equal to zero
    int ones = 0, zeros = 0;
    for (int ai : d.a) (ai == 1 ? ones : zeros)++;
    CHECK(ones == 4);
    CHECK(zeros == 1);
    // Pfaffian vector is a syzygy of the skew matrix: sum_k psi[j][k] w_k = 0
    // with the alternating-sign Pfaffian adjoint
    for (int j = 0; j < 5; ++j) {
      Polynomial acc(d.scroll->ring.get());
      for (int k = 0; k < 5; ++k) {
        if (k == j) continue;
        uint32_t sign = (k % 2 == 0) ? 1 : F.neg(1);
        acc = add(F, acc, scale(F, multiply(F, d.psi[j][k], d.equations[k]), sign));
      }
      CHECK(acc.is_zero());
    }
  }
  SUBCASE("balanced genus 9") {
    auto X = pentagonal_for_genus(cfg, F, 9, 5);
    CHECK(X->meta().genus == 9);
    CHECK(X->scroll_data->scroll->e == std::vector<int>{2, 1, 1, 1});
    CHECK(X->scroll_data->a == std::vector<int>{2, 1, 1, 1, 1});
  }
  SUBCASE("unsupported genera") {
    CHECK_THROWS(pentagonal_for_genus(cfg, F, 10, 5));
    CHECK_THROWS(pentagonal_for_genus(cfg, F, 15, 5));
  }
}

TEST_CASE("grassmannian G(2,5)") {
  PrimeField F(test_cfg().prime);
  auto X = grassmannian_g25(F);
  CHECK(X->dimA(1) == 10);
  CHECK(X->dimA(2) == 50);
  CHECK(X->dimP(2) == 55);
  CHECK(ideal_dim(*X, 2) == 5);
}

TEST_CASE("five Gorenstein points") {
  FieldConfig cfg = test_cfg();
  PrimeField F(cfg.prime);
  auto X = gorenstein_points5(cfg, F, 13);
  CHECK(ideal_dim(*X, 1) == 0);
  CHECK(ideal_dim(*X, 2) == 5);
  for (uint32_t k = 2; k <= 5; ++k) CHECK(X->dimA(k) == 5);
}

TEST_CASE("smoothness spot checks") {
  FieldConfig cfg = test_cfg();
  PrimeField F(cfg.prime);
  SUBCASE("twisted cubic passes at 10 points") {
    auto X = veronese(F, 1, 3);
    CHECK(smoothness_spot_check(*X, 10, 99) == SpotCheck::PASS);
  }
  SUBCASE("five general points pass") {
    auto X = gorenstein_points5(cfg, F, 13);
    CHECK(smoothness_spot_check(*X, 5, 99) == SpotCheck::PASS);
  }
  SUBCASE("cone over a nodal cubic fails at the node") {
    // y^2 z - x^2 (x + z) in P^3 (w free): node along (0,0,1,*)
    auto R = std::make_shared<GradedRing>(GradedRing::standard(4));
    Polynomial Fc(R.get());
    Fc.add_term(F, Expo{0, 2, 1, 0}, 1);
    Fc.add_term(F, Expo{3, 0, 0, 0}, F.neg(1));
    Fc.add_term(F, Expo{2, 0, 1, 0}, F.neg(1));
    auto X = ci_from_forms(F, R, {Fc}, /*validated=*/false, "nodal-cone");
    CHECK(smoothness_at_points(*X, {{0, 0, 1, 0}, {0, 0, 1, 5}}) == SpotCheck::FAIL);
  }
}

TEST_CASE("scroll sheaf cohomology") {
  FieldConfig cfg = test_cfg();
  PrimeField F(cfg.prime);
  SUBCASE("pentagonal g=8 values") {
    ScrollCurveData d;
    d.scroll = std::make_shared<ScrollRing>(std::vector<int>{1, 1, 1, 1});
    d.a = {1, 1, 1, 1, 0};
    d.b = {1, 1, 1, 1, 2};
    d.genus = 8;
    CHECK(scroll_cohomology(d, 0, 1, 0) == 8);  // h0(O(H)) = f + 4 = g
    for (int i = 0; i <= 4; ++i) CHECK(scroll_cohomology(d, i, -2, 0) == 0);
    CHECK(chi_J_3H(d) == 10 * 8 - 35);
  }
  SUBCASE("pentagonal g=9 chi") {
    ScrollCurveData d;
    d.scroll = std::make_shared<ScrollRing>(std::vector<int>{2, 1, 1, 1});
    d.a = {2, 1, 1, 1, 1};
    d.b = {1, 2, 2, 2, 2};
    d.genus = 9;
    CHECK(chi_J_3H(d) == 10 * 9 - 35);
  }
  SUBCASE("chi is additive over the curve-ideal resolution") {
    ScrollCurveData d;
    d.scroll = std::make_shared<ScrollRing>(std::vector<int>{2, 1, 1, 1});
    d.a = {2, 1, 1, 1, 1};
    d.b = {1, 2, 2, 2, 2};
    d.genus = 9;
    const int g = 9, f = 5;
    for (int j = 3; j <= 5; ++j)
      for (int k = 0; k <= 2; ++k) {
        // chi(J(jH+kR)) from the resolution
        int64_t chiJ = 0;
        for (int ai : d.a) chiJ += chi_scroll(d, j - 2, k + ai);
        for (int bi : d.b) chiJ -= chi_scroll(d, j - 3, k + bi);
        chiJ += chi_scroll(d, j - 5, k + f - 2);
        // chi(O_X) - chi(O_C); O_C(jH+kR) has degree j(2g-2)+5k
        int64_t chiC = static_cast<int64_t>(j) * (2 * g - 2) + 5 * k + 1 - g;
        CHECK(chiJ == chi_scroll(d, j, k) - chiC);
      }
  }
}

TEST_CASE("symbolic and points oracles agree") {
  PrimeField F(test_cfg().prime);
  SUBCASE("twisted cubic") {
    auto Xs = veronese(F, 1, 3);
    auto pts = Xs->sample_points(40, 0xabcd);
    auto source = std::make_shared<GradedRing>(GradedRing::standard(4));
    auto model = std::make_shared<PointsModel>(F, pts, 4);
    VarietyMeta meta;
    meta.label = "twisted-cubic-points";
    meta.dim = 1;
    auto Xp = std::make_shared<EmbeddedVariety>(F, source, model, meta);
    for (uint32_t k = 1; k <= 4; ++k) CHECK(Xs->ideal_piece(k) == Xp->ideal_piece(k));
  }
  SUBCASE("G(2,5)") {
    auto Xp = grassmannian_g25(F);
    auto Xs = grassmannian_g25_symbolic(F);
    for (uint32_t k = 1; k <= 4; ++k) CHECK(Xs->ideal_piece(k) == Xp->ideal_piece(k));
  }
}

TEST_CASE("zero-dimensional solving finds rational points") {
  PrimeField F(test_cfg().prime);
  GradedRing S = GradedRing::standard(3, "y");
  // two conics splitting as line pairs: intersection is four rational points
  auto line = [&](int64_t a, int64_t b, int64_t c) {
    Polynomial l(&S);
    l.add_term(F, Expo{1, 0, 0}, F.from_int(a));
    l.add_term(F, Expo{0, 1, 0}, F.from_int(b));
    l.add_term(F, Expo{0, 0, 1}, F.from_int(c));
    return l;
  };
  Polynomial q1 = multiply(F, line(1, 0, 0), line(0, 1, 0));    // x y = 0
  Polynomial q2 = multiply(F, line(1, 1, -1), line(1, -1, 2));  // two transversal lines
  auto pts = zero_dim_points(F, S, {q1, q2}, 17);
  CHECK(pts.size() == 4);
  for (auto& p : pts) {
    CHECK(eval_poly(F, q1, p) == 0);
    CHECK(eval_poly(F, q2, p) == 0);
  }
}

TEST_CASE("variety spec grammar and files") {
  SUBCASE("parse and canonicalize") {
    VarietySpec s = VarietySpec::parse("tetragonal:2,2,1,b=1,2", 42);
    CHECK(s.constructor == "tetragonal");
    CHECK(s.pos == std::vector<int64_t>{2, 2, 1});
    REQUIRE(s.find("b") != nullptr);
    CHECK(*s.find("b") == std::vector<int64_t>{1, 2});
    CHECK(s.canonical() == "tetragonal:2,2,1,b=1,2");
    CHECK(VarietySpec::parse("g25").canonical() == "g25");
    CHECK(VarietySpec::parse("pentagonal:g=8").canonical() == "pentagonal:g=8");
  }
  SUBCASE("file round trip is bit-exact") {
    VarietySpec s = VarietySpec::parse("tetragonal:2,2,1,b=1,2", 42, "my-curve");
    std::string path = (std::filesystem::temp_directory_path() / "vspec_test.txt").string();
    s.write_file(path);
    VarietySpec t = VarietySpec::parse_file(path);
    CHECK(t.label == s.label);
    CHECK(t.canonical() == s.canonical());
    CHECK(t.seed == s.seed);
    // serialize again: identical bytes
    std::string path2 = (std::filesystem::temp_directory_path() / "vspec_test2.txt").string();
    t.write_file(path2);
    std::ifstream f1(path), f2(path2);
    std::string c1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string c2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(c1 == c2);
    std::filesystem::remove(path);
    std::filesystem::remove(path2);
  }
  SUBCASE("fingerprints separate primes") {
    VarietySpec s = VarietySpec::parse("g25");
    CHECK(s.fingerprint(1073741789u) != s.fingerprint(1073741783u));
  }
  SUBCASE("dispatch rejects unknown keys") {
    FieldConfig cfg = test_cfg();
    PrimeField F(cfg.prime);
    CHECK_THROWS(build_variety(VarietySpec::parse("veronese:1,2,q=3"), cfg, F));
  }
}
