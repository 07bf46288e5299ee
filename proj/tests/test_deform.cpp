#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "conormal/deform.hpp"

using namespace conormal;

static FieldConfig test_cfg() {
  FieldConfig cfg = FieldConfig::defaults();
  cfg.retry_primes = {1073741783u};
  return cfg;
}

static PrimeField& F() {
  static PrimeField field(FieldConfig::defaults().prime);
  return field;
}

// exact identity f1 r + f r1 = 0
static bool first_order_identity(const PrimeField& Fp, const DeformationState& st) {
  const Presentation& pr = *st.pres;
  for (uint32_t j = 0; j < pr.ell; ++j) {
    Polynomial acc(st.f1[0].ring());
    for (uint32_t i = 0; i < pr.k; ++i) {
      acc = add(Fp, acc, multiply(Fp, st.f1[i], pr.r[i][j]));
      if (st.r1[i][j]) acc = add(Fp, acc, scale(Fp, pr.f[i], st.r1[i][j]));
    }
    if (!acc.is_zero()) return false;
  }
  return true;
}

static bool second_order_identity(const PrimeField& Fp, const DeformationState& st) {
  const Presentation& pr = *st.pres;
  for (uint32_t j = 0; j < pr.ell; ++j) {
    Polynomial acc(st.f1[0].ring());
    for (uint32_t i = 0; i < pr.k; ++i) {
      if (st.r1[i][j]) acc = add(Fp, acc, scale(Fp, st.f1[i], st.r1[i][j]));
      if (st.f2[i]) acc = add(Fp, acc, scale(Fp, pr.r[i][j], st.f2[i]));
    }
    if (!acc.is_zero()) return false;
  }
  return true;
}

TEST_CASE("presentations") {
  FieldConfig cfg = test_cfg();
  SUBCASE("twisted cubic: three quadrics, two linear syzygies") {
    auto X = veronese(F(), 1, 3);
    ConormalEngine eng(X);
    DeformEngine de(eng);
    const Presentation& pr = de.presentation();
    CHECK(pr.k == 3);
    CHECK(pr.ell == 2);
  }
  SUBCASE("genus-4 canonical is rejected (cubic generator)") {
    auto X = complete_intersection(cfg, F(), 3, {2, 3}, 7);
    ConormalEngine eng(X);
    DeformEngine de(eng);
    CHECK_THROWS_WITH_AS(de.presentation(), doctest::Contains("REJECT"), Error);
  }
}

TEST_CASE("trivial first-order space") {
  auto X = veronese(F(), 1, 3);
  ConormalEngine eng(X);
  DeformEngine de(eng);
  de.presentation();
  Subspace T = de.trivial_first_order();
  CHECK(T.dim() <= X->n_vars());
  CHECK(T.dim() == 4);  // no constant derivation kills all three quadrics
}

TEST_CASE("first-order deformations of the twisted cubic cone") {
  auto X = veronese(F(), 1, 3);
  ConormalEngine eng(X);
  DeformEngine de(eng);
  de.presentation();
  auto states = de.first_order_space();
  CHECK(!states.empty());
  for (auto& st : states) {
    CHECK(first_order_identity(F(), st));
    DeformationState lifted = de.second_order_lift(st);
    CHECK(lifted.status == LiftStatus::TERMINATED);
    CHECK(second_order_identity(F(), lifted));
    FlatnessReport rep = de.flatness_check(lifted, 4);
    CHECK(rep.pass);
    CHECK(rep.fiber_matches_ideal);
  }
}

TEST_CASE("trivial extension is the flat cone") {
  auto X = veronese(F(), 1, 3);
  ConormalEngine eng(X);
  DeformEngine de(eng);
  const Presentation& pr = de.presentation();
  DeformationState st;
  st.pres = &pr;
  st.f1.assign(pr.k, Polynomial(&X->P()));
  st.r1.assign(pr.k, std::vector<uint32_t>(pr.ell, 0));
  st.f2.assign(pr.k, 0);
  st.status = LiftStatus::TERMINATED;
  FlatnessReport rep = de.flatness_check(st, 4);
  CHECK(rep.pass);
}

TEST_CASE("corrupted second-order data fails flatness at degree 3") {
  auto X = veronese(F(), 1, 3);
  ConormalEngine eng(X);
  DeformEngine de(eng);
  auto states = de.first_order_space();
  REQUIRE(!states.empty());
  DeformationState bad = de.second_order_lift(states[0]);
  REQUIRE(bad.status == LiftStatus::TERMINATED);
  bad.f2 = {12345, 67890, 13579};
  FlatnessReport rep = de.flatness_check(bad, 3);
  CHECK_FALSE(rep.pass);
  CHECK(rep.failed_degree == 3);
}

TEST_CASE("random quadric complete intersections always lift") {
  FieldConfig cfg = test_cfg();
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    auto X = complete_intersection(cfg, F(), 3, {2, 2}, seed);
    ConormalEngine eng(X);
    DeformEngine de(eng);
    const Presentation& pr = de.presentation(/*unvalidated=*/true);
    CHECK(pr.ell == 0);  // general quadric pairs have no linear syzygies
    auto states = de.first_order_space();
    CHECK(states.size() == 2u * 4 - 4);
    for (auto& st : states) {
      DeformationState lifted = de.second_order_lift(st);
      CHECK(lifted.status == LiftStatus::TERMINATED);
      FlatnessReport rep = de.flatness_check(lifted, 3);
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("plane curve extension (Example 7.3 shape)") {
  FieldConfig cfg = test_cfg();
  PlaneExtension ext = plane_curve_extension(cfg, F(), 7, 11);
  CHECK(ext.n_basis == 16);  // g + 1
  CHECK(ext.section_deg2_matches);
  CHECK(ext.section_deg3_matches);
  CHECK(ext.distinct_from_cone);
}

TEST_CASE("five-point presentation has the Pfaffian shape") {
  FieldConfig cfg = test_cfg();
  auto X = gorenstein_points5(cfg, F(), 13);
  ConormalEngine eng(X);
  DeformEngine de(eng);
  const Presentation& pr = de.presentation();
  CHECK(pr.k == 5);
  CHECK(pr.ell == 5);
}

TEST_CASE("deliberately chosen first-order data may fail to lift") {
  // tetragonal genus 8 has h1(I^2(3)) = 1; run the pipeline unvalidated
  // (its syzygies are not generated by linear ones) and record the measured
  // outcome of each constant-coefficient solve
  FieldConfig cfg = test_cfg();
  PrimeField Fp(cfg.prime);
  auto X = tetragonal_curve(cfg, Fp, {2, 2, 1}, 1, 2, 3);
  ConormalEngine eng(X);
  eng.set_config(cfg);
  DeformEngine de(eng);
  de.presentation(/*unvalidated=*/true);
  auto states = de.first_order_space();
  REQUIRE(!states.empty());
  int no_lift = 0, terminated = 0, second_only = 0;
  for (auto& st : states) {
    DeformationState lifted = de.second_order_lift(st);
    switch (lifted.status) {
      case LiftStatus::NO_LIFT:
        ++no_lift;
        break;
      case LiftStatus::TERMINATED:
        ++terminated;
        break;
      default:
        ++second_only;
        break;
    }
  }
  // every status is a legitimate measured outcome; the path must not crash
  CHECK(no_lift + terminated + second_only == static_cast<int>(states.size()));
  MESSAGE("tetragonal unvalidated lifts: ", terminated, " terminated, ", no_lift, " obstructed, ",
          second_only, " second-order only");
}
