#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "conormal/elim.hpp"
#include "conormal/fp.hpp"
#include "conormal/sketch.hpp"

using namespace conormal;

static Matrix from_rows(uint32_t cols, const std::vector<std::vector<int64_t>>& rows,
                        const PrimeField& F) {
  Matrix m(static_cast<uint32_t>(rows.size()), cols);
  for (uint32_t r = 0; r < rows.size(); ++r)
    for (uint32_t c = 0; c < cols; ++c)
      if (rows[r][c] % F.p() != 0) m.set(r, c, F.from_int(rows[r][c]));
  return m;
}

static Matrix random_matrix(const PrimeField& F, Splitmix& rng, uint32_t rows, uint32_t cols,
                            int density_pct) {
  Matrix m(rows, cols);
  for (uint32_t r = 0; r < rows; ++r)
    for (uint32_t c = 0; c < cols; ++c)
      if (static_cast<int>(rng.below(100)) < density_pct) m.set(r, c, rng.field_nonzero(F));
  return m;
}

TEST_CASE("field arithmetic and config") {
  FieldConfig cfg = FieldConfig::defaults();
  cfg.validate();
  PrimeField F(cfg.prime);
  CHECK(F.p() == 1073741789u);
  CHECK(F.axpy_batch() >= 16u);
  Splitmix rng(7);
  for (int i = 0; i < 200; ++i) {
    uint32_t a = rng.field_nonzero(F);
    CHECK(F.mul(a, F.inv(a)) == 1u);
    uint64_t big = rng.next();
    CHECK(F.reduce(big) == big % F.p());
  }
  CHECK(F.from_int(-1) == F.p() - 1);
  CHECK(is_prime_u64(1073741789ull));
  CHECK_FALSE(is_prime_u64(1073741787ull));
  CHECK_THROWS(PrimeField(997));        // too small
  CHECK_THROWS(PrimeField(1000004u));   // composite
}

TEST_CASE("rref examples") {
  PrimeField F(FieldConfig::defaults().prime);
  SUBCASE("identity") {
    Matrix id(2, 2);
    id.set(0, 0, 1);
    id.set(1, 1, 1);
    Subspace s = rref(F, id);
    CHECK(s.dim() == 2);
    CHECK(s.pivot_cols == std::vector<uint32_t>{0, 1});
  }
  SUBCASE("zero matrix") {
    Matrix z(3, 4);
    Subspace s = rref(F, z);
    CHECK(s.dim() == 0);
    CHECK(s.ambient == 4);
  }
  SUBCASE("hand row-reduction") {
    Matrix m = from_rows(3, {{1, 2, 3}, {2, 4, 6}, {0, 1, 1}}, F);
    Subspace s = rref(F, m);
    CHECK(s.dim() == 2);
    // oracle, by hand: r1=(1,2,3), r2 dependent, r3=(0,1,1); reduce: (1,0,1),(0,1,1)
    Matrix expect = from_rows(3, {{1, 0, 1}, {0, 1, 1}}, F);
    CHECK(s.basis == expect);
  }
}

TEST_CASE("kernel examples") {
  PrimeField F(FieldConfig::defaults().prime);
  SUBCASE("identity has trivial kernel") {
    Matrix id(3, 3);
    for (int i = 0; i < 3; ++i) id.set(i, i, 1);
    CHECK(kernel(F, id).dim() == 0);
  }
  SUBCASE("one row (1,1,1)") {
    Matrix m = from_rows(3, {{1, 1, 1}}, F);
    Subspace k = kernel(F, m);
    CHECK(k.dim() == 2);
    // every kernel vector annihilated
    for (uint32_t r = 0; r < k.dim(); ++r) {
      int64_t sum = 0;
      for (auto& [c, v] : k.basis.row(r)) sum = (sum + v) % F.p();
      CHECK(sum % F.p() == 0);
    }
  }
  SUBCASE("random 50x80 of full row rank") {
    Splitmix rng(11);
    Matrix m = random_matrix(F, rng, 50, 80, 60);
    uint32_t rk = rank_of(F, m);
    CHECK(rk == 50);  // dense random rows are independent
    CHECK(kernel(F, m).dim() == 80 - rk);
  }
}

TEST_CASE("intersect examples") {
  PrimeField F(FieldConfig::defaults().prime);
  Splitmix rng(23);
  SUBCASE("self intersection") {
    Matrix m = random_matrix(F, rng, 4, 9, 50);
    Subspace a = rref(F, m);
    CHECK(intersect(F, a, a) == a);
  }
  SUBCASE("complementary coordinate subspaces") {
    Matrix a(2, 4), b(2, 4);
    a.set(0, 0, 1);
    a.set(1, 1, 1);
    b.set(0, 2, 1);
    b.set(1, 3, 1);
    CHECK(intersect(F, rref(F, a), rref(F, b)).dim() == 0);
  }
  SUBCASE("dimension identity on random subspaces") {
    for (int trial = 0; trial < 5; ++trial) {
      Matrix ma = random_matrix(F, rng, 10, 20, 70);
      Matrix mb = random_matrix(F, rng, 10, 20, 70);
      Subspace a = rref(F, ma), b = rref(F, mb);
      Echelon sum(F, 20);
      for (uint32_t r = 0; r < a.dim(); ++r) sum.add_row(a.basis.row(r));
      for (uint32_t r = 0; r < b.dim(); ++r) sum.add_row(b.basis.row(r));
      Subspace meet = intersect(F, a, b);
      CHECK(meet.dim() == a.dim() + b.dim() - sum.rank());
    }
  }
  SUBCASE("ambient mismatch is an error") {
    Subspace a = rref(F, Matrix(1, 3)), b = rref(F, Matrix(1, 4));
    CHECK_THROWS(intersect(F, a, b));
  }
}

TEST_CASE("contains and solve") {
  PrimeField F(FieldConfig::defaults().prime);
  Splitmix rng(37);
  Matrix m = random_matrix(F, rng, 6, 10, 50);
  Subspace s = rref(F, m);
  CHECK(contains(F, s, SparseVec{}));  // zero vector
  SUBCASE("solve against identity") {
    Matrix id(5, 5);
    for (int i = 0; i < 5; ++i) id.set(i, i, 1);
    Matrix t = random_matrix(F, rng, 5, 3, 80);
    auto x = solve(F, id, t);
    REQUIRE(x.has_value());
    CHECK(*x == t);
  }
  SUBCASE("random consistent system has exactly-zero residual") {
    Matrix a = random_matrix(F, rng, 12, 7, 60);
    Matrix xs = random_matrix(F, rng, 7, 2, 80);
    // t = a * xs
    Matrix t(12, 2);
    for (uint32_t r = 0; r < 12; ++r)
      for (uint32_t c = 0; c < 2; ++c) {
        uint64_t acc = 0;
        for (auto& [k, v] : a.row(r)) acc += static_cast<uint64_t>(v) * xs.get(k, c);
        t.set(r, c, F.reduce(acc));
      }
    auto x = solve(F, a, t);
    REQUIRE(x.has_value());
    for (uint32_t r = 0; r < 12; ++r)
      for (uint32_t c = 0; c < 2; ++c) {
        uint64_t acc = 0;
        for (auto& [k, v] : a.row(r)) acc += static_cast<uint64_t>(v) * x->get(k, c);
        CHECK(F.reduce(acc) == t.get(r, c));
      }
  }
  SUBCASE("inconsistent system reports none") {
    Matrix a(2, 2);
    a.set(0, 0, 1);
    a.set(1, 0, 1);  // rank 1, rows equal
    Matrix t(2, 1);
    t.set(0, 0, 1);
    t.set(1, 0, 2);
    CHECK_FALSE(solve(F, a, t).has_value());
  }
}

TEST_CASE("rank equals rank of transpose") {
  PrimeField F(FieldConfig::defaults().prime);
  Splitmix rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    uint32_t r = 1 + static_cast<uint32_t>(rng.below(40));
    uint32_t c = 1 + static_cast<uint32_t>(rng.below(40));
    Matrix m = random_matrix(F, rng, r, c, 1 + static_cast<int>(rng.below(70)));
    CHECK(rank_of(F, m) == rank_of(F, m.transpose()));
  }
}

TEST_CASE("kernel/image dimension identity on 200 random matrices") {
  PrimeField F(FieldConfig::defaults().prime);
  Splitmix rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    uint32_t r = 1 + static_cast<uint32_t>(rng.below(trial % 10 == 0 ? 300 : 60));
    uint32_t c = 1 + static_cast<uint32_t>(rng.below(trial % 10 == 0 ? 300 : 60));
    int dens = 1 + static_cast<int>(rng.below(40));
    Matrix m = random_matrix(F, rng, r, c, dens);
    uint32_t rk = rank_of(F, m);
    Subspace k = kernel(F, m);
    CHECK(k.dim() + rk == c);
    // kernel vectors annihilate the matrix
    if (k.dim() > 0) {
      const SparseVec& v = k.basis.row(0);
      for (uint32_t i = 0; i < r; ++i) {
        uint32_t acc = 0;
        for (auto& [col, x] : m.row(i)) {
          uint32_t kv = 0;
          for (auto& [kc, kx] : v)
            if (kc == col) kv = kx;
          acc = F.add(acc, F.mul(x, kv));
        }
        CHECK(acc == 0);
      }
    }
  }
}

TEST_CASE("subspace canonicality under shuffles") {
  PrimeField F(FieldConfig::defaults().prime);
  Splitmix rng(97);
  Matrix base = random_matrix(F, rng, 8, 15, 40);
  Subspace ref = rref(F, base);
  for (int trial = 0; trial < 10; ++trial) {
    // random invertible recombination + shuffle of generators
    std::vector<SparseVec> rows;
    for (uint32_t r = 0; r < 8; ++r) rows.push_back(base.row(r));
    for (int mix = 0; mix < 30; ++mix) {
      uint32_t i = static_cast<uint32_t>(rng.below(8)), j = static_cast<uint32_t>(rng.below(8));
      if (i == j) continue;
      uint32_t c = rng.field_nonzero(F);
      // rows[i] += c*rows[j]
      std::vector<uint32_t> d = to_dense(rows[i], 15);
      for (auto& [col, v] : rows[j]) d[col] = F.add(d[col], F.mul(c, v));
      rows[i] = to_sparse(d);
    }
    std::vector<uint32_t> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    for (uint32_t k = 7; k > 0; --k) std::swap(perm[k], perm[rng.below(k + 1)]);
    std::vector<SparseVec> shuffled;
    for (uint32_t k = 0; k < 8; ++k) shuffled.push_back(rows[perm[k]]);
    Subspace s = rref_rows(F, 15, shuffled);
    CHECK(s == ref);
  }
}

TEST_CASE("row sketch rank is a lower bound that meets known ranks") {
  PrimeField F(FieldConfig::defaults().prime);
  Splitmix rng(113);
  // random 40-dim row space in F^100 fed through a 48-row sketch
  Matrix m = random_matrix(F, rng, 40, 100, 30);
  uint32_t true_rank = rank_of(F, m);
  RowSketch sk(F, 100, true_rank + 8, 424242);
  for (uint32_t r = 0; r < m.n_rows(); ++r) sk.absorb(m.row(r));
  CHECK(sk.rank() == true_rank);
}
