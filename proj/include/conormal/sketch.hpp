#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conormal/elim.hpp"

namespace conormal {

// splitmix64; the engine's only randomness source, always explicitly seeded.
struct Splitmix {
  uint64_t state;
  explicit Splitmix(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  uint64_t below(uint64_t n) { return next() % n; }
  // integer in [0, 10^6): instance data that reduces consistently mod every
  // configured prime
  uint32_t instance_int() { return static_cast<uint32_t>(below(1000000ull)); }
  uint32_t field_elt(const PrimeField& F) { return static_cast<uint32_t>(below(F.p())); }
  uint32_t field_nonzero(const PrimeField& F) {
    return 1 + static_cast<uint32_t>(below(F.p() - 1));
  }
};

uint64_t fnv1a(const void* data, size_t n, uint64_t h = 14695981039346656037ull);
uint64_t fnv1a_str(const std::string& s, uint64_t h = 14695981039346656037ull);
uint64_t fnv1a_u64(uint64_t x, uint64_t h);

// Random row compression: absorbed rows are scattered into `n_rows`
// accumulator rows with random coefficients. Row span of the sketch is
// contained in the span of the absorbed rows, so rank(sketch) is an exact
// lower bound for the absorbed rank.
class RowSketch {
 public:
  RowSketch(const PrimeField& F, uint32_t width, uint32_t n_rows, uint64_t seed,
            unsigned scatter = 3);
  void absorb(const SparseVec& row);
  void absorb_dense(const std::vector<uint32_t>& row);
  uint32_t n_rows() const { return static_cast<uint32_t>(rows_.size()); }
  const std::vector<uint32_t>& row(uint32_t i) const { return rows_[i]; }
  // rank of the sketch rows
  uint32_t rank() const;

 private:
  const PrimeField& F_;
  uint32_t width_;
  unsigned scatter_;
  std::vector<std::vector<uint32_t>> rows_;
  mutable Splitmix rng_;
};

// Sparse random column compressor F^width -> F^target (each source column
// feeds `scatter` target columns). Preserves rank lower bounds.
class ColSketch {
 public:
  ColSketch(const PrimeField& F, uint32_t width, uint32_t target, uint64_t seed,
            unsigned scatter = 2);
  uint32_t target() const { return target_; }
  SparseVec apply(const SparseVec& row) const;

 private:
  const PrimeField& F_;
  uint32_t target_;
  // per source column: (target col, coeff) pairs
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> map_;
};

}  // namespace conormal
