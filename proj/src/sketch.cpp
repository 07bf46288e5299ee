#include "conormal/sketch.hpp"

#include <algorithm>

namespace conormal {

uint64_t fnv1a(const void* data, size_t n, uint64_t h) {
  const unsigned char* b = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= b[i];
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t fnv1a_str(const std::string& s, uint64_t h) { return fnv1a(s.data(), s.size(), h); }

uint64_t fnv1a_u64(uint64_t x, uint64_t h) { return fnv1a(&x, sizeof(x), h); }

RowSketch::RowSketch(const PrimeField& F, uint32_t width, uint32_t n_rows, uint64_t seed,
                     unsigned scatter)
    : F_(F), width_(width), scatter_(scatter), rng_(seed) {
  rows_.assign(n_rows, std::vector<uint32_t>(width, 0));
}

void RowSketch::absorb(const SparseVec& row) {
  for (unsigned s = 0; s < scatter_; ++s) {
    uint32_t t = static_cast<uint32_t>(rng_.below(rows_.size()));
    uint32_t c = rng_.field_nonzero(F_);
    auto& dst = rows_[t];
    for (auto& [col, v] : row) dst[col] = F_.add(dst[col], F_.mul(c, v));
  }
}

void RowSketch::absorb_dense(const std::vector<uint32_t>& row) {
  for (unsigned s = 0; s < scatter_; ++s) {
    uint32_t t = static_cast<uint32_t>(rng_.below(rows_.size()));
    uint64_t c = rng_.field_nonzero(F_);
    auto& dst = rows_[t];
    for (uint32_t col = 0; col < width_; ++col)
      if (row[col]) dst[col] = F_.reduce(dst[col] + c * row[col]);
  }
}

uint32_t RowSketch::rank() const {
  Echelon e(F_, width_);
  for (auto& r : rows_) e.add_dense(r);
  return e.rank();
}

ColSketch::ColSketch(const PrimeField& F, uint32_t width, uint32_t target, uint64_t seed,
                     unsigned scatter)
    : F_(F), target_(target), map_(width) {
  Splitmix rng(seed);
  for (uint32_t c = 0; c < width; ++c)
    for (unsigned s = 0; s < scatter; ++s)
      map_[c].emplace_back(static_cast<uint32_t>(rng.below(target)), rng.field_nonzero(F));
}

SparseVec ColSketch::apply(const SparseVec& row) const {
  std::vector<uint32_t> acc(target_, 0);
  for (auto& [c, v] : row)
    for (auto& [t, w] : map_[c]) acc[t] = F_.add(acc[t], F_.mul(w, v));
  return to_sparse(acc);
}

}  // namespace conormal
