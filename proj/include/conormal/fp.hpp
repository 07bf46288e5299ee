#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace conormal {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// saturation chain hit the multiplier cap without stabilizing
struct UnstableError : Error {
  using Error::Error;
};

bool is_prime_u64(uint64_t n);

// Arithmetic context for F_p. Requires 10^6 < p < 2^31 (prime); the upper
// bound keeps a*b below 2^62 so elimination can batch unreduced axpys in
// 64-bit accumulators.
class PrimeField {
 public:
  explicit PrimeField(uint32_t p);

  uint32_t p() const { return p_; }

  uint32_t add(uint32_t a, uint32_t b) const {
    uint32_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  uint32_t sub(uint32_t a, uint32_t b) const { return a >= b ? a - b : a + p_ - b; }
  uint32_t neg(uint32_t a) const { return a == 0 ? 0 : p_ - a; }

  // Barrett reduction of any 64-bit value.
  uint32_t reduce(uint64_t x) const {
    uint64_t q = static_cast<uint64_t>((static_cast<unsigned __int128>(x) * magic_) >> 64);
    uint64_t r = x - q * p_;
    while (r >= p_) r -= p_;
    return static_cast<uint32_t>(r);
  }
  uint32_t mul(uint32_t a, uint32_t b) const {
    return reduce(static_cast<uint64_t>(a) * b);
  }
  uint32_t from_int(int64_t v) const {
    int64_t r = v % static_cast<int64_t>(p_);
    if (r < 0) r += p_;
    return static_cast<uint32_t>(r);
  }
  uint32_t pow(uint32_t a, uint64_t e) const;
  uint32_t inv(uint32_t a) const;

  // Max number of (p-1)^2 additions a 64-bit accumulator holding a value
  // < p can take before overflow.
  unsigned axpy_batch() const { return batch_; }

 private:
  uint32_t p_;
  uint64_t magic_;
  unsigned batch_;
};

// Prime configuration: working prime plus the retry list used to confirm
// nonzero dimensions and to re-run flagged instances.
struct FieldConfig {
  uint32_t prime = 0;
  std::vector<uint32_t> retry_primes;

  static FieldConfig defaults();
  void validate() const;
  // prime followed by retry_primes
  std::vector<uint32_t> all_primes() const;
};

}  // namespace conormal
