#include "conormal/fp.hpp"

namespace conormal {

static uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

static uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 0; i + 1 < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

PrimeField::PrimeField(uint32_t p) : p_(p) {
  if (p <= 1000000u) throw Error("prime must exceed 10^6");
  if (p >= (1u << 31)) throw Error("prime must be < 2^31");
  if (!is_prime_u64(p)) throw Error("modulus " + std::to_string(p) + " is not prime");
  magic_ = static_cast<uint64_t>((static_cast<unsigned __int128>(1) << 64) / p_);
  uint64_t step = static_cast<uint64_t>(p_ - 1) * (p_ - 1);
  batch_ = static_cast<unsigned>((~0ull - (p_ - 1)) / step);
  if (batch_ == 0) batch_ = 1;
}

uint32_t PrimeField::pow(uint32_t a, uint64_t e) const {
  uint64_t r = 1, b = a % p_;
  while (e) {
    if (e & 1) r = r * b % p_;
    b = b * b % p_;
    e >>= 1;
  }
  return static_cast<uint32_t>(r);
}

uint32_t PrimeField::inv(uint32_t a) const {
  if (a == 0) throw Error("inverse of zero");
  return pow(a, p_ - 2);
}

FieldConfig FieldConfig::defaults() {
  FieldConfig c;
  c.prime = 1073741789u;
  c.retry_primes = {1073741783u, 1073741741u, 1073741723u};
  return c;
}

void FieldConfig::validate() const {
  PrimeField check(prime);  // enforces range + primality
  std::vector<uint32_t> seen{prime};
  for (uint32_t q : retry_primes) {
    PrimeField rc(q);
    for (uint32_t s : seen)
      if (s == q) throw Error("retry primes must be pairwise distinct");
    seen.push_back(q);
  }
}

std::vector<uint32_t> FieldConfig::all_primes() const {
  std::vector<uint32_t> v{prime};
  v.insert(v.end(), retry_primes.begin(), retry_primes.end());
  return v;
}

}  // namespace conormal
