#pragma once

#include <cstdint>
#include <vector>

#include "conormal/fp.hpp"
#include "conormal/sketch.hpp"

namespace conormal {

// Dense univariate polynomials over F_p, coefficient i = coefficient of x^i.
using UniPoly = std::vector<uint32_t>;

UniPoly uni_trim(UniPoly a);
UniPoly uni_mul(const PrimeField& F, const UniPoly& a, const UniPoly& b);
UniPoly uni_mod(const PrimeField& F, UniPoly a, const UniPoly& m);
UniPoly uni_gcd(const PrimeField& F, UniPoly a, UniPoly b);
uint32_t uni_eval(const PrimeField& F, const UniPoly& a, uint32_t x);

// x^e mod m
UniPoly uni_powmod_x(const PrimeField& F, uint64_t e, const UniPoly& m);
// (x + shift)^e mod m
UniPoly uni_powmod_linear(const PrimeField& F, uint32_t shift, uint64_t e, const UniPoly& m);

// Distinct roots in F_p (no multiplicities), deterministic given the seed.
std::vector<uint32_t> uni_roots(const PrimeField& F, const UniPoly& a, uint64_t seed);

}  // namespace conormal
