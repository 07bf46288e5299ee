#include "conormal/univariate.hpp"

#include <algorithm>

namespace conormal {

UniPoly uni_trim(UniPoly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

UniPoly uni_mul(const PrimeField& F, const UniPoly& a, const UniPoly& b) {
  if (a.empty() || b.empty()) return {};
  UniPoly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (size_t j = 0; j < b.size(); ++j)
      if (b[j]) c[i + j] = F.add(c[i + j], F.mul(a[i], b[j]));
  }
  return uni_trim(std::move(c));
}

UniPoly uni_mod(const PrimeField& F, UniPoly a, const UniPoly& m) {
  a = uni_trim(std::move(a));
  if (m.empty()) throw Error("uni_mod by zero");
  uint32_t lead_inv = F.inv(m.back());
  while (a.size() >= m.size()) {
    uint32_t c = F.mul(a.back(), lead_inv);
    size_t off = a.size() - m.size();
    if (c)
      for (size_t i = 0; i < m.size(); ++i) a[off + i] = F.sub(a[off + i], F.mul(c, m[i]));
    a.pop_back();
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  return a;
}

UniPoly uni_gcd(const PrimeField& F, UniPoly a, UniPoly b) {
  a = uni_trim(std::move(a));
  b = uni_trim(std::move(b));
  while (!b.empty()) {
    UniPoly r = uni_mod(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    uint32_t inv = F.inv(a.back());
    for (auto& c : a) c = F.mul(c, inv);
  }
  return a;
}

uint32_t uni_eval(const PrimeField& F, const UniPoly& a, uint32_t x) {
  uint32_t r = 0;
  for (size_t i = a.size(); i-- > 0;) r = F.add(F.mul(r, x), a[i]);
  return r;
}

UniPoly uni_powmod_linear(const PrimeField& F, uint32_t shift, uint64_t e, const UniPoly& m) {
  UniPoly base = uni_mod(F, UniPoly{shift, 1}, m);
  UniPoly r{1};
  while (e) {
    if (e & 1) r = uni_mod(F, uni_mul(F, r, base), m);
    base = uni_mod(F, uni_mul(F, base, base), m);
    e >>= 1;
  }
  return r;
}

UniPoly uni_powmod_x(const PrimeField& F, uint64_t e, const UniPoly& m) {
  return uni_powmod_linear(F, 0, e, m);
}

// Cantor-Zassenhaus split of a squarefree product of linears.
static void split_linear(const PrimeField& F, const UniPoly& f, Splitmix& rng,
                         std::vector<uint32_t>& out) {
  if (f.size() <= 1) return;
  if (f.size() == 2) {
    // ax + b = 0
    out.push_back(F.neg(F.mul(f[0], F.inv(f[1]))));
    return;
  }
  while (true) {
    uint32_t shift = rng.field_elt(F);
    UniPoly h = uni_powmod_linear(F, shift, (F.p() - 1) / 2, f);
    if (h.empty())
      h = UniPoly{F.p() - 1};
    else
      h[0] = F.sub(h[0], 1);  // h = (x+shift)^((p-1)/2) - 1
    UniPoly g = uni_gcd(F, h, f);
    if (g.size() > 1 && g.size() < f.size()) {
      // f = g * (f/g); recurse on both
      split_linear(F, g, rng, out);
      // compute f/g by division
      UniPoly q;
      UniPoly rem = f;
      uint32_t lead_inv = F.inv(g.back());
      q.assign(f.size() - g.size() + 1, 0);
      while (rem.size() >= g.size()) {
        uint32_t c = F.mul(rem.back(), lead_inv);
        size_t off = rem.size() - g.size();
        q[off] = c;
        for (size_t i = 0; i < g.size(); ++i) rem[off + i] = F.sub(rem[off + i], F.mul(c, g[i]));
        while (!rem.empty() && rem.back() == 0) rem.pop_back();
      }
      split_linear(F, uni_trim(std::move(q)), rng, out);
      return;
    }
  }
}

std::vector<uint32_t> uni_roots(const PrimeField& F, const UniPoly& a, uint64_t seed) {
  UniPoly f = uni_trim(a);
  std::vector<uint32_t> out;
  if (f.size() <= 1) return out;  // constant (or zero: caller's business)
  // product of distinct linear factors: gcd(x^p - x, f)
  UniPoly xp = uni_powmod_x(F, F.p(), f);
  // xp - x
  UniPoly xpx = xp;
  if (xpx.size() < 2) xpx.resize(2, 0);
  xpx[1] = F.sub(xpx[1], 1);
  UniPoly lin = uni_gcd(F, uni_trim(std::move(xpx)), f);
  Splitmix rng(seed);
  split_linear(F, lin, rng, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace conormal
