#include "conormal/ring.hpp"

#include <algorithm>

namespace conormal {

GradedRing::GradedRing(std::vector<VarDecl> vars, uint32_t grading_rank)
    : vars_(std::move(vars)), rank_(grading_rank) {
  for (auto& v : vars_)
    if (v.deg.size() != rank_) throw Error("variable multidegree length != grading rank");
}

GradedRing GradedRing::standard(uint32_t n_vars, const std::string& prefix) {
  std::vector<VarDecl> vs;
  for (uint32_t i = 0; i < n_vars; ++i) vs.push_back({prefix + std::to_string(i), {1}});
  return GradedRing(std::move(vs), 1);
}

GradedRing GradedRing::bigraded(uint32_t nx, uint32_t ny) {
  std::vector<VarDecl> vs;
  for (uint32_t i = 0; i < nx; ++i) vs.push_back({"x" + std::to_string(i), {1, 0}});
  for (uint32_t i = 0; i < ny; ++i) vs.push_back({"y" + std::to_string(i), {0, 1}});
  return GradedRing(std::move(vs), 2);
}

Multideg GradedRing::monomial_degree(const Expo& e) const {
  Multideg d(rank_, 0);
  for (uint32_t i = 0; i < e.size(); ++i)
    for (uint32_t c = 0; c < rank_; ++c) d[c] += e[i] * vars_[i].deg[c];
  return d;
}

// Recursive enumeration, largest exponent of the earliest variable first, so
// the listing is descending lex on exponent vectors.
void GradedRing::enumerate(Multideg rem, uint32_t from, Expo& cur, std::vector<Expo>& out) const {
  if (from == vars_.size()) {
    for (int32_t r : rem)
      if (r != 0) return;
    out.push_back(cur);
    return;
  }
  const Multideg& vd = vars_[from].deg;
  // Exponent bound from the first grading component this variable increases.
  int32_t emax = -1;
  for (uint32_t c = 0; c < rank_; ++c) {
    if (vd[c] > 0) {
      // remaining variables can only keep this component >= 0 if they have
      // non-negative entries there; use rem[c]/vd[c] as the bound
      int32_t cap = rem[c] >= 0 ? rem[c] / vd[c] : 0;
      emax = emax < 0 ? cap : std::min(emax, cap);
    }
  }
  if (emax < 0) throw Error("degree enumeration: variable with no positive degree component");
  for (int32_t e = emax; e >= 0; --e) {
    Multideg r2 = rem;
    for (uint32_t c = 0; c < rank_; ++c) r2[c] -= e * vd[c];
    bool feasible = true;
    // prune: components that no later variable can raise must be exactly 0
    for (uint32_t c = 0; c < rank_; ++c) {
      bool later_up = false, later_down = false;
      for (uint32_t j = from + 1; j < vars_.size(); ++j) {
        if (vars_[j].deg[c] > 0) later_up = true;
        if (vars_[j].deg[c] < 0) later_down = true;
      }
      if (r2[c] > 0 && !later_up) feasible = false;
      if (r2[c] < 0 && !later_down) feasible = false;
    }
    if (!feasible) continue;
    cur[from] = e;
    enumerate(r2, from + 1, cur, out);
    cur[from] = 0;
  }
}

const GradedRing::DegData& GradedRing::deg_data(const Multideg& d) const {
  std::lock_guard<std::mutex> lk(*mu_);
  auto it = cache_.find(d);
  if (it != cache_.end()) return it->second;
  DegData dd;
  Expo cur(vars_.size(), 0);
  enumerate(d, 0, cur, dd.monomials);
  for (uint32_t i = 0; i < dd.monomials.size(); ++i) dd.index[dd.monomials[i]] = i;
  return cache_.emplace(d, std::move(dd)).first->second;
}

const std::vector<Expo>& GradedRing::degree_basis(const Multideg& d) const {
  return deg_data(d).monomials;
}

int64_t GradedRing::monomial_index(const Multideg& d, const Expo& e) const {
  const DegData& dd = deg_data(d);
  auto it = dd.index.find(e);
  return it == dd.index.end() ? -1 : static_cast<int64_t>(it->second);
}

std::string GradedRing::monomial_str(const Expo& e) const {
  std::string s;
  for (uint32_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += vars_[i].name;
    if (e[i] != 1) s += "^" + std::to_string(e[i]);
  }
  return s.empty() ? "1" : s;
}

void Polynomial::add_term(const PrimeField& F, const Expo& e, uint32_t c) {
  if (c == 0) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
  } else {
    it->second = F.add(it->second, c);
    if (it->second == 0) terms_.erase(it);
  }
}

Multideg Polynomial::degree() const {
  if (terms_.empty()) throw Error("degree of zero polynomial");
  Multideg d = ring_->monomial_degree(terms_.begin()->first);
  for (auto& [e, c] : terms_)
    if (ring_->monomial_degree(e) != d) throw Error("polynomial is not homogeneous");
  return d;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (auto& [e, c] : terms_) {
    if (!s.empty()) s += " + ";
    if (c != 1) s += std::to_string(c) + "*";
    s += ring_->monomial_str(e);
  }
  return s;
}

Polynomial monomial(const GradedRing& R, Expo e, uint32_t c) {
  Polynomial p(&R);
  if (c) p.set_term(std::move(e), c);
  return p;
}

Polynomial add(const PrimeField& F, const Polynomial& p, const Polynomial& q) {
  if (p.ring() != q.ring()) throw Error("ring mismatch");
  Polynomial r = p;
  for (auto& [e, c] : q.terms()) r.add_term(F, e, c);
  return r;
}

Polynomial scale(const PrimeField& F, const Polynomial& p, uint32_t c) {
  Polynomial r(p.ring());
  if (c == 0) return r;
  for (auto& [e, x] : p.terms()) r.add_term(F, e, F.mul(x, c));
  return r;
}

Polynomial multiply(const PrimeField& F, const Polynomial& p, const Polynomial& q) {
  if (p.ring() != q.ring()) throw Error("ring mismatch");
  Polynomial r(p.ring());
  Expo e(p.ring()->n_vars());
  for (auto& [ep, cp] : p.terms())
    for (auto& [eq, cq] : q.terms()) {
      for (uint32_t i = 0; i < e.size(); ++i) e[i] = ep[i] + eq[i];
      r.add_term(F, e, F.mul(cp, cq));
    }
  return r;
}

Polynomial partial_derivative(const PrimeField& F, const Polynomial& p, uint32_t var) {
  Polynomial r(p.ring());
  for (auto& [e, c] : p.terms()) {
    if (e[var] == 0) continue;
    Expo d = e;
    d[var] -= 1;
    r.add_term(F, d, F.mul(c, static_cast<uint32_t>(e[var] % F.p())));
  }
  return r;
}

SparseVec poly_coords(const GradedRing& R, const Multideg& d, const Polynomial& p) {
  SparseVec v;
  for (auto& [e, c] : p.terms()) {
    int64_t idx = R.monomial_index(d, e);
    if (idx < 0) throw Error("monomial outside degree piece");
    v.emplace_back(static_cast<uint32_t>(idx), c);
  }
  std::sort(v.begin(), v.end());
  return v;
}

Polynomial coords_poly(const GradedRing& R, const Multideg& d, const SparseVec& v) {
  Polynomial p(&R);
  const auto& mons = R.degree_basis(d);
  for (auto& [i, c] : v) p.set_term(mons[i], c);
  return p;
}

uint32_t eval_poly(const PrimeField& F, const Polynomial& p, const std::vector<uint32_t>& point) {
  uint64_t total = 0;
  for (auto& [e, c] : p.terms()) {
    uint32_t m = c;
    for (uint32_t i = 0; i < e.size(); ++i)
      for (int32_t k = 0; k < e[i]; ++k) m = F.mul(m, point[i]);
    total += m;
    if (total >= (1ull << 62)) total = F.reduce(total);
  }
  return F.reduce(total);
}

H01 p1_cohomology(const std::vector<int64_t>& twists) {
  H01 h;
  for (int64_t m : twists) {
    if (m >= 0) h.h0 += m + 1;
    if (m <= -2) h.h1 += -m - 1;
  }
  return h;
}

std::vector<int64_t> sym_twists(const std::vector<int>& e, int a, int b) {
  std::vector<int64_t> out;
  if (a < 0) return out;
  std::vector<int> alpha(e.size(), 0);
  // enumerate compositions of a into |e| parts
  auto rec = [&](auto&& self, uint32_t i, int rem) -> void {
    if (i + 1 == e.size()) {
      int64_t w = b;
      alpha[i] = rem;
      for (uint32_t j = 0; j < e.size(); ++j) w += static_cast<int64_t>(alpha[j]) * e[j];
      out.push_back(w);
      alpha[i] = 0;
      return;
    }
    for (int v = rem; v >= 0; --v) {
      alpha[i] = v;
      self(self, i + 1, rem - v);
      alpha[i] = 0;
    }
  };
  if (e.empty()) throw Error("empty scroll type");
  rec(rec, 0, a);
  return out;
}

ScrollRing::ScrollRing(std::vector<int> e_in) : e(std::move(e_in)) {
  if (e.empty()) throw Error("scroll needs at least one invariant");
  for (size_t i = 0; i + 1 < e.size(); ++i)
    if (e[i] < e[i + 1]) throw Error("scroll invariants must be non-increasing");
  for (int ei : e) {
    if (ei <= 0) throw Error("scroll invariants must be positive");
    f += ei;
  }
  std::vector<VarDecl> vs;
  for (uint32_t i = 0; i < e.size(); ++i)
    vs.push_back({"y" + std::to_string(i + 1), {1, -e[i]}});
  vs.push_back({"t0", {0, 1}});
  vs.push_back({"t1", {0, 1}});
  ring = std::make_shared<GradedRing>(std::move(vs), 2);
}

}  // namespace conormal
