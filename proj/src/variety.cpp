#include "conormal/variety.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "conormal/univariate.hpp"

namespace conormal {

int64_t binom(int64_t n, int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  int64_t r = 1;
  for (int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ---------------------------------------------------------------------------
// VarietySpec

VarietySpec VarietySpec::parse(const std::string& s, uint64_t seed, std::string label) {
  VarietySpec spec;
  spec.seed = seed;
  auto colon = s.find(':');
  spec.constructor = s.substr(0, colon);
  if (spec.constructor.empty()) throw Error("variety spec: empty constructor");
  if (colon != std::string::npos) {
    std::string rest = s.substr(colon + 1);
    std::string tok;
    std::stringstream ss(rest);
    bool in_kv = false;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) throw Error("variety spec: empty token in '" + s + "'");
      auto eq = tok.find('=');
      if (eq != std::string::npos) {
        spec.kv.emplace_back(tok.substr(0, eq), std::vector<int64_t>{std::stoll(tok.substr(eq + 1))});
        in_kv = true;
      } else if (in_kv) {
        spec.kv.back().second.push_back(std::stoll(tok));
      } else {
        spec.pos.push_back(std::stoll(tok));
      }
    }
  }
  spec.label = label.empty() ? spec.canonical() : std::move(label);
  return spec;
}

std::string VarietySpec::params_string() const {
  std::string out;
  bool first = true;
  for (int64_t v : pos) {
    if (!first) out += ",";
    out += std::to_string(v);
    first = false;
  }
  for (auto& [k, vals] : kv) {
    for (size_t i = 0; i < vals.size(); ++i) {
      if (!first) out += ",";
      out += (i == 0 ? k + "=" : "") + std::to_string(vals[i]);
      first = false;
    }
  }
  return out;
}

std::string VarietySpec::canonical() const {
  std::string p = params_string();
  return p.empty() ? constructor : constructor + ":" + p;
}

const std::vector<int64_t>* VarietySpec::find(const std::string& key) const {
  for (auto& [k, v] : kv)
    if (k == key) return &v;
  return nullptr;
}

VarietySpec VarietySpec::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open variety spec file " + path);
  std::string line, label, ctor, params, seed_s;
  auto field = [&](const std::string& l, const std::string& key) -> std::optional<std::string> {
    std::string prefix = key + " = ";
    if (l.rfind(prefix, 0) == 0) return l.substr(prefix.size());
    return std::nullopt;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (auto v = field(line, "label"))
      label = *v;
    else if (auto v = field(line, "constructor"))
      ctor = *v;
    else if (auto v = field(line, "params"))
      params = *v;
    else if (auto v = field(line, "seed"))
      seed_s = *v;
    else
      throw Error("variety spec file: unknown line '" + line + "'");
  }
  if (ctor.empty()) throw Error("variety spec file: missing constructor");
  std::string grammar = params.empty() ? ctor : ctor + ":" + params;
  return parse(grammar, seed_s.empty() ? 0 : std::stoull(seed_s), label);
}

void VarietySpec::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write variety spec file " + path);
  out << "label = " << label << "\n";
  out << "constructor = " << constructor << "\n";
  out << "params = " << params_string() << "\n";
  out << "seed = " << seed << "\n";
}

uint64_t VarietySpec::fingerprint(uint32_t prime) const {
  uint64_t h = fnv1a_str(canonical());
  h = fnv1a_str(label, h);
  h = fnv1a_u64(seed, h);
  h = fnv1a_u64(prime, h);
  return h;
}

// ---------------------------------------------------------------------------
// EmbeddedVariety

EmbeddedVariety::EmbeddedVariety(const PrimeField& F, std::shared_ptr<const GradedRing> source,
                                 std::shared_ptr<SectionModel> model, VarietyMeta meta)
    : F_(F),
      source_(source),
      meta_(std::move(meta)),
      tower_(F, std::move(model), source->n_vars(), source) {}

uint32_t EmbeddedVariety::dimP(uint32_t k) const {
  return static_cast<uint32_t>(source_->degree_dim(Multideg{static_cast<int32_t>(k)}));
}

std::vector<std::pair<uint32_t, std::vector<Polynomial>>> EmbeddedVariety::minimal_generators(
    uint32_t d_max) {
  std::lock_guard<std::mutex> lk(mu_);
  for (uint32_t d = min_gens_built_ + 1; d <= d_max; ++d) {
    Multideg dd{static_cast<int32_t>(d)};
    const Subspace& Id = tower_.ideal_piece(d);
    std::vector<Polynomial> gens;
    if (Id.dim() > 0) {
      // span of P_1 * I_{d-1}
      Echelon grown(F_, dimP(d));
      const Subspace& Iprev = tower_.ideal_piece(d - 1);
      const auto& prev_mons = source_->degree_basis(Multideg{static_cast<int32_t>(d - 1)});
      for (uint32_t j = 0; j < n_vars(); ++j)
        for (uint32_t r = 0; r < Iprev.dim(); ++r) {
          SparseVec prod;
          for (auto& [c, v] : Iprev.basis.row(r)) {
            Expo e = prev_mons[c];
            e[j] += 1;
            prod.emplace_back(static_cast<uint32_t>(source_->monomial_index(dd, e)), v);
          }
          std::sort(prod.begin(), prod.end());
          grown.add_row(prod);
        }
      // canonical complement inside I_d
      std::vector<SparseVec> fresh;
      for (uint32_t r = 0; r < Id.dim(); ++r) {
        std::vector<uint32_t> res = grown.residual(Id.basis.row(r));
        SparseVec sv = to_sparse(res);
        if (!sv.empty()) fresh.push_back(std::move(sv));
      }
      Subspace comp = rref_rows(F_, dimP(d), fresh);
      const auto& mons = source_->degree_basis(dd);
      for (uint32_t r = 0; r < comp.dim(); ++r) {
        Polynomial g(source_.get());
        for (auto& [c, v] : comp.basis.row(r)) g.set_term(mons[c], v);
        gens.push_back(std::move(g));
      }
    }
    min_gens_.emplace(d, std::move(gens));
    min_gens_built_ = d;
  }
  std::vector<std::pair<uint32_t, std::vector<Polynomial>>> out;
  for (auto& [d, gens] : min_gens_) {
    if (d > d_max) break;
    if (!gens.empty()) out.emplace_back(d, gens);
  }
  return out;
}

std::vector<std::vector<uint32_t>> EmbeddedVariety::sample_points(uint32_t want, uint64_t seed) {
  if (!sampler_) return {};
  return sampler_(want, seed);
}

// ---------------------------------------------------------------------------
// smoothness spot checks

const char* to_string(SpotCheck s) {
  switch (s) {
    case SpotCheck::PASS:
      return "PASS";
    case SpotCheck::FAIL:
      return "FAIL";
    default:
      return "NO_POINTS_FOUND";
  }
}

SpotCheck smoothness_at_points(EmbeddedVariety& X,
                               const std::vector<std::vector<uint32_t>>& points) {
  const PrimeField& F = X.field();
  if (X.meta().dim < 0) throw Error("smoothness check needs expected dimension metadata");
  uint32_t codim = X.N() - static_cast<uint32_t>(X.meta().dim);
  auto gens = X.minimal_generators(3);
  std::vector<Polynomial> all;
  for (auto& [d, gs] : gens) all.insert(all.end(), gs.begin(), gs.end());
  if (all.empty()) throw Error("smoothness check: no generators through degree 3");
  for (auto& pt : points) {
    for (auto& g : all)
      if (eval_poly(F, g, pt) != 0) throw Error("sampled point does not lie on the variety");
    Matrix jac(static_cast<uint32_t>(all.size()), X.n_vars());
    for (uint32_t r = 0; r < all.size(); ++r)
      for (uint32_t j = 0; j < X.n_vars(); ++j) {
        uint32_t v = eval_poly(F, partial_derivative(F, all[r], j), pt);
        if (v) jac.set(r, j, v);
      }
    if (rank_of(F, jac) != codim) return SpotCheck::FAIL;
  }
  return SpotCheck::PASS;
}

SpotCheck smoothness_spot_check(EmbeddedVariety& X, uint32_t n_points, uint64_t seed) {
  if (!X.has_sampler()) return SpotCheck::NO_POINTS_FOUND;
  auto pts = X.sample_points(n_points, seed);
  if (pts.empty()) return SpotCheck::NO_POINTS_FOUND;
  return smoothness_at_points(X, pts);
}

// ---------------------------------------------------------------------------
// zero-dimensional solving

uint32_t det_small(const PrimeField& F, std::vector<std::vector<uint32_t>> m) {
  const size_t n = m.size();
  uint32_t det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = F.neg(det);
    }
    det = F.mul(det, m[c][c]);
    uint32_t inv = F.inv(m[c][c]);
    for (size_t r = c + 1; r < n; ++r) {
      if (!m[r][c]) continue;
      uint32_t factor = F.mul(m[r][c], inv);
      for (size_t j = c; j < n; ++j) m[r][j] = F.sub(m[r][j], F.mul(factor, m[c][j]));
    }
  }
  return det;
}

// quotient-piece data for the eigenvalue method
namespace {
struct QuotPiece {
  std::vector<Expo> basis;  // complement monomials
  std::unique_ptr<Echelon> rel;
  std::map<Expo, uint32_t> index;
};

QuotPiece quot_piece(const PrimeField& F, const GradedRing& S,
                     const std::vector<Polynomial>& gens, int k) {
  Multideg dk{k};
  size_t dim = S.degree_dim(dk);
  auto rel = std::make_unique<Echelon>(F, static_cast<uint32_t>(dim));
  for (auto& g : gens) {
    int dg = g.degree()[0];
    if (dg > k) continue;
    for (const Expo& m : S.degree_basis(Multideg{k - dg})) {
      Polynomial prod = multiply(F, g, monomial(S, m));
      rel->add_row(poly_coords(S, dk, prod));
    }
  }
  rel->make_reduced();
  QuotPiece q;
  q.rel = std::move(rel);
  const auto& mons = S.degree_basis(dk);
  std::vector<uint32_t> piv = q.rel->pivots_sorted();
  size_t pi = 0;
  for (uint32_t i = 0; i < mons.size(); ++i) {
    if (pi < piv.size() && piv[pi] == i) {
      ++pi;
      continue;
    }
    q.index[mons[i]] = static_cast<uint32_t>(q.basis.size());
    q.basis.push_back(mons[i]);
  }
  return q;
}

// coordinates of a degree-k form in the quotient piece
std::vector<uint32_t> quot_coords(const PrimeField& F, const GradedRing& S, const QuotPiece& q,
                                  int k, const Polynomial& p) {
  std::vector<uint32_t> res = q.rel->residual(poly_coords(S, Multideg{k}, p));
  std::vector<uint32_t> out(q.basis.size(), 0);
  const auto& mons = S.degree_basis(Multideg{k});
  for (uint32_t i = 0; i < mons.size(); ++i) {
    if (!res[i]) continue;
    auto it = q.index.find(mons[i]);
    if (it == q.index.end()) throw Error("quotient residual outside complement");
    out[it->second] = res[i];
  }
  return out;
}
}  // namespace

std::vector<std::vector<uint32_t>> zero_dim_points(const PrimeField& F, const GradedRing& S,
                                                   const std::vector<Polynomial>& gens,
                                                   uint64_t seed) {
  const uint32_t nv = S.n_vars();
  int dmax = 0;
  for (auto& g : gens) dmax = std::max(dmax, g.degree()[0]);
  int k = dmax + 1;
  QuotPiece B0 = quot_piece(F, S, gens, k);
  QuotPiece B1 = quot_piece(F, S, gens, k + 1);
  for (int grow = 0; grow < 3 && B0.basis.size() != B1.basis.size(); ++grow) {
    ++k;
    B0 = std::move(B1);
    B1 = quot_piece(F, S, gens, k + 1);
  }
  const size_t n = B0.basis.size();
  if (n == 0 || n != B1.basis.size()) return {};

  Splitmix rng(seed);
  // multiplication matrices B0 -> B1 for each variable (columns = images)
  std::vector<std::vector<std::vector<uint32_t>>> M(nv);
  for (uint32_t v = 0; v < nv; ++v) {
    M[v].resize(n);
    for (size_t i = 0; i < n; ++i) {
      Expo e = B0.basis[i];
      e[v] += 1;
      M[v][i] = quot_coords(F, S, B1, k + 1, monomial(S, e));
    }
  }
  for (int attempt = 0; attempt < 6; ++attempt) {
    // invertible multiplication by a random linear form w
    std::vector<uint32_t> wc(nv);
    for (auto& c : wc) c = rng.field_nonzero(F);
    Matrix W(static_cast<uint32_t>(n), static_cast<uint32_t>(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t r = 0; r < n; ++r) {
        uint64_t acc = 0;
        for (uint32_t v = 0; v < nv; ++v) acc += static_cast<uint64_t>(wc[v]) * M[v][i][r];
        uint32_t val = F.reduce(acc);
        if (val) W.set(static_cast<uint32_t>(r), static_cast<uint32_t>(i), val);
      }
    Matrix id(static_cast<uint32_t>(n), static_cast<uint32_t>(n));
    for (uint32_t i = 0; i < n; ++i) id.set(i, i, 1);
    auto Winv = solve(F, W, id);  // W * Winv = I
    if (!Winv || rank_of(F, W) != n) continue;
    // T_v = Winv o M_v acting on column vectors of B0 coordinates
    auto apply_T = [&](uint32_t v, const std::vector<uint32_t>& x) {
      std::vector<uint32_t> y(n, 0);
      for (size_t i = 0; i < n; ++i) {
        if (!x[i]) continue;
        for (size_t r = 0; r < n; ++r) y[r] = F.add(y[r], F.mul(x[i], M[v][i][r]));
      }
      std::vector<uint32_t> z(n, 0);
      for (size_t i = 0; i < n; ++i) {
        if (!y[i]) continue;
        for (size_t r = 0; r < n; ++r) z[r] = F.add(z[r], F.mul(y[i], Winv->get(r, i)));
      }
      return z;
    };
    // generic operator and its characteristic polynomial by interpolation
    std::vector<uint32_t> uc(nv);
    for (auto& c : uc) c = rng.field_elt(F);
    std::vector<std::vector<uint32_t>> T(n, std::vector<uint32_t>(n, 0));
    for (size_t i = 0; i < n; ++i) {
      std::vector<uint32_t> x(n, 0);
      x[i] = 1;
      std::vector<uint32_t> acc(n, 0);
      for (uint32_t v = 0; v < nv; ++v) {
        if (!uc[v]) continue;
        auto tv = apply_T(v, x);
        for (size_t r = 0; r < n; ++r) acc[r] = F.add(acc[r], F.mul(uc[v], tv[r]));
      }
      for (size_t r = 0; r < n; ++r) T[r][i] = acc[r];
    }
    // char poly values at lambda = 0..n
    std::vector<uint32_t> lam(n + 1), val(n + 1);
    for (size_t s = 0; s <= n; ++s) {
      lam[s] = static_cast<uint32_t>(s);
      auto Tm = T;
      for (size_t i = 0; i < n; ++i) Tm[i][i] = F.sub(Tm[i][i], lam[s]);
      val[s] = det_small(F, Tm);
    }
    // Lagrange interpolation
    UniPoly chi(n + 1, 0);
    for (size_t s = 0; s <= n; ++s) {
      UniPoly num{1};
      uint32_t den = 1;
      for (size_t t = 0; t <= n; ++t) {
        if (t == s) continue;
        num = uni_mul(F, num, UniPoly{F.neg(lam[t]), 1});
        den = F.mul(den, F.sub(lam[s], lam[t]));
      }
      uint32_t c = F.mul(val[s], F.inv(den));
      for (size_t i = 0; i < num.size(); ++i) chi[i] = F.add(chi[i], F.mul(c, num[i]));
    }
    std::vector<std::vector<uint32_t>> points;
    for (uint32_t lambda : uni_roots(F, chi, rng.next())) {
      // kernel of T - lambda
      Matrix K(static_cast<uint32_t>(n), static_cast<uint32_t>(n));
      for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c) {
          uint32_t vv = r == c ? F.sub(T[r][c], lambda) : T[r][c];
          if (vv) K.set(static_cast<uint32_t>(r), static_cast<uint32_t>(c), vv);
        }
      Subspace ker = kernel(F, K);
      if (ker.dim() != 1) continue;
      std::vector<uint32_t> vvec = to_dense(ker.basis.row(0), static_cast<uint32_t>(n));
      size_t q0 = 0;
      while (q0 < n && vvec[q0] == 0) ++q0;
      std::vector<uint32_t> mu(nv, 0);
      bool ok = true;
      for (uint32_t v = 0; v < nv && ok; ++v) {
        auto tv = apply_T(v, vvec);
        mu[v] = F.mul(tv[q0], F.inv(vvec[q0]));
        for (size_t r = 0; r < n; ++r)
          if (tv[r] != F.mul(mu[v], vvec[r])) {
            ok = false;
            break;
          }
      }
      if (!ok) continue;
      bool nz = false;
      for (uint32_t v = 0; v < nv; ++v) nz |= mu[v] != 0;
      if (!nz) continue;
      for (auto& g : gens)
        if (eval_poly(F, g, mu) != 0) {
          ok = false;
          break;
        }
      if (ok) points.push_back(std::move(mu));
    }
    if (!points.empty() || attempt == 5) return points;
  }
  return {};
}

}  // namespace conormal
