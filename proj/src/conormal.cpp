#include "conormal/conormal.hpp"

#include <algorithm>

namespace conormal {

const char* to_string(StarVerdict v) {
  switch (v) {
    case StarVerdict::HOLDS:
      return "HOLDS";
    case StarVerdict::FAILS:
      return "FAILS";
    default:
      return "INCONCLUSIVE";
  }
}

Subspace EulerSpace::canonical(const PrimeField& F) const {
  return rref_rows(F, ambient, basis);
}

static FieldConfig derive_cfg(uint32_t p) {
  FieldConfig d = FieldConfig::defaults();
  std::vector<uint32_t> all = d.all_primes();
  FieldConfig out;
  out.prime = p;
  bool seen = false;
  for (uint32_t q : all) {
    if (q == p) {
      seen = true;
      continue;
    }
    if (seen) out.retry_primes.push_back(q);
  }
  if (!seen)
    for (uint32_t q : all)
      if (q != p) out.retry_primes.push_back(q);
  return out;
}

ConormalEngine::ConormalEngine(VarietyPtr X, Options opt)
    : X_(std::move(X)), opt_(opt), cfg_(derive_cfg(X_->field().p())) {}

uint64_t ConormalEngine::sketch_seed(const char* tag, uint64_t salt) const {
  uint64_t h = fnv1a_str(X_->meta().label);
  h = fnv1a_str(tag, h);
  h = fnv1a_u64(X_->meta().seed, h);
  h = fnv1a_u64(F().p(), h);
  h = fnv1a_u64(opt_.seed, h);
  return fnv1a_u64(salt, h);
}

// ---------------------------------------------------------------------------
// generators

// minimal generators through degree min(4, needed), with a rank certificate
// replacing the exact complement where no new generators appear
static std::vector<std::pair<uint32_t, Polynomial>> generator_list(ConormalEngine& eng,
                                                                   EmbeddedVariety& X,
                                                                   uint32_t through) {
  std::vector<std::pair<uint32_t, Polynomial>> out;
  uint32_t d_exact = std::min<uint32_t>(through, 3);
  for (auto& [d, gens] : X.minimal_generators(d_exact))
    for (auto& g : gens) out.emplace_back(d, g);
  for (uint32_t d = 4; d <= through; ++d) {
    if (eng.quadric_generation_at(d)) continue;
    for (auto& [dd, gens] : X.minimal_generators(d))
      if (dd == d)
        for (auto& g : gens) out.emplace_back(dd, g);
  }
  return out;
}

bool ConormalEngine::quadric_generation_at(uint32_t d) {
  // rank of P_1 * I_{d-1} inside I_d equals dim I_d iff nothing is new at d
  const PrimeField& Fp = F();
  uint32_t dimPd = X_->dimP(d);
  int64_t bound = static_cast<int64_t>(dimPd) - dimA(d);
  if (bound == 0) return true;
  const Subspace& Iprev = ideal_piece(d - 1);
  if (Iprev.dim() == 0) return bound == 0;
  const auto& prev_mons = X_->P().degree_basis(Multideg{static_cast<int32_t>(d - 1)});
  Multideg dd{static_cast<int32_t>(d)};
  auto row_of = [&](uint32_t j, uint32_t r) {
    SparseVec prod;
    for (auto& [c, v] : Iprev.basis.row(r)) {
      Expo e = prev_mons[c];
      e[j] += 1;
      prod.emplace_back(static_cast<uint32_t>(X_->P().monomial_index(dd, e)), v);
    }
    std::sort(prod.begin(), prod.end());
    return prod;
  };
  size_t n_rows = static_cast<size_t>(X_->n_vars()) * Iprev.dim();
  if (n_rows <= 4096 && dimPd <= 4096) {
    Echelon e(Fp, dimPd);
    for (uint32_t j = 0; j < X_->n_vars(); ++j)
      for (uint32_t r = 0; r < Iprev.dim(); ++r) e.add_row(row_of(j, r));
    return static_cast<int64_t>(e.rank()) == bound;
  }
  // one-sided sketch certificate (span is always inside I_d)
  RowSketch sk(Fp, dimPd, static_cast<uint32_t>(bound) + 24, sketch_seed("quadgen", d));
  for (uint32_t j = 0; j < X_->n_vars(); ++j)
    for (uint32_t r = 0; r < Iprev.dim(); ++r) sk.absorb(row_of(j, r));
  if (static_cast<int64_t>(sk.rank()) == bound) return true;
  // exact fallback
  Echelon e(Fp, dimPd);
  for (uint32_t j = 0; j < X_->n_vars(); ++j)
    for (uint32_t r = 0; r < Iprev.dim(); ++r) e.add_row(row_of(j, r));
  return static_cast<int64_t>(e.rank()) == bound;
}

// ---------------------------------------------------------------------------
// Euler model

const EulerSpace& ConormalEngine::euler_space(uint32_t k) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = euler_.find(k);
  if (it != euler_.end()) return it->second;
  EulerSpace M;
  M.k = k;
  M.blocks = X_->n_vars();
  M.block_dim = k == 0 ? 0 : dimA(k - 1);
  M.ambient = M.blocks * M.block_dim;
  if (k > 0 && M.block_dim > 0) {
    ATower& tw = X_->tower();
    uint32_t ta = dimA(k);
    Echelon contraction(F(), M.ambient);
    // rows of the contraction matrix A_{k-1}^{N+1} -> A_k
    std::vector<SparseVec> crows(ta);
    for (uint32_t j = 0; j < M.blocks; ++j) {
      const LinMap& mj = tw.mult_map(j, k - 1);
      for (uint32_t i = 0; i < M.block_dim; ++i) {
        uint32_t col = j * M.block_dim + i;
        if (mj.dense) {
          for (uint32_t t = 0; t < ta; ++t) {
            uint32_t v = mj.drows[static_cast<size_t>(i) * ta + t];
            if (v) crows[t].emplace_back(col, v);
          }
        } else {
          for (auto& [t, v] : mj.srows[i]) crows[t].emplace_back(col, v);
        }
      }
    }
    Echelon ech(F(), M.ambient);
    for (auto& r : crows) {
      std::sort(r.begin(), r.end());
      ech.add_row(r);
    }
    M.contraction_surjective = ech.rank() == ta;
    M.basis = ech.kernel_vectors();
    // two-model identity: dim M_k = dim R_1(L, L^{k-1}) (size-guarded)
    if (k >= 2 && M.ambient <= 6000) {
      int64_t r1 = r1_kernel_dim_check(k);
      if (r1 >= 0 && r1 != static_cast<int64_t>(M.basis.size()))
        throw Error("Euler model disagrees with the multiplication kernel at degree " +
                    std::to_string(k));
    }
  }
  return euler_.emplace(k, std::move(M)).first->second;
}

int64_t ConormalEngine::r1_kernel_dim_check(uint32_t k) {
  ATower& tw = X_->tower();
  uint32_t t1 = dimA(1), tb = dimA(k - 1);
  if (t1 != X_->n_vars()) return -1;
  SectionModel& model = tw.model();
  Echelon ech(F(), static_cast<uint32_t>(t1) * tb);
  std::vector<SparseVec> rows(dimA(k));
  std::vector<std::vector<uint32_t>> a_targets(t1);
  for (uint32_t i = 0; i < t1; ++i) {
    std::vector<uint32_t> ci(t1, 0);
    ci[i] = 1;
    a_targets[i] = tw.expand(1, ci);
  }
  for (uint32_t i = 0; i < t1; ++i)
    for (uint32_t j = 0; j < tb; ++j) {
      std::vector<uint32_t> cb(tb, 0);
      cb[j] = 1;
      std::vector<uint32_t> prod =
          tw.coords_of_target(k, model.mult(a_targets[i], 1, tw.expand(k - 1, cb), k - 1));
      uint32_t col = i * tb + j;
      for (uint32_t t = 0; t < prod.size(); ++t)
        if (prod[t]) rows[t].emplace_back(col, prod[t]);
    }
  for (auto& r : rows) ech.add_row(r);
  return static_cast<int64_t>(t1) * tb - ech.rank();
}

Subspace ConormalEngine::r1_kernel(uint32_t a, uint32_t b) {
  ATower& tw = X_->tower();
  SectionModel& model = tw.model();
  uint32_t ta = dimA(a), tb = dimA(b), tc = dimA(a + b);
  Matrix m(tc, ta * tb);
  for (uint32_t i = 0; i < ta; ++i) {
    std::vector<uint32_t> ca(ta, 0);
    ca[i] = 1;
    std::vector<uint32_t> wa = tw.expand(a, ca);
    for (uint32_t j = 0; j < tb; ++j) {
      std::vector<uint32_t> cb(tb, 0);
      cb[j] = 1;
      std::vector<uint32_t> prod =
          tw.coords_of_target(a + b, model.mult(wa, a, tw.expand(b, cb), b));
      for (uint32_t t = 0; t < tc; ++t)
        if (prod[t]) m.set(t, i * tb + j, prod[t]);
    }
  }
  return kernel(F(), m);
}

// ---------------------------------------------------------------------------
// Jacobian submodule

std::vector<uint32_t> ConormalEngine::gaussian_to_euler(
    uint32_t k, const std::vector<std::pair<Polynomial, Polynomial>>& T) {
  const PrimeField& Fp = F();
  ATower& tw = X_->tower();
  uint32_t bd = dimA(k - 1);
  std::vector<uint32_t> out(X_->n_vars() * bd, 0);
  // membership of mu(T) in I_k
  Polynomial mu(&X_->P());
  for (auto& [s, t] : T) mu = add(Fp, mu, multiply(Fp, s, t));
  if (!mu.is_zero()) {
    auto cls = tw.poly_coords_A(mu, k);
    for (uint32_t v : cls)
      if (v) throw Error("gaussian_to_euler: tensor does not multiply into the ideal");
  }
  for (uint32_t j = 0; j < X_->n_vars(); ++j) {
    Polynomial cj(&X_->P());
    for (auto& [s, t] : T) cj = add(Fp, cj, multiply(Fp, s, partial_derivative(Fp, t, j)));
    if (cj.is_zero()) continue;
    auto coords = tw.poly_coords_A(cj, k - 1);
    for (uint32_t i = 0; i < bd; ++i) out[j * bd + i] = coords[i];
  }
  return out;
}

const Echelon& ConormalEngine::jacobian_echelon(uint32_t k) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = njac_.find(k);
  if (it != njac_.end()) return *it->second;
  const PrimeField& Fp = F();
  ATower& tw = X_->tower();
  SectionModel& model = tw.model();
  uint32_t bd = k == 0 ? 0 : dimA(k - 1);
  if (cache_) {
    auto hit = cache_->load("njac", k);
    if (hit && hit->ambient == X_->n_vars() * bd) {
      auto cached = std::make_unique<Echelon>(Fp, hit->ambient);
      for (uint32_t r = 0; r < hit->dim(); ++r) cached->add_row(hit->basis.row(r));
      return *njac_.emplace(k, std::move(cached)).first->second;
    }
  }
  auto ech = std::make_unique<Echelon>(Fp, X_->n_vars() * bd);
  uint32_t gen_cap = std::min<uint32_t>(k, 4);
  if (k >= 2 && bd > 0) {
    auto gens = generator_list(*this, *X_, gen_cap);
    for (auto& [d, f] : gens) {
      if (d > k) continue;
      // target expansions of the partial-derivative classes
      std::vector<std::vector<uint32_t>> wj(X_->n_vars());
      std::vector<bool> zero(X_->n_vars(), false);
      for (uint32_t j = 0; j < X_->n_vars(); ++j) {
        Polynomial dfj = partial_derivative(Fp, f, j);
        if (dfj.is_zero()) {
          zero[j] = true;
          continue;
        }
        wj[j] = tw.expand(d - 1, tw.poly_coords_A(dfj, d - 1));
      }
      uint32_t mult_dim = dimA(k - d);
      for (uint32_t i = 0; i < mult_dim; ++i) {
        std::vector<uint32_t> wt = tw.basis_target(k - d, i);
        SparseVec row;
        for (uint32_t j = 0; j < X_->n_vars(); ++j) {
          if (zero[j]) continue;
          std::vector<uint32_t> coords =
              tw.coords_of_target(k - 1, model.mult(wt, k - d, wj[j], d - 1));
          for (uint32_t t = 0; t < bd; ++t)
            if (coords[t]) row.emplace_back(j * bd + t, coords[t]);
        }
        std::sort(row.begin(), row.end());
        ech->add_row(row);
      }
    }
  }
  Echelon& stored = *njac_.emplace(k, std::move(ech)).first->second;
  if (cache_) cache_->store("njac", k, stored.to_subspace());
  return stored;
}

uint32_t ConormalEngine::dim_N(uint32_t k) { return jacobian_echelon(k).rank(); }

Subspace ConormalEngine::jacobian_piece(uint32_t k) {
  Echelon& e = const_cast<Echelon&>(jacobian_echelon(k));
  return e.to_subspace();
}

// ---------------------------------------------------------------------------
// saturation

bool ConormalEngine::saturation_step_certified(uint32_t k) {
  const PrimeField& Fp = F();
  ATower& tw = X_->tower();
  const EulerSpace& M = euler_space(k);
  if (M.ambient == 0) return true;
  uint32_t nk = dim_N(k);
  Echelon& Nnext = const_cast<Echelon&>(jacobian_echelon(k + 1));
  int64_t bound = static_cast<int64_t>(M.ambient) - nk;
  if (bound == 0) return true;
  // functionals: rows of the contraction (annihilator of M_k) plus pullbacks
  // Z_j^T w for w in the left annihilator of N_{k+1}
  auto wperp = Nnext.kernel_vectors();
  uint32_t bd_next = dimA(k);
  Splitmix rng(sketch_seed("satcert", k));
  Echelon cert(Fp, M.ambient);
  // contraction rows
  {
    uint32_t ta = dimA(k);
    std::vector<SparseVec> crows(ta);
    for (uint32_t j = 0; j < M.blocks; ++j) {
      const LinMap& mj = tw.mult_map(j, k - 1);
      for (uint32_t i = 0; i < M.block_dim; ++i) {
        uint32_t col = j * M.block_dim + i;
        if (mj.dense) {
          for (uint32_t t = 0; t < ta; ++t) {
            uint32_t v = mj.drows[static_cast<size_t>(i) * ta + t];
            if (v) crows[t].emplace_back(col, v);
          }
        } else {
          for (auto& [t, v] : mj.srows[i]) crows[t].emplace_back(col, v);
        }
      }
    }
    for (auto& r : crows) {
      std::sort(r.begin(), r.end());
      cert.add_row(r);
    }
  }
  if (wperp.empty()) return static_cast<int64_t>(cert.rank()) == bound;
  int64_t budget = bound - cert.rank() + 24;
  std::vector<uint32_t> w(static_cast<size_t>(M.blocks) * bd_next);
  for (int64_t row = 0; row < budget; ++row) {
    if (static_cast<int64_t>(cert.rank()) == bound) break;
    // sparse random combination of the annihilator basis
    std::fill(w.begin(), w.end(), 0);
    for (int s = 0; s < 3; ++s) {
      const SparseVec& base = wperp[rng.below(wperp.size())];
      uint32_t c = rng.field_nonzero(Fp);
      for (auto& [col, v] : base) w[col] = Fp.add(w[col], Fp.mul(c, v));
    }
    uint32_t j = static_cast<uint32_t>(row % M.blocks);
    const LinMap& mj = tw.mult_map(j, k - 1);
    std::vector<uint32_t> pull(M.ambient, 0);
    for (uint32_t u = 0; u < M.blocks; ++u) {
      std::vector<uint32_t> wu(w.begin() + static_cast<size_t>(u) * bd_next,
                               w.begin() + static_cast<size_t>(u + 1) * bd_next);
      std::vector<uint32_t> back = mj.apply_t(Fp, wu);
      std::copy(back.begin(), back.end(), pull.begin() + static_cast<size_t>(u) * M.block_dim);
    }
    cert.add_dense(pull);
  }
  return static_cast<int64_t>(cert.rank()) == bound;
}

// rows of S_m(k) = {c in M_k : z_j c in S_{m-1}(k+1)} computed by the degree
// ladder; m = 0 gives N_k
std::vector<SparseVec> ConormalEngine::saturation_step_exact(uint32_t k,
                                                             const std::vector<SparseVec>& next,
                                                             uint32_t /*m*/) {
  const PrimeField& Fp = F();
  ATower& tw = X_->tower();
  const EulerSpace& M = euler_space(k);
  if (M.dim() == 0) return {};
  Echelon Enext(Fp, X_->n_vars() * dimA(k));
  for (auto& r : next) Enext.add_row(r);
  uint32_t bd = M.block_dim, bd_next = dimA(k);
  // constraint rows (one per M-basis vector), tracked with identity columns
  uint32_t width = X_->n_vars() * X_->n_vars() * bd_next;
  Echelon tracked(Fp, width + M.dim());
  std::vector<SparseVec> out;
  std::vector<SparseVec> rows(M.dim());
  for (uint32_t i = 0; i < M.dim(); ++i) {
    // z_j * b_i blockwise, reduced mod S_{m-1}(k+1)
    SparseVec combined;
    const unsigned batch = Fp.axpy_batch();
    for (uint32_t j = 0; j < X_->n_vars(); ++j) {
      std::vector<uint64_t> acc(static_cast<size_t>(X_->n_vars()) * bd_next, 0);
      const LinMap& mj = tw.mult_map(j, k - 1);
      unsigned pending = 0;
      for (auto& [col, v] : M.basis[i]) {
        uint32_t blk = col / bd, idx = col % bd;
        if (mj.dense) {
          const uint32_t* rowp = &mj.drows[static_cast<size_t>(idx) * bd_next];
          uint64_t* dst = acc.data() + static_cast<size_t>(blk) * bd_next;
          for (uint32_t t = 0; t < bd_next; ++t) dst[t] += static_cast<uint64_t>(v) * rowp[t];
        } else {
          for (auto& [t, x] : mj.srows[idx])
            acc[static_cast<size_t>(blk) * bd_next + t] += static_cast<uint64_t>(v) * x;
        }
        if (++pending >= batch) {
          for (auto& a : acc) a = Fp.reduce(a);
          pending = 0;
        }
      }
      for (auto& a : acc) a = Fp.reduce(a);
      Enext.residual_inplace(acc);
      for (uint32_t t = 0; t < acc.size(); ++t)
        if (acc[t])
          combined.emplace_back(j * (X_->n_vars() * bd_next) + t,
                                static_cast<uint32_t>(acc[t]));
    }
    combined.emplace_back(width + i, 1);
    rows[i] = std::move(combined);
  }
  for (auto& r : rows) tracked.add_row(r);
  tracked.make_reduced();
  // rows whose constraint part vanished: their tracker parts span the kernel
  for (uint32_t pc : tracked.pivots_sorted()) {
    if (pc < width) continue;
    SparseVec coeffs;
    for (auto& [c, v] : tracked.row_sparse(tracked.row_of_pivot(pc)))
      coeffs.emplace_back(c - width, v);
    // expand to ambient coordinates
    std::vector<uint64_t> acc(M.ambient, 0);
    unsigned pending = 0;
    const unsigned batch = Fp.axpy_batch();
    for (auto& [bi, cv] : coeffs) {
      for (auto& [col, v] : M.basis[bi]) acc[col] += static_cast<uint64_t>(cv) * v;
      if (++pending >= batch) {
        for (auto& a : acc) a = Fp.reduce(a);
        pending = 0;
      }
    }
    SparseVec vec;
    for (uint32_t c = 0; c < M.ambient; ++c) {
      uint32_t r = Fp.reduce(acc[c]);
      if (r) vec.emplace_back(c, r);
    }
    out.push_back(std::move(vec));
  }
  return out;
}

const ConormalPiece& ConormalEngine::conormal_saturation(uint32_t k) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = sat_.find(k);
  if (it != sat_.end()) return it->second;
  ConormalPiece piece;
  piece.k = k;
  piece.dim_N = dim_N(k);
  const EulerSpace& M = euler_space(k);
  if (cache_ && M.ambient > 0) {
    auto hit = cache_->load("sat", k);
    if (hit && hit->ambient == M.ambient && hit->dim() >= piece.dim_N) {
      piece.dim_sat = hit->dim();
      piece.stabilization_m = -1;
      piece.cached = true;
      std::vector<SparseVec> rows;
      for (uint32_t r = 0; r < hit->dim(); ++r) rows.push_back(hit->basis.row(r));
      sat_basis_[k] = std::move(rows);
      return sat_.emplace(k, piece).first->second;
    }
  }
  if (M.ambient == 0 || M.dim() == 0) {
    piece.dim_sat = piece.dim_N;
    piece.stabilization_m = 0;
    sat_basis_[k] = {};
    return sat_.emplace(k, piece).first->second;
  }
  // fast path: certificate that S_1 = N_k (then the chain is stable at once)
  if (opt_.window <= 2 && saturation_step_certified(k)) {
    piece.dim_sat = piece.dim_N;
    piece.stabilization_m = 0;
    piece.certified = true;
    Echelon& Nk = const_cast<Echelon&>(jacobian_echelon(k));
    std::vector<SparseVec> rows;
    for (uint32_t i = 0; i < Nk.rank(); ++i) rows.push_back(Nk.row_sparse(i));
    sat_basis_[k] = std::move(rows);
    if (cache_) cache_->store("sat", k, rref_rows(F(), M.ambient, sat_basis_[k]));
    return sat_.emplace(k, piece).first->second;
  }
  // exact chain S_0 = N subset S_1 subset ... via the degree ladder
  // ladder_rows[m] holds S_m at degree k+? : compute S_m(k) from S_{m-1}(k+1)
  auto rows_of_N = [&](uint32_t deg) {
    Echelon& Nd = const_cast<Echelon&>(jacobian_echelon(deg));
    std::vector<SparseVec> rows;
    for (uint32_t i = 0; i < Nd.rank(); ++i) rows.push_back(Nd.row_sparse(i));
    return rows;
  };
  // S_m(k) requires S_{m-1}(k+1) ... S_0(k+m) = N_{k+m}
  std::map<std::pair<uint32_t, uint32_t>, std::vector<SparseVec>> memo;
  std::function<const std::vector<SparseVec>&(uint32_t, uint32_t)> S =
      [&](uint32_t deg, uint32_t m) -> const std::vector<SparseVec>& {
    auto key = std::make_pair(deg, m);
    auto f = memo.find(key);
    if (f != memo.end()) return f->second;
    std::vector<SparseVec> rows =
        m == 0 ? rows_of_N(deg) : saturation_step_exact(deg, S(deg + 1, m - 1), m);
    return memo.emplace(key, std::move(rows)).first->second;
  };
  uint32_t prev_dim = piece.dim_N;
  uint32_t run = 1;
  int stab = 0;
  bool stabilized = false;
  for (uint32_t m = 1; m <= opt_.m_cap; ++m) {
    uint32_t dm = static_cast<uint32_t>(S(k, m).size());
    if (dm == prev_dim) {
      ++run;
    } else {
      run = 1;
      stab = static_cast<int>(m);
      prev_dim = dm;
    }
    if (run >= opt_.window) {
      piece.dim_sat = prev_dim;
      piece.stabilization_m = stab;
      stabilized = true;
      sat_basis_[k] = stab == 0 ? rows_of_N(k) : S(k, static_cast<uint32_t>(stab));
      break;
    }
  }
  if (!stabilized) {
    piece.unstable = true;
    piece.dim_sat = prev_dim;
    piece.stabilization_m = -1;
    sat_basis_[k] = S(k, opt_.m_cap);
  }
  if (cache_ && !piece.unstable)
    cache_->store("sat", k, rref_rows(F(), M.ambient, sat_basis_[k]));
  return sat_.emplace(k, piece).first->second;
}

Subspace ConormalEngine::saturation_subspace(uint32_t k) {
  conormal_saturation(k);
  const EulerSpace& M = euler_space(k);
  return rref_rows(F(), M.ambient, sat_basis_[k]);
}

ConormalEngine* ConormalEngine::confirm_engine() {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (confirm_) return confirm_.get();
  if (cfg_.retry_primes.empty() || X_->meta().constructor.empty()) return nullptr;
  if (confirm_depth_ + 1 >= cfg_.all_primes().size()) return nullptr;  // rotation exhausted
  // Rotate the prime list instead of dropping the head: randomized
  // constructors validate candidates against every configured prime, and the
  // accepted attempt must be the same one under every engine in the chain.
  FieldConfig next;
  next.prime = cfg_.retry_primes.front();
  next.retry_primes.assign(cfg_.retry_primes.begin() + 1, cfg_.retry_primes.end());
  next.retry_primes.push_back(cfg_.prime);
  auto field = std::make_shared<PrimeField>(next.prime);
  VarietySpec spec = VarietySpec::parse(
      X_->meta().params.empty() ? X_->meta().constructor
                                : X_->meta().constructor + ":" + X_->meta().params,
      X_->meta().seed, X_->meta().label);
  VarietyPtr Xq = build_variety(spec, next, *field);
  confirm_ = std::unique_ptr<ConormalEngine>(new ConormalEngine(Xq, opt_));
  confirm_->owned_field_ = field;
  confirm_->set_config(next);
  confirm_->confirm_depth_ = confirm_depth_ + 1;
  return confirm_.get();
}

int64_t ConormalEngine::h1_ideal_square(uint32_t k) {
  const ConormalPiece& piece = conormal_saturation(k);
  if (piece.unstable) throw UnstableError("UNSTABLE saturation at degree " + std::to_string(k));
  int64_t h = piece.h1();
  if (h == 0) return 0;
  ConormalEngine* other = confirm_engine();
  if (!other) return h;
  int64_t h2 = other->h1_ideal_square(k);
  if (h2 == h) return h;
  unlucky_ = true;
  return h2;
}

StarReport ConormalEngine::star_check(uint32_t k_max) {
  StarReport rep;
  rep.primes_used.push_back(F().p());
  bool any_nonzero = false, any_unstable = false;
  for (uint32_t k = 3; k <= k_max; ++k) {
    try {
      int64_t h = h1_ideal_square(k);
      rep.h1_by_degree[k] = h;
      if (h != 0) {
        any_nonzero = true;
        if (confirm_) {
          uint32_t q = confirm_->F().p();
          if (std::find(rep.primes_used.begin(), rep.primes_used.end(), q) ==
              rep.primes_used.end())
            rep.primes_used.push_back(q);
        }
      }
    } catch (const UnstableError&) {
      any_unstable = true;
      rep.h1_by_degree[k] = -1;
    }
  }
  rep.unlucky_prime = unlucky_;
  rep.verdict = any_unstable ? StarVerdict::INCONCLUSIVE
                             : (any_nonzero ? StarVerdict::FAILS : StarVerdict::HOLDS);
  return rep;
}

// ---------------------------------------------------------------------------
// Gaussian wedge map

// image of z_u wedge z_v in the Euler model: block v carries [z_u], block u
// carries -[z_v] (A_1 coordinates of the variable classes)
static SparseVec wedge_image(const PrimeField& F, uint32_t u, uint32_t v, uint32_t bd,
                             const std::vector<std::vector<uint32_t>>& zc) {
  SparseVec row;
  for (uint32_t t = 0; t < bd; ++t)
    if (zc[v][t]) row.emplace_back(u * bd + t, F.neg(zc[v][t]));
  for (uint32_t t = 0; t < bd; ++t)
    if (zc[u][t]) row.emplace_back(v * bd + t, zc[u][t]);
  std::sort(row.begin(), row.end());
  return row;
}

static std::vector<std::vector<uint32_t>> var_classes(const PrimeField& F, EmbeddedVariety& X) {
  std::vector<std::vector<uint32_t>> zc;
  for (uint32_t u = 0; u < X.n_vars(); ++u) {
    Expo e(X.n_vars(), 0);
    e[u] = 1;
    zc.push_back(X.tower().poly_coords_A(monomial(X.P(), e), 1));
  }
  return zc;
}

const std::pair<int64_t, int64_t>& ConormalEngine::wedge_rank_data() {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (wedge_data_) return *wedge_data_;
  const PrimeField& Fp = F();
  if (dimA(1) != X_->n_vars()) throw Error("wedge map needs a linearly normal model");
  conormal_saturation(2);
  const EulerSpace& M2 = euler_space(2);
  Echelon sat2(Fp, M2.ambient);
  for (auto& r : sat_basis_[2]) sat2.add_row(r);
  uint32_t bd = M2.block_dim;
  auto zc = var_classes(Fp, *X_);
  Echelon resid(Fp, M2.ambient);
  int64_t rank = 0;
  for (uint32_t u = 0; u < X_->n_vars(); ++u)
    for (uint32_t v = u + 1; v < X_->n_vars(); ++v) {
      SparseVec row = wedge_image(Fp, u, v, bd, zc);
      std::vector<uint32_t> res = sat2.residual(row);
      if (resid.add_row(to_sparse(res))) ++rank;
    }
  int64_t n_pairs = static_cast<int64_t>(X_->n_vars()) * (X_->n_vars() - 1) / 2;
  wedge_data_ = std::make_pair(n_pairs - rank, rank);
  return *wedge_data_;
}

int64_t ConormalEngine::wedge_kernel_dim() { return wedge_rank_data().first; }

Subspace ConormalEngine::gaussian_wedge_kernel() {
  const PrimeField& Fp = F();
  conormal_saturation(2);
  const EulerSpace& M2 = euler_space(2);
  Echelon sat2(Fp, M2.ambient);
  for (auto& r : sat_basis_[2]) sat2.add_row(r);
  uint32_t bd = M2.block_dim;
  auto zc = var_classes(Fp, *X_);
  uint32_t n_pairs = X_->n_vars() * (X_->n_vars() - 1) / 2;
  // tracked elimination: kernel of the residual matrix over pair coordinates
  Echelon tracked(Fp, M2.ambient + n_pairs);
  uint32_t pair_idx = 0;
  for (uint32_t u = 0; u < X_->n_vars(); ++u)
    for (uint32_t v = u + 1; v < X_->n_vars(); ++v, ++pair_idx) {
      SparseVec row = wedge_image(Fp, u, v, bd, zc);
      SparseVec aug = to_sparse(sat2.residual(row));
      aug.emplace_back(M2.ambient + pair_idx, 1);
      tracked.add_row(aug);
    }
  tracked.make_reduced();
  std::vector<SparseVec> kernel_rows;
  for (uint32_t pc : tracked.pivots_sorted()) {
    if (pc < M2.ambient) continue;
    SparseVec kv;
    for (auto& [c, v] : tracked.row_sparse(tracked.row_of_pivot(pc)))
      kv.emplace_back(c - M2.ambient, v);
    kernel_rows.push_back(std::move(kv));
  }
  return rref_rows(Fp, n_pairs, kernel_rows);
}

int64_t ConormalEngine::canonical_gaussian_corank() {
  if (X_->meta().genus <= 0 || X_->n_vars() != static_cast<uint32_t>(X_->meta().genus))
    throw Error("gaussian corank is defined for canonically embedded curves");
  int64_t g = X_->meta().genus;
  int64_t corank = (5 * g - 5) - wedge_rank_data().second;
  if (corank != 0) {
    ConormalEngine* other = confirm_engine();
    if (other) {
      int64_t c2 = other->canonical_gaussian_corank();
      if (c2 != corank) {
        unlucky_ = true;
        return c2;
      }
    }
  }
  return corank;
}

TProfiles ConormalEngine::t_profiles(uint32_t k_max) {
  if (X_->meta().genus <= 0) throw Error("t_profiles is defined for canonical curves");
  TProfiles t;
  t.t1_minus1 = canonical_gaussian_corank();
  for (int32_t kk = 0; kk >= -static_cast<int32_t>(k_max); --kk) {
    uint32_t deg = static_cast<uint32_t>(1 - kk);
    try {
      t.t2_by_degree[kk] = h1_ideal_square(deg);
    } catch (const UnstableError&) {
      t.t2_by_degree[kk] = -1;
      t.inconclusive = true;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// normal presentation, quadric-multiple cokernels, degree-3 square saturation

NormalPresentation ConormalEngine::normal_presentation_check(uint32_t d_max) {
  const PrimeField& Fp = F();
  NormalPresentation np;
  np.quadratic_generation = true;
  for (uint32_t d = 3; d <= d_max; ++d)
    if (!quadric_generation_at(d)) {
      np.quadratic_generation = false;
      break;
    }
  if (!np.quadratic_generation) return np;
  // linear syzygies: P_1 * Syz_3 spans Syz_4
  const Subspace& I2 = ideal_piece(2);
  uint32_t kq = I2.dim();
  if (kq == 0) {
    np.linear_syzygies = true;
    return np;
  }
  uint32_t g1 = X_->dimP(1), p2 = X_->dimP(2), p3 = X_->dimP(3), p4 = X_->dimP(4);
  const auto& mons1 = X_->P().degree_basis(Multideg{1});
  // columns of the presentation matrix are the canonical quadrics
  auto mult_mono = [&](const SparseVec& fcoords, const Expo& m, uint32_t target_deg) {
    SparseVec out;
    const auto& tmons = X_->P().degree_basis(Multideg{2});
    Multideg td{static_cast<int32_t>(target_deg)};
    for (auto& [c, v] : fcoords) {
      Expo e = tmons[c];
      for (uint32_t i = 0; i < e.size(); ++i) e[i] += m[i];
      out.emplace_back(static_cast<uint32_t>(X_->P().monomial_index(td, e)), v);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  // Syz_3 = kernel of (P_1)^k -> P_3
  Matrix phi3(p3, kq * g1);
  for (uint32_t i = 0; i < kq; ++i)
    for (uint32_t u = 0; u < g1; ++u) {
      SparseVec prod = mult_mono(I2.basis.row(i), mons1[u], 3);
      for (auto& [c, v] : prod) phi3.set(c, i * g1 + u, v);
    }
  Subspace syz3 = kernel(Fp, phi3);
  // dim Syz_4 via the rank of (P_2)^k -> P_4 (equals dim I_4 under
  // quadratic generation, certified above)
  int64_t dim_I4 = static_cast<int64_t>(p4) - dimA(4);
  int64_t dim_syz4 = static_cast<int64_t>(kq) * p2 - dim_I4;
  // span of P_1 * Syz_3 inside (P_2)^k; always contained in Syz_4
  auto syz_row = [&](uint32_t r, uint32_t u) {
    SparseVec out;
    Multideg d2{2};
    for (auto& [c, v] : syz3.basis.row(r)) {
      uint32_t i = c / g1, w = c % g1;
      Expo prod = mons1[w];
      for (uint32_t q = 0; q < prod.size(); ++q) prod[q] += mons1[u][q];
      out.emplace_back(i * p2 + static_cast<uint32_t>(X_->P().monomial_index(d2, prod)), v);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  size_t span_rows = static_cast<size_t>(g1) * syz3.dim();
  uint64_t width = static_cast<uint64_t>(kq) * p2;
  if (span_rows <= 3000 && width <= 6000) {
    Echelon e(Fp, static_cast<uint32_t>(width));
    for (uint32_t u = 0; u < g1; ++u)
      for (uint32_t r = 0; r < syz3.dim(); ++r) e.add_row(syz_row(r, u));
    np.linear_syzygies = static_cast<int64_t>(e.rank()) == dim_syz4;
    return np;
  }
  // sketched certificate with column compression
  uint32_t ctarget = static_cast<uint32_t>(std::min<int64_t>(dim_syz4 + 48, width));
  ColSketch cs(Fp, static_cast<uint32_t>(width), ctarget, sketch_seed("linsyz-col", 0));
  RowSketch rs(Fp, ctarget, static_cast<uint32_t>(dim_syz4) + 32, sketch_seed("linsyz-row", 0));
  for (uint32_t u = 0; u < g1; ++u)
    for (uint32_t r = 0; r < syz3.dim(); ++r) rs.absorb(cs.apply(syz_row(r, u)));
  if (static_cast<int64_t>(rs.rank()) == dim_syz4) {
    np.linear_syzygies = true;
    return np;
  }
  // exact fallback
  Echelon e(Fp, static_cast<uint32_t>(width));
  for (uint32_t u = 0; u < g1; ++u)
    for (uint32_t r = 0; r < syz3.dim(); ++r) e.add_row(syz_row(r, u));
  np.linear_syzygies = static_cast<int64_t>(e.rank()) == dim_syz4;
  return np;
}

int64_t ConormalEngine::quadric_multiples_coker(uint32_t k) {
  const PrimeField& Fp = F();
  ATower& tw = X_->tower();
  SectionModel& model = tw.model();
  conormal_saturation(k + 2);
  const Subspace& I2 = ideal_piece(2);
  uint32_t bd = dimA(k + 1);
  Echelon quad(Fp, X_->n_vars() * bd);
  const auto& mons2 = X_->P().degree_basis(Multideg{2});
  for (uint32_t r = 0; r < I2.dim(); ++r) {
    Polynomial f(&X_->P());
    for (auto& [c, v] : I2.basis.row(r)) f.set_term(mons2[c], v);
    std::vector<std::vector<uint32_t>> wj(X_->n_vars());
    std::vector<bool> zero(X_->n_vars(), false);
    for (uint32_t j = 0; j < X_->n_vars(); ++j) {
      Polynomial dfj = partial_derivative(Fp, f, j);
      if (dfj.is_zero()) {
        zero[j] = true;
        continue;
      }
      wj[j] = tw.expand(1, tw.poly_coords_A(dfj, 1));
    }
    for (uint32_t i = 0; i < dimA(k); ++i) {
      std::vector<uint32_t> wt = tw.basis_target(k, i);
      SparseVec row;
      for (uint32_t j = 0; j < X_->n_vars(); ++j) {
        if (zero[j]) continue;
        std::vector<uint32_t> coords = tw.coords_of_target(k + 1, model.mult(wt, k, wj[j], 1));
        for (uint32_t t = 0; t < bd; ++t)
          if (coords[t]) row.emplace_back(j * bd + t, coords[t]);
      }
      std::sort(row.begin(), row.end());
      quad.add_row(row);
    }
  }
  const ConormalPiece& piece = conormal_saturation(k + 2);
  return static_cast<int64_t>(piece.dim_sat) - quad.rank();
}

int64_t ConormalEngine::saturated_square_deg3() {
  const PrimeField& Fp = F();
  const Subspace& I3 = ideal_piece(3);
  if (I3.dim() == 0) return 0;
  const GradedRing& P = X_->P();
  auto square_echelon = [&](uint32_t deg) {
    Echelon e(Fp, X_->dimP(deg));
    for (uint32_t a = 2; 2 * a <= deg; ++a) {
      uint32_t b = deg - a;
      const Subspace& Ia = ideal_piece(a);
      const Subspace& Ib = ideal_piece(b);
      const auto& monsa = P.degree_basis(Multideg{static_cast<int32_t>(a)});
      const auto& monsb = P.degree_basis(Multideg{static_cast<int32_t>(b)});
      for (uint32_t r = 0; r < Ia.dim(); ++r) {
        Polynomial fa(&P);
        for (auto& [c, v] : Ia.basis.row(r)) fa.set_term(monsa[c], v);
        for (uint32_t s = 0; s < Ib.dim(); ++s) {
          Polynomial fb(&P);
          for (auto& [c, v] : Ib.basis.row(s)) fb.set_term(monsb[c], v);
          e.add_row(poly_coords(P, Multideg{static_cast<int32_t>(deg)}, multiply(Fp, fa, fb)));
        }
      }
    }
    return e;
  };
  const auto& mons3 = P.degree_basis(Multideg{3});
  uint32_t prev = 0;  // dim of S_0 = (I^2)_3 cap I_3 = 0 in our setting
  std::vector<uint32_t> cur_dims;
  uint32_t last = prev;
  for (uint32_t m = 1; m <= opt_.m_cap; ++m) {
    Echelon sq = square_echelon(3 + m);
    const auto& monsm = P.degree_basis(Multideg{static_cast<int32_t>(m)});
    // kernel over I_3 coefficients with tracking
    uint64_t width = static_cast<uint64_t>(monsm.size()) * X_->dimP(3 + m);
    Echelon tracked(Fp, static_cast<uint32_t>(width) + I3.dim());
    for (uint32_t r = 0; r < I3.dim(); ++r) {
      Polynomial c3(&P);
      for (auto& [c, v] : I3.basis.row(r)) c3.set_term(mons3[c], v);
      SparseVec aug;
      for (uint32_t mi = 0; mi < monsm.size(); ++mi) {
        Polynomial prod = multiply(Fp, c3, monomial(P, monsm[mi]));
        std::vector<uint32_t> res =
            sq.residual(poly_coords(P, Multideg{static_cast<int32_t>(3 + m)}, prod));
        for (uint32_t t = 0; t < res.size(); ++t)
          if (res[t])
            aug.emplace_back(mi * X_->dimP(3 + m) + t, res[t]);
      }
      aug.emplace_back(static_cast<uint32_t>(width) + r, 1);
      tracked.add_row(aug);
    }
    tracked.make_reduced();
    uint32_t dim_m = 0;
    for (uint32_t pc : tracked.pivots_sorted())
      if (pc >= width) ++dim_m;
    if (m >= 2 && dim_m == last) return dim_m;
    last = dim_m;
  }
  throw UnstableError("UNSTABLE saturation of the ideal square at degree 3");
}

}  // namespace conormal
