#include "conormal/oracle.hpp"

#include <algorithm>
#include <cassert>

namespace conormal {

LinMap LinMap::from_rows(uint32_t m, std::vector<std::vector<uint32_t>> rows) {
  LinMap lm;
  lm.n = static_cast<uint32_t>(rows.size());
  lm.m = m;
  size_t nnz = 0;
  for (auto& r : rows)
    for (uint32_t v : r)
      if (v) ++nnz;
  lm.dense = nnz * 4 > static_cast<size_t>(lm.n) * m;
  if (lm.dense) {
    lm.drows.reserve(static_cast<size_t>(lm.n) * m);
    for (auto& r : rows) lm.drows.insert(lm.drows.end(), r.begin(), r.end());
  } else {
    lm.srows.reserve(lm.n);
    for (auto& r : rows) lm.srows.push_back(to_sparse(r));
  }
  return lm;
}

uint32_t LinMap::at(uint32_t i, uint32_t j) const {
  if (dense) return drows[static_cast<size_t>(i) * m + j];
  auto& row = srows[i];
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const auto& e, uint32_t c) { return e.first < c; });
  return (it != row.end() && it->first == j) ? it->second : 0;
}

void LinMap::apply_acc(const PrimeField& F, const std::vector<uint32_t>& x,
                       std::vector<uint64_t>& acc, uint32_t off) const {
  unsigned pending = 0;
  const unsigned batch = F.axpy_batch();
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t c = x[i];
    if (!c) continue;
    if (dense) {
      const uint32_t* row = &drows[static_cast<size_t>(i) * m];
      for (uint32_t j = 0; j < m; ++j) acc[off + j] += static_cast<uint64_t>(c) * row[j];
    } else {
      for (auto& [j, v] : srows[i]) acc[off + j] += static_cast<uint64_t>(c) * v;
    }
    if (++pending >= batch) {
      for (uint32_t j = 0; j < m; ++j) acc[off + j] = F.reduce(acc[off + j]);
      pending = 0;
    }
  }
  for (uint32_t j = 0; j < m; ++j) acc[off + j] = F.reduce(acc[off + j]);
}

std::vector<uint32_t> LinMap::apply(const PrimeField& F, const std::vector<uint32_t>& x) const {
  std::vector<uint64_t> acc(m, 0);
  apply_acc(F, x, acc, 0);
  std::vector<uint32_t> y(m);
  for (uint32_t j = 0; j < m; ++j) y[j] = static_cast<uint32_t>(acc[j]);
  return y;
}

std::vector<uint32_t> LinMap::apply_t(const PrimeField& F, const std::vector<uint32_t>& w) const {
  std::vector<uint32_t> y(n, 0);
  const unsigned batch = F.axpy_batch();
  for (uint32_t i = 0; i < n; ++i) {
    uint64_t acc = 0;
    unsigned pending = 0;
    if (dense) {
      const uint32_t* row = &drows[static_cast<size_t>(i) * m];
      for (uint32_t j = 0; j < m; ++j) {
        acc += static_cast<uint64_t>(row[j]) * w[j];
        if (++pending >= batch) {
          acc = F.reduce(acc);
          pending = 0;
        }
      }
    } else {
      for (auto& [j, v] : srows[i]) {
        acc += static_cast<uint64_t>(v) * w[j];
        if (++pending >= batch) {
          acc = F.reduce(acc);
          pending = 0;
        }
      }
    }
    y[i] = F.reduce(acc);
  }
  return y;
}

SymbolicModel::SymbolicModel(const PrimeField& F, std::shared_ptr<const GradedRing> target,
                             std::function<Multideg(uint32_t)> deg_of,
                             std::vector<Polynomial> var_images,
                             std::function<std::vector<Polynomial>(uint32_t)> quotient_gens)
    : F_(F),
      target_(std::move(target)),
      deg_of_(std::move(deg_of)),
      images_(std::move(var_images)),
      qgens_(std::move(quotient_gens)) {}

SymbolicModel::Deg& SymbolicModel::deg(uint32_t k) {
  std::lock_guard<std::mutex> lk(mu_);
  auto it = degs_.find(k);
  if (it != degs_.end()) return it->second;
  Deg d;
  Multideg md = deg_of_(k);
  d.full_dim = target_->degree_dim(md);
  if (qgens_) {
    std::vector<Polynomial> gens = qgens_(k);
    if (!gens.empty()) {
      d.quot = std::make_unique<Echelon>(F_, static_cast<uint32_t>(d.full_dim));
      for (auto& g : gens)
        if (!g.is_zero()) d.quot->add_row(poly_coords(*target_, md, g));
    }
  }
  return degs_.emplace(k, std::move(d)).first->second;
}

uint32_t SymbolicModel::target_dim(uint32_t k) { return static_cast<uint32_t>(deg(k).full_dim); }

std::vector<uint32_t> SymbolicModel::project(uint32_t k, const Polynomial& p) {
  Deg& d = deg(k);
  SparseVec v = poly_coords(*target_, deg_of_(k), p);
  if (!d.quot) return to_dense(v, d.full_dim);
  return d.quot->residual(v);
}

Polynomial SymbolicModel::lift(uint32_t k, const std::vector<uint32_t>& w) {
  return coords_poly(*target_, deg_of_(k), to_sparse(w));
}

std::vector<uint32_t> SymbolicModel::unit() {
  Polynomial one = monomial(*target_, Expo(target_->n_vars(), 0), 1);
  return project(0, one);
}

std::vector<uint32_t> SymbolicModel::mult_var(uint32_t j, uint32_t k,
                                              const std::vector<uint32_t>& w) {
  return project(k + 1, multiply(F_, lift(k, w), images_[j]));
}

std::vector<uint32_t> SymbolicModel::mult(const std::vector<uint32_t>& wa, uint32_t a,
                                          const std::vector<uint32_t>& wb, uint32_t b) {
  return project(a + b, multiply(F_, lift(a, wa), lift(b, wb)));
}

PointsModel::PointsModel(const PrimeField& F, std::vector<std::vector<uint32_t>> points,
                         uint32_t n_vars, bool exact_scheme)
    : F_(F), exact_(exact_scheme) {
  zvals_.assign(n_vars, std::vector<uint32_t>(points.size()));
  for (size_t p = 0; p < points.size(); ++p) {
    if (points[p].size() != n_vars) throw Error("point coordinate count mismatch");
    for (uint32_t j = 0; j < n_vars; ++j) zvals_[j][p] = points[p][j];
  }
}

std::vector<uint32_t> PointsModel::mult_var(uint32_t j, uint32_t, const std::vector<uint32_t>& w) {
  std::vector<uint32_t> out(w.size());
  const auto& z = zvals_[j];
  for (size_t i = 0; i < w.size(); ++i) out[i] = F_.mul(w[i], z[i]);
  return out;
}

std::vector<uint32_t> PointsModel::mult(const std::vector<uint32_t>& wa, uint32_t,
                                        const std::vector<uint32_t>& wb, uint32_t) {
  std::vector<uint32_t> out(wa.size());
  for (size_t i = 0; i < wa.size(); ++i) out[i] = F_.mul(wa[i], wb[i]);
  return out;
}

ATower::ATower(const PrimeField& F, std::shared_ptr<SectionModel> model, uint32_t n_vars,
               std::shared_ptr<const GradedRing> source)
    : F_(F), model_(std::move(model)), n_vars_(n_vars), source_(std::move(source)) {}

void ATower::build_to(uint32_t k) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (bases_.empty()) {
    std::vector<uint32_t> u = model_->unit();
    Echelon e(F_, static_cast<uint32_t>(u.size()));
    e.add_dense(u);
    bases_.push_back(e.to_subspace());
  }
  while (bases_.size() <= k) {
    uint32_t kk = static_cast<uint32_t>(bases_.size()) - 1;
    const Subspace& prev = bases_[kk];
    Echelon e(F_, model_->target_dim(kk + 1));
    for (uint32_t j = 0; j < n_vars_; ++j)
      for (uint32_t i = 0; i < prev.dim(); ++i) {
        std::vector<uint32_t> w = to_dense(prev.basis.row(i), prev.ambient);
        e.add_dense(model_->mult_var(j, kk, w));
      }
    bases_.push_back(e.to_subspace());
    if (model_->saturation_checked() && !rank_saturated(kk + 1))
      throw Error("POINTS oracle: evaluation rank not saturated at degree " +
                  std::to_string(kk + 1));
  }
}

uint32_t ATower::dimA(uint32_t k) {
  build_to(k);
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return bases_[k].dim();
}

const Subspace& ATower::basis(uint32_t k) {
  build_to(k);
  return bases_[k];
}

std::vector<uint32_t> ATower::basis_target(uint32_t k, uint32_t i) {
  const Subspace& b = basis(k);
  return to_dense(b.basis.row(i), b.ambient);
}

std::vector<uint32_t> ATower::coords_of_target(uint32_t k, const std::vector<uint32_t>& w) {
  const Subspace& b = basis(k);
  std::vector<uint32_t> c(b.dim());
  for (uint32_t i = 0; i < b.dim(); ++i) c[i] = w[b.pivot_cols[i]];
  return c;
}

std::vector<uint32_t> ATower::expand(uint32_t k, const std::vector<uint32_t>& coords) {
  const Subspace& b = basis(k);
  std::vector<uint64_t> acc(b.ambient, 0);
  const unsigned batch = F_.axpy_batch();
  unsigned pending = 0;
  for (uint32_t i = 0; i < b.dim(); ++i) {
    if (!coords[i]) continue;
    for (auto& [c, v] : b.basis.row(i)) acc[c] += static_cast<uint64_t>(coords[i]) * v;
    if (++pending >= batch) {
      for (auto& a : acc) a = F_.reduce(a);
      pending = 0;
    }
  }
  std::vector<uint32_t> out(b.ambient);
  for (uint32_t j = 0; j < b.ambient; ++j) out[j] = F_.reduce(acc[j]);
  return out;
}

const LinMap& ATower::mult_map(uint32_t j, uint32_t k) {
  build_to(k + 1);
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto key = std::make_pair(j, k);
  auto it = mults_.find(key);
  if (it != mults_.end()) return it->second;
  const Subspace& b = bases_[k];
  std::vector<std::vector<uint32_t>> rows;
  rows.reserve(b.dim());
  for (uint32_t i = 0; i < b.dim(); ++i) {
    std::vector<uint32_t> w = to_dense(b.basis.row(i), b.ambient);
    rows.push_back(coords_of_target(k + 1, model_->mult_var(j, k, w)));
  }
  return mults_.emplace(key, LinMap::from_rows(bases_[k + 1].dim(), std::move(rows)))
      .first->second;
}

std::vector<uint32_t> ATower::mult_class(const std::vector<uint32_t>& ca, uint32_t a,
                                         const std::vector<uint32_t>& cb, uint32_t b) {
  std::vector<uint32_t> wa = expand(a, ca);
  std::vector<uint32_t> wb = expand(b, cb);
  return coords_of_target(a + b, model_->mult(wa, a, wb, b));
}

const std::vector<std::vector<uint32_t>>& ATower::monomial_coords(uint32_t k) {
  build_to(k);
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = moncoords_.find(k);
  if (it != moncoords_.end()) return it->second;
  std::vector<std::vector<uint32_t>> out;
  const auto& mons = source_->degree_basis(Multideg{static_cast<int32_t>(k)});
  if (k == 0) {
    out.push_back(std::vector<uint32_t>{1});
  } else {
    const auto& lower = monomial_coords(k - 1);
    const auto& lmons = source_->degree_basis(Multideg{static_cast<int32_t>(k - 1)});
    (void)lmons;
    out.reserve(mons.size());
    for (const Expo& e : mons) {
      uint32_t j = 0;
      while (e[j] == 0) ++j;
      Expo e2 = e;
      e2[j] -= 1;
      int64_t idx = source_->monomial_index(Multideg{static_cast<int32_t>(k - 1)}, e2);
      out.push_back(mult_map(j, k - 1).apply(F_, lower[static_cast<size_t>(idx)]));
    }
  }
  return moncoords_.emplace(k, std::move(out)).first->second;
}

std::vector<uint32_t> ATower::poly_coords_A(const Polynomial& p, uint32_t k) {
  const auto& mc = monomial_coords(k);
  std::vector<uint64_t> acc(dimA(k), 0);
  Multideg d{static_cast<int32_t>(k)};
  const unsigned batch = F_.axpy_batch();
  unsigned pending = 0;
  for (auto& [e, c] : p.terms()) {
    int64_t idx = source_->monomial_index(d, e);
    if (idx < 0) throw Error("polynomial term outside degree piece");
    const auto& row = mc[static_cast<size_t>(idx)];
    for (size_t i = 0; i < row.size(); ++i) acc[i] += static_cast<uint64_t>(c) * row[i];
    if (++pending >= batch) {
      for (auto& a : acc) a = F_.reduce(a);
      pending = 0;
    }
  }
  std::vector<uint32_t> out(acc.size());
  for (size_t i = 0; i < acc.size(); ++i) out[i] = F_.reduce(acc[i]);
  return out;
}

Matrix ATower::restriction_matrix(uint32_t k) {
  const auto& mc = monomial_coords(k);
  uint32_t ta = dimA(k);
  Matrix m(ta, static_cast<uint32_t>(mc.size()));
  for (uint32_t col = 0; col < mc.size(); ++col)
    for (uint32_t row = 0; row < ta; ++row)
      if (mc[col][row]) m.set(row, col, mc[col][row]);
  return m;
}

const Subspace& ATower::ideal_piece(uint32_t k) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = ideals_.find(k);
  if (it != ideals_.end()) return it->second;
  Matrix m = restriction_matrix(k);
  return ideals_.emplace(k, kernel(F_, m)).first->second;
}

bool ATower::rank_saturated(uint32_t k) {
  if (!model_->saturation_checked()) return true;
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const Subspace& b = bases_[k];
  uint32_t trunc = b.ambient * 5 / 6;
  if (b.dim() > trunc) return false;
  Echelon e(F_, trunc);
  for (uint32_t i = 0; i < b.dim(); ++i) {
    SparseVec v;
    for (auto& [c, x] : b.basis.row(i))
      if (c < trunc) v.emplace_back(c, x);
    e.add_row(v);
  }
  return e.rank() == b.dim();
}

}  // namespace conormal
