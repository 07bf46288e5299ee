#include "conormal/elim.hpp"

#include <algorithm>
#include <cstring>

namespace conormal {

SparseVec to_sparse(const std::vector<uint32_t>& dense) {
  SparseVec v;
  for (uint32_t j = 0; j < dense.size(); ++j)
    if (dense[j]) v.emplace_back(j, dense[j]);
  return v;
}

std::vector<uint32_t> to_dense(const SparseVec& v, size_t width) {
  std::vector<uint32_t> d(width, 0);
  for (auto& [c, x] : v) d[c] = x;
  return d;
}

void Matrix::set(uint32_t r, uint32_t c, uint32_t v) {
  auto& row = rows_[r];
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const auto& e, uint32_t col) { return e.first < col; });
  if (it != row.end() && it->first == c) {
    if (v)
      it->second = v;
    else
      row.erase(it);
  } else if (v) {
    row.insert(it, {c, v});
  }
}

uint32_t Matrix::get(uint32_t r, uint32_t c) const {
  const auto& row = rows_[r];
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const auto& e, uint32_t col) { return e.first < col; });
  return (it != row.end() && it->first == c) ? it->second : 0;
}

void Matrix::append_row(SparseVec v) {
  rows_.push_back(std::move(v));
  ++n_rows_;
}

Matrix Matrix::transpose() const {
  Matrix t(n_cols_, n_rows_);
  for (uint32_t r = 0; r < n_rows_; ++r)
    for (auto& [c, v] : rows_[r]) t.rows_[c].emplace_back(r, v);
  return t;
}

size_t Matrix::nnz() const {
  size_t n = 0;
  for (auto& r : rows_) n += r.size();
  return n;
}

uint32_t Echelon::PivRow::at(uint32_t col) const {
  if (is_dense) return col < d.size() ? d[col] : 0;
  auto it = std::lower_bound(s.begin(), s.end(), col,
                             [](const auto& e, uint32_t c) { return e.first < c; });
  return (it != s.end() && it->first == col) ? it->second : 0;
}

Echelon::Echelon(const PrimeField& F, uint32_t width)
    : F_(F), width_(width), row_of_pivot_(width, -1) {}

int64_t Echelon::reduce_acc(std::vector<uint64_t>& acc, uint32_t from, bool stop_at_free) const {
  const uint32_t p = F_.p();
  const unsigned batch = F_.axpy_batch();
  unsigned pending = 0;
  for (uint32_t col = from; col < width_; ++col) {
    uint32_t v = F_.reduce(acc[col]);
    acc[col] = v;
    if (!v) continue;
    int32_t ri = row_of_pivot_[col];
    if (ri < 0) {
      if (stop_at_free) return col;
      continue;
    }
    const PivRow& pr = rows_[ri];
    uint32_t c = p - v;  // acc += c * row  ==  acc -= v * row (mod p)
    if (pr.is_dense) {
      const uint32_t* src = pr.d.data();
      uint64_t* dst = acc.data();
      for (uint32_t j = col + 1; j < width_; ++j) dst[j] += static_cast<uint64_t>(c) * src[j];
    } else {
      for (auto& [j, x] : pr.s)
        if (j > col) acc[j] += static_cast<uint64_t>(c) * x;
    }
    acc[col] = 0;
    if (++pending >= batch) {
      for (uint32_t j = col + 1; j < width_; ++j) acc[j] = F_.reduce(acc[j]);
      pending = 0;
    }
  }
  return -1;
}

void Echelon::store_row(std::vector<uint64_t>& acc, uint32_t lead) {
  const uint32_t inv = F_.inv(static_cast<uint32_t>(acc[lead]));
  PivRow pr;
  pr.pivot = lead;
  size_t nnz = 0;
  for (uint32_t j = lead; j < width_; ++j) {
    acc[j] = F_.mul(F_.reduce(acc[j]), inv);
    if (acc[j]) ++nnz;
  }
  pr.is_dense = nnz * 4 > width_;
  if (pr.is_dense) {
    pr.d.assign(width_, 0);
    for (uint32_t j = lead; j < width_; ++j) pr.d[j] = static_cast<uint32_t>(acc[j]);
  } else {
    pr.s.reserve(nnz);
    for (uint32_t j = lead; j < width_; ++j)
      if (acc[j]) pr.s.emplace_back(j, static_cast<uint32_t>(acc[j]));
  }
  row_of_pivot_[lead] = static_cast<int32_t>(rows_.size());
  rows_.push_back(std::move(pr));
  reduced_ = false;
}

bool Echelon::add_row(const SparseVec& v) {
  if (v.empty()) return false;
  scratch_.assign(width_, 0);
  for (auto& [c, x] : v) scratch_[c] = x;
  int64_t lead = reduce_acc(scratch_, v.front().first, true);
  if (lead < 0) return false;
  store_row(scratch_, static_cast<uint32_t>(lead));
  return true;
}

bool Echelon::add_dense(const std::vector<uint32_t>& v) {
  scratch_.assign(width_, 0);
  for (uint32_t j = 0; j < width_; ++j) scratch_[j] = v[j];
  int64_t lead = reduce_acc(scratch_, 0, true);
  if (lead < 0) return false;
  store_row(scratch_, static_cast<uint32_t>(lead));
  return true;
}

void Echelon::residual_inplace(std::vector<uint64_t>& acc) const {
  reduce_acc(acc, 0, false);
}

std::vector<uint32_t> Echelon::residual(const SparseVec& v) const {
  scratch_.assign(width_, 0);
  for (auto& [c, x] : v) scratch_[c] = x;
  if (!v.empty()) reduce_acc(scratch_, v.front().first, false);
  std::vector<uint32_t> out(width_);
  for (uint32_t j = 0; j < width_; ++j) out[j] = static_cast<uint32_t>(scratch_[j]);
  return out;
}

bool Echelon::contains(const SparseVec& v) const {
  if (v.empty()) return true;
  scratch_.assign(width_, 0);
  for (auto& [c, x] : v) scratch_[c] = x;
  reduce_acc(scratch_, v.front().first, false);
  for (uint32_t j = 0; j < width_; ++j)
    if (scratch_[j]) return false;
  return true;
}

void Echelon::make_reduced() {
  if (reduced_) return;
  // Rows in ascending pivot order; clear each row's tail at later pivots.
  std::vector<uint32_t> order = pivots_sorted();
  for (uint32_t pc : order) {
    PivRow& pr = rows_[row_of_pivot_[pc]];
    scratch_.assign(width_, 0);
    if (pr.is_dense)
      for (uint32_t j = pc; j < width_; ++j) scratch_[j] = pr.d[j];
    else
      for (auto& [j, x] : pr.s) scratch_[j] = x;
    bool dirty = false;
    for (uint32_t j = pc + 1; j < width_; ++j)
      if (scratch_[j] && row_of_pivot_[j] >= 0) {
        dirty = true;
        break;
      }
    if (!dirty) continue;
    reduce_acc(scratch_, pc + 1, false);
    scratch_[pc] = 1;
    size_t nnz = 0;
    for (uint32_t j = pc; j < width_; ++j)
      if (scratch_[j]) ++nnz;
    pr.is_dense = nnz * 4 > width_;
    pr.d.clear();
    pr.s.clear();
    if (pr.is_dense) {
      pr.d.assign(width_, 0);
      for (uint32_t j = pc; j < width_; ++j) pr.d[j] = static_cast<uint32_t>(scratch_[j]);
    } else {
      pr.s.reserve(nnz);
      for (uint32_t j = pc; j < width_; ++j)
        if (scratch_[j]) pr.s.emplace_back(j, static_cast<uint32_t>(scratch_[j]));
    }
  }
  reduced_ = true;
}

std::vector<uint32_t> Echelon::pivots_sorted() const {
  std::vector<uint32_t> piv;
  piv.reserve(rows_.size());
  for (auto& r : rows_) piv.push_back(r.pivot);
  std::sort(piv.begin(), piv.end());
  return piv;
}

SparseVec Echelon::row_sparse(uint32_t idx) const {
  const PivRow& pr = rows_[idx];
  if (!pr.is_dense) return pr.s;
  return to_sparse(pr.d);
}

Subspace Echelon::to_subspace() {
  make_reduced();
  Subspace s;
  s.ambient = width_;
  s.pivot_cols = pivots_sorted();
  s.basis = Matrix(rank(), width_);
  for (uint32_t i = 0; i < s.pivot_cols.size(); ++i)
    s.basis.set_row(i, row_sparse(row_of_pivot_[s.pivot_cols[i]]));
  return s;
}

std::vector<SparseVec> Echelon::kernel_vectors() {
  make_reduced();
  std::vector<uint32_t> piv = pivots_sorted();
  std::vector<SparseVec> out;
  uint32_t pi = 0;
  for (uint32_t f = 0; f < width_; ++f) {
    if (pi < piv.size() && piv[pi] == f) {
      ++pi;
      continue;
    }
    SparseVec v;
    for (uint32_t q = 0; q < pi; ++q) {
      uint32_t entry = rows_[row_of_pivot_[piv[q]]].at(f);
      if (entry) v.emplace_back(piv[q], F_.neg(entry));
    }
    v.emplace_back(f, 1);
    out.push_back(std::move(v));
  }
  return out;
}

Subspace rref_rows(const PrimeField& F, uint32_t width, const std::vector<SparseVec>& rows) {
  Echelon e(F, width);
  for (auto& r : rows) e.add_row(r);
  return e.to_subspace();
}

Subspace rref(const PrimeField& F, const Matrix& m) {
  Echelon e(F, m.n_cols());
  for (uint32_t r = 0; r < m.n_rows(); ++r) e.add_row(m.row(r));
  return e.to_subspace();
}

Subspace kernel(const PrimeField& F, const Matrix& m) {
  Echelon e(F, m.n_cols());
  for (uint32_t r = 0; r < m.n_rows(); ++r) e.add_row(m.row(r));
  auto kv = e.kernel_vectors();
  return rref_rows(F, m.n_cols(), kv);
}

uint32_t rank_of(const PrimeField& F, const Matrix& m) {
  Echelon e(F, m.n_cols());
  for (uint32_t r = 0; r < m.n_rows(); ++r) e.add_row(m.row(r));
  return e.rank();
}

// Zassenhaus: rows [a|a] and [b|0]; intersection appears in the right half of
// rows whose left half vanished.
Subspace intersect(const PrimeField& F, const Subspace& a, const Subspace& b) {
  if (a.ambient != b.ambient) throw Error("intersect: ambient dimension mismatch");
  const uint32_t n = a.ambient;
  Echelon e(F, 2 * n);
  for (uint32_t r = 0; r < a.dim(); ++r) {
    SparseVec v = a.basis.row(r);
    size_t k = v.size();
    v.reserve(2 * k);
    for (size_t i = 0; i < k; ++i) v.emplace_back(v[i].first + n, v[i].second);
    e.add_row(v);
  }
  for (uint32_t r = 0; r < b.dim(); ++r) e.add_row(b.basis.row(r));
  e.make_reduced();
  std::vector<SparseVec> meet;
  for (uint32_t pc : e.pivots_sorted()) {
    if (pc < n) continue;
    SparseVec right;
    for (auto& [c, v] : e.row_sparse(e.row_of_pivot(pc))) right.emplace_back(c - n, v);
    meet.push_back(std::move(right));
  }
  return rref_rows(F, n, meet);
}

bool contains(const PrimeField& F, const Subspace& s, const SparseVec& v) {
  for (auto& [c, x] : v)
    if (c >= s.ambient) throw Error("contains: vector dimension mismatch");
  Echelon e(F, s.ambient);
  for (uint32_t r = 0; r < s.dim(); ++r) e.add_row(s.basis.row(r));
  return e.contains(v);
}

std::optional<Matrix> solve(const PrimeField& F, const Matrix& m, const Matrix& target) {
  if (m.n_rows() != target.n_rows()) throw Error("solve: row count mismatch");
  const uint32_t n = m.n_cols(), t = target.n_cols();
  Echelon e(F, n + t);
  for (uint32_t r = 0; r < m.n_rows(); ++r) {
    SparseVec v = m.row(r);
    for (auto& [c, x] : target.row(r)) v.emplace_back(c + n, x);
    e.add_row(v);
  }
  e.make_reduced();
  for (uint32_t pc : e.pivots_sorted())
    if (pc >= n) return std::nullopt;
  Matrix x(n, t);
  for (uint32_t pc : e.pivots_sorted()) {
    for (auto& [c, v] : e.row_sparse(e.row_of_pivot(pc)))
      if (c >= n) x.set(pc, c - n, v);
  }
  return x;
}

}  // namespace conormal
