#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "conormal/fp.hpp"

namespace conormal {

// Sorted (col, value) pairs, values nonzero.
using SparseVec = std::vector<std::pair<uint32_t, uint32_t>>;

SparseVec to_sparse(const std::vector<uint32_t>& dense);
std::vector<uint32_t> to_dense(const SparseVec& v, size_t width);

// Sparse matrix: per-row sorted column lists, no stored zeros.
class Matrix {
 public:
  Matrix() = default;
  Matrix(uint32_t n_rows, uint32_t n_cols) : n_rows_(n_rows), n_cols_(n_cols), rows_(n_rows) {}

  uint32_t n_rows() const { return n_rows_; }
  uint32_t n_cols() const { return n_cols_; }

  void set(uint32_t r, uint32_t c, uint32_t v);
  uint32_t get(uint32_t r, uint32_t c) const;
  const SparseVec& row(uint32_t r) const { return rows_[r]; }
  void set_row(uint32_t r, SparseVec v) { rows_[r] = std::move(v); }
  void append_row(SparseVec v);

  Matrix transpose() const;
  size_t nnz() const;

  bool operator==(const Matrix&) const = default;

 private:
  uint32_t n_rows_ = 0, n_cols_ = 0;
  std::vector<SparseVec> rows_;
};

// A linear subspace of F^ambient held by its canonical reduced-row-echelon
// basis. Equal subspaces produce bit-identical representations.
struct Subspace {
  uint32_t ambient = 0;
  Matrix basis;
  std::vector<uint32_t> pivot_cols;

  uint32_t dim() const { return basis.n_rows(); }
  bool operator==(const Subspace&) const = default;
};

// Incremental row eliminator over F_p. Deterministic pivoting: a row's pivot
// is its leftmost surviving column, rows are processed in insertion order.
// Pivot rows are kept sparse until fill passes 1/4 of the width, then dense.
class Echelon {
 public:
  Echelon(const PrimeField& F, uint32_t width);

  uint32_t width() const { return width_; }
  uint32_t rank() const { return static_cast<uint32_t>(rows_.size()); }

  // Returns true if the row was independent (rank grew).
  bool add_row(const SparseVec& v);
  bool add_dense(const std::vector<uint32_t>& v);

  bool contains(const SparseVec& v) const;
  // Fully reduced representative of v modulo the row space.
  std::vector<uint32_t> residual(const SparseVec& v) const;
  void residual_inplace(std::vector<uint64_t>& acc) const;

  // Back-substitute so every pivot column is zero in the other rows.
  void make_reduced();
  bool reduced() const { return reduced_; }

  std::vector<uint32_t> pivots_sorted() const;
  // Canonical subspace; calls make_reduced() internally.
  Subspace to_subspace();

  // Basis of {x : R x = 0} for the reduced row matrix R, one vector per free
  // column in ascending order. Each vector: unit at its free column, entries
  // at earlier pivot columns.
  std::vector<SparseVec> kernel_vectors();

  // Row of the pivot for a column, -1 if the column is free.
  int32_t row_of_pivot(uint32_t col) const { return row_of_pivot_[col]; }
  SparseVec row_sparse(uint32_t idx) const;
  uint32_t pivot_of_row(uint32_t idx) const { return rows_[idx].pivot; }

 private:
  struct PivRow {
    uint32_t pivot;
    bool is_dense;
    std::vector<uint32_t> d;
    SparseVec s;
    uint32_t at(uint32_t col) const;
  };

  // Reduce acc against pivot rows scanning columns in [from, width); stops at
  // the first nonzero column without a pivot if stop_at_free.
  int64_t reduce_acc(std::vector<uint64_t>& acc, uint32_t from, bool stop_at_free) const;
  void store_row(std::vector<uint64_t>& acc, uint32_t lead);

  const PrimeField& F_;
  uint32_t width_;
  std::vector<PivRow> rows_;
  std::vector<int32_t> row_of_pivot_;
  bool reduced_ = true;
  mutable std::vector<uint64_t> scratch_;
};

// exactalg operations (canonical results).
Subspace rref(const PrimeField& F, const Matrix& m);
Subspace rref_rows(const PrimeField& F, uint32_t width, const std::vector<SparseVec>& rows);
Subspace kernel(const PrimeField& F, const Matrix& m);
Subspace intersect(const PrimeField& F, const Subspace& a, const Subspace& b);
bool contains(const PrimeField& F, const Subspace& s, const SparseVec& v);
// Any solution of m x = target, columnwise; free coordinates set to zero.
std::optional<Matrix> solve(const PrimeField& F, const Matrix& m, const Matrix& target);

uint32_t rank_of(const PrimeField& F, const Matrix& m);

}  // namespace conormal
