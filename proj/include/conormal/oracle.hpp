#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "conormal/elim.hpp"
#include "conormal/ring.hpp"

namespace conormal {

// Linear map F^n -> F^m, row i = image of the i-th basis vector.
struct LinMap {
  uint32_t n = 0, m = 0;
  bool dense = false;
  std::vector<SparseVec> srows;
  std::vector<uint32_t> drows;  // n*m row-major when dense

  static LinMap from_rows(uint32_t m, std::vector<std::vector<uint32_t>> rows);
  uint32_t at(uint32_t i, uint32_t j) const;
  // y = x M
  std::vector<uint32_t> apply(const PrimeField& F, const std::vector<uint32_t>& x) const;
  void apply_acc(const PrimeField& F, const std::vector<uint32_t>& x,
                 std::vector<uint64_t>& acc, uint32_t acc_offset) const;
  // y = M w  (functional pullback)
  std::vector<uint32_t> apply_t(const PrimeField& F, const std::vector<uint32_t>& w) const;
};

// Realization of the restriction maps P_k -> Gamma(L^k): a coordinate target
// space W_k per degree with variable images and products, plus an optional
// per-degree quotient (reduction happens in target coordinates).
class SectionModel {
 public:
  virtual ~SectionModel() = default;
  virtual std::string realization() const = 0;
  // sampling realizations must show stable rank under point growth
  virtual bool saturation_checked() const { return false; }
  virtual uint32_t target_dim(uint32_t k) = 0;
  // coordinates of the unit section in W_0
  virtual std::vector<uint32_t> unit() = 0;
  // w in W_k times the image of variable j, reduced, in W_{k+1}
  virtual std::vector<uint32_t> mult_var(uint32_t j, uint32_t k,
                                         const std::vector<uint32_t>& w) = 0;
  // product W_a x W_b -> W_{a+b}, reduced
  virtual std::vector<uint32_t> mult(const std::vector<uint32_t>& wa, uint32_t a,
                                     const std::vector<uint32_t>& wb, uint32_t b) = 0;
};

// Substitution into a target graded ring, optionally modulo a per-degree
// subspace spanned by relation multiples.
class SymbolicModel : public SectionModel {
 public:
  SymbolicModel(const PrimeField& F, std::shared_ptr<const GradedRing> target,
                std::function<Multideg(uint32_t)> deg_of, std::vector<Polynomial> var_images,
                std::function<std::vector<Polynomial>(uint32_t)> quotient_gens = nullptr);

  std::string realization() const override { return "SYMBOLIC"; }
  uint32_t target_dim(uint32_t k) override;
  std::vector<uint32_t> unit() override;
  std::vector<uint32_t> mult_var(uint32_t j, uint32_t k, const std::vector<uint32_t>& w) override;
  std::vector<uint32_t> mult(const std::vector<uint32_t>& wa, uint32_t a,
                             const std::vector<uint32_t>& wb, uint32_t b) override;

 private:
  // full target piece dim and the quotient echelon for degree k
  struct Deg {
    size_t full_dim;
    std::vector<uint32_t> free_cols;           // complement of quotient pivots
    std::unique_ptr<Echelon> quot;             // null when no quotient
  };
  Deg& deg(uint32_t k);
  std::vector<uint32_t> project(uint32_t k, const Polynomial& p);
  Polynomial lift(uint32_t k, const std::vector<uint32_t>& w);

  const PrimeField& F_;
  std::shared_ptr<const GradedRing> target_;
  std::function<Multideg(uint32_t)> deg_of_;
  std::vector<Polynomial> images_;
  std::function<std::vector<Polynomial>(uint32_t)> qgens_;
  std::map<uint32_t, Deg> degs_;
  std::mutex mu_;
};

// Evaluation at a fixed list of points; W_k = F^{n_points} for every k,
// products are pointwise.
class PointsModel : public SectionModel {
 public:
  // points: rows of homogeneous coordinates (n_vars each); exact_scheme
  // marks point sets that ARE the variety (no saturation check applies)
  PointsModel(const PrimeField& F, std::vector<std::vector<uint32_t>> points, uint32_t n_vars,
              bool exact_scheme = false);

  std::string realization() const override { return "POINTS"; }
  bool saturation_checked() const override { return !exact_; }
  uint32_t target_dim(uint32_t) override { return n_points(); }
  uint32_t n_points() const { return static_cast<uint32_t>(zvals_.empty() ? 0 : zvals_[0].size()); }
  std::vector<uint32_t> unit() override {
    return std::vector<uint32_t>(n_points(), 1);
  }
  std::vector<uint32_t> mult_var(uint32_t j, uint32_t k, const std::vector<uint32_t>& w) override;
  std::vector<uint32_t> mult(const std::vector<uint32_t>& wa, uint32_t a,
                             const std::vector<uint32_t>& wb, uint32_t b) override;
  const std::vector<uint32_t>& var_values(uint32_t j) const { return zvals_[j]; }

 private:
  const PrimeField& F_;
  std::vector<std::vector<uint32_t>> zvals_;  // per variable, values at points
  bool exact_ = false;
};

// Inductively built coordinate tower for A = oplus A_k: canonical bases of
// A_k = image of P_k inside W_k, multiplication maps, monomial coordinates
// and ideal pieces. A is generated in degree one for every catalog model;
// the builder verifies rank saturation for POINTS models.
class ATower {
 public:
  ATower(const PrimeField& F, std::shared_ptr<SectionModel> model, uint32_t n_vars,
         std::shared_ptr<const GradedRing> source);

  const PrimeField& field() const { return F_; }
  SectionModel& model() { return *model_; }
  uint32_t n_vars() const { return n_vars_; }
  const GradedRing& source() const { return *source_; }

  uint32_t dimA(uint32_t k);
  // canonical basis of A_k inside W_k
  const Subspace& basis(uint32_t k);
  // expanded W_k coordinates of the i-th basis vector
  std::vector<uint32_t> basis_target(uint32_t k, uint32_t i);
  // A-coordinates of a target vector known to lie in A_k
  std::vector<uint32_t> coords_of_target(uint32_t k, const std::vector<uint32_t>& w);
  std::vector<uint32_t> expand(uint32_t k, const std::vector<uint32_t>& coords);

  // multiplication by variable j as a LinMap A_k -> A_{k+1}
  const LinMap& mult_map(uint32_t j, uint32_t k);
  // general class product
  std::vector<uint32_t> mult_class(const std::vector<uint32_t>& ca, uint32_t a,
                                   const std::vector<uint32_t>& cb, uint32_t b);

  // A_k-coordinates of every P_k monomial (degree-basis order); row-major
  // dimP_k x dimA_k
  const std::vector<std::vector<uint32_t>>& monomial_coords(uint32_t k);
  std::vector<uint32_t> poly_coords_A(const Polynomial& p, uint32_t k);
  // restriction matrix P_k -> A_k (n_rows = dimA_k, n_cols = dimP_k)
  Matrix restriction_matrix(uint32_t k);
  // I_k = kernel of the restriction, canonical
  const Subspace& ideal_piece(uint32_t k);

  // POINTS models: verify rank is unchanged on a 5/6 prefix of the points
  bool rank_saturated(uint32_t k);

 private:
  void build_to(uint32_t k);

  const PrimeField& F_;
  std::shared_ptr<SectionModel> model_;
  uint32_t n_vars_;
  std::shared_ptr<const GradedRing> source_;
  std::vector<Subspace> bases_;  // per degree
  std::map<std::pair<uint32_t, uint32_t>, LinMap> mults_;
  std::map<uint32_t, std::vector<std::vector<uint32_t>>> moncoords_;
  std::map<uint32_t, Subspace> ideals_;
  std::recursive_mutex mu_;
};

}  // namespace conormal
