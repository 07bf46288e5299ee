#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "conormal/elim.hpp"
#include "conormal/fp.hpp"

namespace conormal {

using Expo = std::vector<int32_t>;      // exponent vector, one entry per variable
using Multideg = std::vector<int32_t>;  // multidegree, length = grading rank

struct VarDecl {
  std::string name;
  Multideg deg;
};

// Polynomial ring with multidegree-tagged variables and deterministic
// monomial bases per degree (graded lex, descending on exponent vectors,
// in the declared variable order; fixed forever so cached coordinates
// stay valid).
class GradedRing {
 public:
  GradedRing(std::vector<VarDecl> vars, uint32_t grading_rank);

  static GradedRing standard(uint32_t n_vars, const std::string& prefix = "z");
  // x_0..x_n of degree (1,0), y_0..y_m of degree (0,1)
  static GradedRing bigraded(uint32_t nx, uint32_t ny);

  uint32_t n_vars() const { return static_cast<uint32_t>(vars_.size()); }
  uint32_t grading_rank() const { return rank_; }
  const VarDecl& var(uint32_t i) const { return vars_[i]; }

  Multideg monomial_degree(const Expo& e) const;

  const std::vector<Expo>& degree_basis(const Multideg& d) const;
  size_t degree_dim(const Multideg& d) const { return degree_basis(d).size(); }
  int64_t monomial_index(const Multideg& d, const Expo& e) const;

  std::string monomial_str(const Expo& e) const;

 private:
  struct DegData {
    std::vector<Expo> monomials;
    std::map<Expo, uint32_t> index;
  };
  const DegData& deg_data(const Multideg& d) const;
  void enumerate(Multideg rem, uint32_t from, Expo& cur, std::vector<Expo>& out) const;

  std::vector<VarDecl> vars_;
  uint32_t rank_;
  mutable std::map<Multideg, DegData> cache_;
  mutable std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
};

// Sparse polynomial over F_p in a GradedRing.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(const GradedRing* ring) : ring_(ring) {}

  const GradedRing* ring() const { return ring_; }
  const std::map<Expo, uint32_t>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const PrimeField& F, const Expo& e, uint32_t c);
  // insert a fresh term; caller guarantees c != 0 and e not already present
  void set_term(Expo e, uint32_t c) { terms_.emplace(std::move(e), c); }
  // multidegree if homogeneous (throws on mixed degrees or zero)
  Multideg degree() const;

  std::string str() const;

  bool operator==(const Polynomial&) const = default;

 private:
  const GradedRing* ring_ = nullptr;
  std::map<Expo, uint32_t> terms_;
};

Polynomial monomial(const GradedRing& R, Expo e, uint32_t c = 1);
Polynomial add(const PrimeField& F, const Polynomial& p, const Polynomial& q);
Polynomial scale(const PrimeField& F, const Polynomial& p, uint32_t c);
Polynomial multiply(const PrimeField& F, const Polynomial& p, const Polynomial& q);
Polynomial partial_derivative(const PrimeField& F, const Polynomial& p, uint32_t var);

// coordinates of a homogeneous polynomial in the degree basis
SparseVec poly_coords(const GradedRing& R, const Multideg& d, const Polynomial& p);
Polynomial coords_poly(const GradedRing& R, const Multideg& d, const SparseVec& v);

uint32_t eval_poly(const PrimeField& F, const Polynomial& p, const std::vector<uint32_t>& point);

// (h0, h1) of a direct sum of line bundles O(m) on P^1, m over `twists`.
struct H01 {
  int64_t h0 = 0, h1 = 0;
};
H01 p1_cohomology(const std::vector<int64_t>& twists);

// weights of S^a E (b) for E = O(e_1) + ... + O(e_d)
std::vector<int64_t> sym_twists(const std::vector<int>& e, int a, int b);

// Cox ring of the scroll X(e_1..e_d): y_i of degree (1, -e_i), then t_0, t_1
// of degree (0,1). Sections of O(aH + bR) are the bidegree (a, b) piece.
struct ScrollRing {
  std::vector<int> e;
  int f = 0;
  std::shared_ptr<GradedRing> ring;

  explicit ScrollRing(std::vector<int> e_in);
  Multideg bideg(int a, int b) const { return Multideg{a, b}; }
  size_t dim(int a, int b) const { return ring->degree_dim(bideg(a, b)); }
  int64_t h0(int a, int b) const { return p1_cohomology(sym_twists(e, a, b)).h0; }
};

}  // namespace conormal
