#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conormal/variety.hpp"

namespace conormal {

// The Euler-sequence model of Gamma(Omega^1_P|_X (k)): tuples c in
// A_{k-1}^{N+1} with sum_j z_j c_j = 0 in A_k. Basis rows live in block
// coordinates (block j = one copy of A_{k-1}).
struct EulerSpace {
  uint32_t k = 0;
  uint32_t blocks = 0;      // N+1
  uint32_t block_dim = 0;   // dim A_{k-1}
  uint32_t ambient = 0;     // blocks * block_dim
  std::vector<SparseVec> basis;  // deterministic (not canonically reduced)
  bool contraction_surjective = false;
  uint32_t dim() const { return static_cast<uint32_t>(basis.size()); }
  Subspace canonical(const PrimeField& F) const;
};

// Saturation state of the Jacobian submodule piece N_k inside M_k.
struct ConormalPiece {
  uint32_t k = 0;
  uint32_t dim_N = 0;
  uint32_t dim_sat = 0;
  int stabilization_m = -1;  // multiplier degree where the chain stabilized
  bool unstable = false;     // m_cap hit without stabilization
  bool certified = false;    // fast one-sided certificate concluded Sat = N
  bool cached = false;       // loaded from the subspace cache
  uint32_t h1() const { return dim_sat - dim_N; }
};

// Storage hook for canonical subspaces keyed by (quantity, degree); the
// CLI backs it with a checksummed on-disk cache.
struct SubspaceCache {
  virtual ~SubspaceCache() = default;
  virtual std::optional<Subspace> load(const std::string& quantity, uint32_t degree) = 0;
  virtual void store(const std::string& quantity, uint32_t degree, const Subspace& s) = 0;
};

enum class StarVerdict { HOLDS, FAILS, INCONCLUSIVE };
const char* to_string(StarVerdict v);

struct StarReport {
  std::map<uint32_t, int64_t> h1_by_degree;
  StarVerdict verdict = StarVerdict::INCONCLUSIVE;
  std::vector<uint32_t> primes_used;
  bool unlucky_prime = false;
};

struct TProfiles {
  int64_t t1_minus1 = -1;                 // dim T^1 in weight -1 = corank of Phi_K
  std::map<int32_t, int64_t> t2_by_degree;  // degree -> dim T^2
  bool inconclusive = false;
};

struct NormalPresentation {
  bool quadratic_generation = false;
  bool linear_syzygies = false;
};

// Per-(variety, prime) computation engine with shared caches. A second
// engine over a retry prime is materialized on demand to confirm nonzero
// dimensions.
struct ConormalOptions {
  uint32_t window = 2;  // consecutive equal saturation dims required
  uint32_t m_cap = 6;
  uint64_t seed = 0;    // sketch seed component
};

class ConormalEngine {
 public:
  using Options = ConormalOptions;

  explicit ConormalEngine(VarietyPtr X, Options opt = Options{});

  EmbeddedVariety& variety() { return *X_; }
  const Options& options() const { return opt_; }

  // --- degree pieces -------------------------------------------------------
  const Subspace& ideal_piece(uint32_t k) { return X_->ideal_piece(k); }
  uint32_t dimA(uint32_t k) { return X_->dimA(k); }

  // kernel of the multiplication A_a (x) A_b -> A_{a+b} (pair basis in
  // lexicographic order)
  Subspace r1_kernel(uint32_t a, uint32_t b);

  const EulerSpace& euler_space(uint32_t k);

  // image in M_k of a tensor sum s_i (x) t_i with s_i in P_1, t_i in
  // P_{k-1}, mu(T) in I_k; entries c_j = sum_i s_i dt_i/dz_j mod I
  std::vector<uint32_t> gaussian_to_euler(uint32_t k,
                                          const std::vector<std::pair<Polynomial, Polynomial>>& T);

  // N_k = sum over minimal generators f of A_{k-deg f} * df, as an echelon
  const Echelon& jacobian_echelon(uint32_t k);
  uint32_t dim_N(uint32_t k);
  Subspace jacobian_piece(uint32_t k);  // canonical form of N_k

  const ConormalPiece& conormal_saturation(uint32_t k);
  // returns the confirmed value; nonzero values are recomputed under the
  // next configured prime
  int64_t h1_ideal_square(uint32_t k);

  StarReport star_check(uint32_t k_max);

  // kernel / corank of the Gaussian wedge map through the Euler model
  Subspace gaussian_wedge_kernel();
  int64_t wedge_kernel_dim();
  int64_t canonical_gaussian_corank();

  TProfiles t_profiles(uint32_t k_max);

  NormalPresentation normal_presentation_check(uint32_t d_max);

  // dim coker( I_2 (x) A_k -> Sat_{k+2} ) via quadric Jacobian multiples;
  // equals h1(I^2(k+2)) for normally presented X
  int64_t quadric_multiples_coker(uint32_t k);

  // degree-3 piece of the saturation of I^2 inside P (the torsion of I/I^2
  // in degree 3); dimension of {c in I_3 : all degree-m monomial multiples
  // lie in the polynomial span of I^2}
  int64_t saturated_square_deg3();

  // Sat_k as a canonical subspace of the Euler ambient
  Subspace saturation_subspace(uint32_t k);

  // span of quadric-generator multiples inside I_d has full dimension
  bool quadric_generation_at(uint32_t d);

  // access to the sibling engine over the next retry prime (for tests)
  ConormalEngine* confirm_engine();

  bool unlucky_prime_flagged() const { return unlucky_; }
  const FieldConfig& config() const { return cfg_; }
  void set_config(FieldConfig cfg) { cfg_ = std::move(cfg); }
  void attach_cache(std::shared_ptr<SubspaceCache> cache) { cache_ = std::move(cache); }

 private:
  friend class DeformEngine;
  const PrimeField& F() const { return X_->field(); }
  uint64_t sketch_seed(const char* tag, uint64_t salt) const;
  int64_t r1_kernel_dim_check(uint32_t k);
  // true if the fast certificate proves S_1 = N_k
  bool saturation_step_certified(uint32_t k);
  std::vector<SparseVec> saturation_step_exact(uint32_t k,
                                               const std::vector<SparseVec>& cur,
                                               uint32_t m);
  // residual rows of wedge generators modulo Sat_2 (shared by the wedge
  // kernel and corank computations)
  const std::pair<int64_t, int64_t>& wedge_rank_data();  // (kernel dim, rank)

  VarietyPtr X_;
  Options opt_;
  FieldConfig cfg_;
  bool unlucky_ = false;

  std::map<uint32_t, EulerSpace> euler_;
  std::map<uint32_t, std::unique_ptr<Echelon>> njac_;
  std::map<uint32_t, ConormalPiece> sat_;
  std::map<uint32_t, std::vector<SparseVec>> sat_basis_;
  std::optional<std::pair<int64_t, int64_t>> wedge_data_;
  std::unique_ptr<ConormalEngine> confirm_;
  std::shared_ptr<PrimeField> owned_field_;
  std::shared_ptr<SubspaceCache> cache_;
  uint32_t confirm_depth_ = 0;  // position in the prime rotation
  std::recursive_mutex mu_;
};

}  // namespace conormal
