#pragma once

#include "conormal/conormal.hpp"

namespace conormal {

// Minimal presentation of the homogeneous ideal: f a row of quadrics, r a
// matrix of linear syzygies with f r = 0, columns spanning the degree-3
// syzygy space with P_1 r spanning the degree-4 one.
struct Presentation {
  uint32_t k = 0;                        // number of quadric generators
  uint32_t ell = 0;                      // number of linear syzygies
  std::vector<Polynomial> f;             // 1 x k, degree 2
  std::vector<std::vector<Polynomial>> r;  // k x ell, degree 1
  bool unvalidated = false;              // linear-syzygy hypothesis not enforced
};

enum class LiftStatus { FIRST_ORDER, SECOND_ORDER, TERMINATED, NO_LIFT };
const char* to_string(LiftStatus s);

struct DeformationState {
  const Presentation* pres = nullptr;
  std::vector<Polynomial> f1;              // 1 x k, linear entries
  std::vector<std::vector<uint32_t>> r1;   // k x ell constants
  std::vector<uint32_t> f2;                // 1 x k constants
  LiftStatus status = LiftStatus::FIRST_ORDER;
};

struct FlatnessReport {
  bool pass = false;
  int failed_degree = -1;
  std::vector<int64_t> quotient_dims;  // dim (P[t]/(F))_k for k = 0..k_max
  bool fiber_matches_ideal = true;     // t=0 fiber reproduces I_k
};

struct Extension {
  // generators F_i = f_i + t f1_i + t^2 f2_i, presented over P with the
  // t-parts split out
  const Presentation* pres = nullptr;
  std::vector<Polynomial> f1;
  std::vector<uint32_t> f2;
};

class DeformEngine {
 public:
  explicit DeformEngine(ConormalEngine& eng) : eng_(eng) {}

  // REJECT (throws) unless the quadrics present with linear syzygies;
  // unvalidated mode skips the hypothesis checks (Remark 7.2 usage)
  const Presentation& presentation(bool unvalidated = false);

  // span of the derivation rows (D f_1, ..., D f_k) over constant
  // derivations D = sum lambda_j d/dz_j
  Subspace trivial_first_order();

  // weight -1 first-order deformations: solutions f1 of f1 r + f r1 = 0
  // modulo the trivial derivations; canonical echelon representatives
  std::vector<DeformationState> first_order_space();
  int64_t first_order_dim();

  // solve f2 r = -f1 r1 with constant f2; asserts f2 r1 = 0 on success
  DeformationState second_order_lift(const DeformationState& state);

  Extension extension_ideal(const DeformationState& state);
  FlatnessReport flatness_check(const DeformationState& state, uint32_t k_max = 4);

  ConormalEngine& engine() { return eng_; }

 private:
  SparseVec f1_coords(const std::vector<Polynomial>& f1) const;
  std::vector<Polynomial> coords_f1(const SparseVec& v) const;
  // unique r1 with f r1 = -f1 r (columnwise reduction against the quadric
  // basis), or nullopt if some entry fails membership
  std::optional<std::vector<std::vector<uint32_t>>> solve_r1(const std::vector<Polynomial>& f1);

  ConormalEngine& eng_;
  std::optional<Presentation> pres_;
};

// The Example 7.3 surface: image of the plane under the degree-d forms
// through Z = C cap D (D a transversal cubic); a POINTS-realized surface in
// P^g whose hyperplane section z_F = 0 recovers the canonical curve.
struct PlaneExtension {
  VarietyPtr surface;
  uint32_t n_basis = 0;       // g + 1
  bool section_deg2_matches = false;
  bool section_deg3_matches = false;
  bool distinct_from_cone = false;
};

PlaneExtension plane_curve_extension(const FieldConfig& cfg, const PrimeField& F, int d,
                                     uint64_t seed);

}  // namespace conormal
