#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "conormal/oracle.hpp"
#include "conormal/ring.hpp"
#include "conormal/sketch.hpp"

namespace conormal {

// Parsed variety description: constructor:params[,key=value...] plus label
// and seed. Serializes bit-exactly.
struct VarietySpec {
  std::string label;
  std::string constructor;
  std::vector<int64_t> pos;
  std::vector<std::pair<std::string, std::vector<int64_t>>> kv;
  uint64_t seed = 0;

  static VarietySpec parse(const std::string& s, uint64_t seed = 0, std::string label = "");
  std::string params_string() const;
  std::string canonical() const;  // constructor:params

  static VarietySpec parse_file(const std::string& path);
  void write_file(const std::string& path) const;

  const std::vector<int64_t>* find(const std::string& key) const;
  uint64_t fingerprint(uint32_t prime) const;
};

struct VarietyMeta {
  std::string label;
  std::string constructor;
  std::string params;
  uint64_t seed = 0;
  int dim = -1;
  int64_t degree = -1;
  int genus = -1;
  bool validated = true;
  int degenerate_retries = 0;  // rejected candidate draws before success
  std::function<int64_t(uint32_t)> expected_h0;
};

// Scroll-curve payload (tetragonal: complete intersection of two divisors;
// pentagonal: Pfaffian locus of a skew 5x5 map).
struct ScrollCurveData {
  std::shared_ptr<ScrollRing> scroll;
  std::vector<int> a;  // pentagonal only
  std::vector<int> b;
  int genus = 0;
  std::vector<Polynomial> equations;              // g_i or the five Pfaffians
  std::vector<std::vector<Polynomial>> psi;       // pentagonal skew matrix
};

struct PlaneCurveData {
  std::shared_ptr<GradedRing> plane;  // three variables
  Polynomial curve;                   // smooth degree-d form
  int d = 0;
};

class EmbeddedVariety {
 public:
  using Sampler = std::function<std::vector<std::vector<uint32_t>>(uint32_t want, uint64_t seed)>;

  EmbeddedVariety(const PrimeField& F, std::shared_ptr<const GradedRing> source,
                  std::shared_ptr<SectionModel> model, VarietyMeta meta);

  const PrimeField& field() const { return F_; }
  uint32_t n_vars() const { return source_->n_vars(); }
  uint32_t N() const { return n_vars() - 1; }
  const GradedRing& P() const { return *source_; }
  std::shared_ptr<const GradedRing> source_ring() const { return source_; }
  ATower& tower() { return tower_; }
  const VarietyMeta& meta() const { return meta_; }

  uint32_t dimP(uint32_t k) const;
  uint32_t dimA(uint32_t k) { return tower_.dimA(k); }
  const Subspace& ideal_piece(uint32_t k) { return tower_.ideal_piece(k); }

  // minimal generators by degree (canonical pivot-column complements of
  // P_1 * I_{d-1} inside I_d)
  std::vector<std::pair<uint32_t, std::vector<Polynomial>>> minimal_generators(uint32_t d_max);

  void set_sampler(Sampler s) { sampler_ = std::move(s); }
  bool has_sampler() const { return static_cast<bool>(sampler_); }
  std::vector<std::vector<uint32_t>> sample_points(uint32_t want, uint64_t seed);

  std::shared_ptr<ScrollCurveData> scroll_data;
  std::shared_ptr<PlaneCurveData> plane_data;

 private:
  const PrimeField& F_;
  std::shared_ptr<const GradedRing> source_;
  VarietyMeta meta_;
  ATower tower_;
  Sampler sampler_;
  std::map<uint32_t, std::vector<Polynomial>> min_gens_;  // new generators per degree
  uint32_t min_gens_built_ = 1;
  std::mutex mu_;
};

using VarietyPtr = std::shared_ptr<EmbeddedVariety>;

enum class SpotCheck { PASS, FAIL, NO_POINTS_FOUND };
const char* to_string(SpotCheck s);

// Jacobian rank test (rank = codim) of the minimal generators through degree
// 3 at sampled points of X.
SpotCheck smoothness_spot_check(EmbeddedVariety& X, uint32_t n_points, uint64_t seed);
SpotCheck smoothness_at_points(EmbeddedVariety& X,
                               const std::vector<std::vector<uint32_t>>& points);

// Catalog constructors. Randomized ones draw integer data from the seed so
// every configured prime sees the same instance, validate against every
// prime in cfg, and retry (bounded) on DEGENERATE candidates.
VarietyPtr veronese(const PrimeField& F, int n, int r);
VarietyPtr segre(const PrimeField& F, int n, int m);
VarietyPtr scroll_variety(const PrimeField& F, std::vector<int> e);
VarietyPtr complete_intersection(const FieldConfig& cfg, const PrimeField& F, int N,
                                 std::vector<int> degrees, uint64_t seed);
VarietyPtr ci_from_forms(const PrimeField& F, std::shared_ptr<const GradedRing> source,
                         std::vector<Polynomial> forms, bool validated,
                         const std::string& label = "ci-explicit");
VarietyPtr plane_curve_canonical(const FieldConfig& cfg, const PrimeField& F, int d,
                                 uint64_t seed);
VarietyPtr tetragonal_curve(const FieldConfig& cfg, const PrimeField& F, std::vector<int> e,
                            int b1, int b2, uint64_t seed);
VarietyPtr pentagonal_curve(const FieldConfig& cfg, const PrimeField& F, std::vector<int> e,
                            std::vector<int> b, uint64_t seed);
// balanced instance for a genus (g >= 8, g not in {10, 15})
VarietyPtr pentagonal_for_genus(const FieldConfig& cfg, const PrimeField& F, int g,
                                uint64_t seed);
VarietyPtr grassmannian_g25(const PrimeField& F);
VarietyPtr grassmannian_g25_symbolic(const PrimeField& F);
VarietyPtr gorenstein_points5(const FieldConfig& cfg, const PrimeField& F, uint64_t seed);

VarietyPtr build_variety(const VarietySpec& spec, const FieldConfig& cfg, const PrimeField& F);

// sheaf cohomology of line bundles on the scroll carrying a pentagonal curve
// (dim X = 4), plus Euler characteristics of the curve-ideal resolution.
int64_t scroll_cohomology(const ScrollCurveData& data, int i, int j, int k);
int64_t chi_scroll(const ScrollCurveData& data, int j, int k);
int64_t chi_J_3H(const ScrollCurveData& data);

// F_p-points of a 0-dimensional projective scheme cut out by `gens` in a
// small polynomial ring (multiplication-operator eigenvalues).
std::vector<std::vector<uint32_t>> zero_dim_points(const PrimeField& F, const GradedRing& S,
                                                   const std::vector<Polynomial>& gens,
                                                   uint64_t seed);

int64_t binom(int64_t n, int64_t k);
uint32_t det_small(const PrimeField& F, std::vector<std::vector<uint32_t>> m);

}  // namespace conormal
