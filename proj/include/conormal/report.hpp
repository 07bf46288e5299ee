#pragma once

#include <json.hpp>

#include "conormal/deform.hpp"

namespace conormal {

using Json = nlohmann::ordered_json;

// Runner configuration (CLI-facing). All dimensions in reports are exact
// integers; re-running with the same config and seed reproduces them
// bit-exactly.
struct RunConfig {
  FieldConfig field = FieldConfig::defaults();
  uint32_t k_max = 6;
  uint32_t window = 2;
  uint32_t m_cap = 6;
  uint32_t retry_budget = 8;
  uint64_t seed = 0;
  uint32_t jobs = 1;
  std::string cache_dir;  // empty: disabled
  std::string out_path;   // empty: stdout

  void validate() const;
  Json to_json() const;
};

// Versioned binary cache of canonical subspaces keyed by
// (variety fingerprint, quantity, degree, prime); corrupt entries are
// recomputed, not trusted.
class DiskCache {
 public:
  explicit DiskCache(std::string dir);
  std::optional<Subspace> load(uint64_t fingerprint, const std::string& quantity, uint32_t degree,
                               uint32_t prime) const;
  void store(uint64_t fingerprint, const std::string& quantity, uint32_t degree, uint32_t prime,
             const Subspace& s) const;

 private:
  std::string path_for(uint64_t fingerprint, const std::string& quantity, uint32_t degree,
                       uint32_t prime) const;
  std::string dir_;
};

struct InstanceResult {
  std::string label;
  VarietySpec spec;
  Json record;  // per-instance report payload
  int exit_code = 0;
};

class Runner {
 public:
  Runner(RunConfig cfg) : cfg_(std::move(cfg)) {}

  InstanceResult run_star(const VarietySpec& spec, uint32_t k_max);
  InstanceResult run_gaussian(const VarietySpec& spec);
  InstanceResult run_t2(const VarietySpec& spec, uint32_t k_max);
  InstanceResult run_extend(const VarietySpec& spec);
  // named suite ("acceptance" | "quick"); instances fan out over cfg.jobs
  Json run_catalog(const std::string& suite, int& exit_code);

  Json wrap(const std::vector<InstanceResult>& results) const;
  const RunConfig& config() const { return cfg_; }

 private:
  struct Built {
    std::shared_ptr<PrimeField> field;
    VarietyPtr variety;
    std::shared_ptr<ConormalEngine> engine;
  };
  Built build(const VarietySpec& spec);

  RunConfig cfg_;
};

std::string tool_version();

}  // namespace conormal
