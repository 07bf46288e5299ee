#include "conormal/report.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace conormal {

std::string tool_version() { return "0.1.0"; }

void RunConfig::validate() const {
  field.validate();
  if (k_max == 0 || window == 0 || m_cap == 0 || retry_budget == 0 || jobs == 0)
    throw Error("run config: numeric fields must be positive");
}

Json RunConfig::to_json() const {
  Json j;
  j["prime"] = field.prime;
  j["retry_primes"] = field.retry_primes;
  j["k_max"] = k_max;
  j["window"] = window;
  j["m_cap"] = m_cap;
  j["retry_budget"] = retry_budget;
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["cache_dir"] = cache_dir;
  return j;
}

// ---------------------------------------------------------------------------
// disk cache

static constexpr uint32_t kCacheMagic = 0x434e5342;  // "CNSB"
static constexpr uint32_t kCacheVersion = 1;

DiskCache::DiskCache(std::string dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string DiskCache::path_for(uint64_t fp, const std::string& quantity, uint32_t degree,
                                uint32_t prime) const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016llx-%s-%u-%u.bin",
                static_cast<unsigned long long>(fp), quantity.c_str(), degree, prime);
  return (std::filesystem::path(dir_) / buf).string();
}

static void put_u32(std::string& s, uint32_t v) { s.append(reinterpret_cast<char*>(&v), 4); }
static void put_u64(std::string& s, uint64_t v) { s.append(reinterpret_cast<char*>(&v), 8); }

void DiskCache::store(uint64_t fp, const std::string& quantity, uint32_t degree, uint32_t prime,
                      const Subspace& s) const {
  std::string payload;
  put_u64(payload, fp);
  put_u32(payload, degree);
  put_u32(payload, prime);
  put_u32(payload, s.ambient);
  put_u32(payload, s.dim());
  for (uint32_t p : s.pivot_cols) put_u32(payload, p);
  for (uint32_t r = 0; r < s.dim(); ++r) {
    const SparseVec& row = s.basis.row(r);
    put_u32(payload, static_cast<uint32_t>(row.size()));
    for (auto& [c, v] : row) {
      put_u32(payload, c);
      put_u32(payload, v);
    }
  }
  std::string blob;
  put_u32(blob, kCacheMagic);
  put_u32(blob, kCacheVersion);
  put_u64(blob, fnv1a(payload.data(), payload.size()));
  blob += payload;
  std::string path = path_for(fp, quantity, degree, prime);
  std::string tmp = path + ".tmp" + std::to_string(
      std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  }
  std::filesystem::rename(tmp, path);
}

std::optional<Subspace> DiskCache::load(uint64_t fp, const std::string& quantity, uint32_t degree,
                                        uint32_t prime) const {
  std::ifstream in(path_for(fp, quantity, degree, prime), std::ios::binary);
  if (!in) return std::nullopt;
  std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  size_t off = 0;
  auto get_u32 = [&](uint32_t& v) {
    if (off + 4 > blob.size()) return false;
    std::memcpy(&v, blob.data() + off, 4);
    off += 4;
    return true;
  };
  auto get_u64 = [&](uint64_t& v) {
    if (off + 8 > blob.size()) return false;
    std::memcpy(&v, blob.data() + off, 8);
    off += 8;
    return true;
  };
  uint32_t magic = 0, version = 0;
  uint64_t checksum = 0;
  if (!get_u32(magic) || magic != kCacheMagic) return std::nullopt;
  if (!get_u32(version) || version != kCacheVersion) return std::nullopt;
  if (!get_u64(checksum)) return std::nullopt;
  if (fnv1a(blob.data() + off, blob.size() - off) != checksum) return std::nullopt;
  uint64_t fp_in = 0;
  uint32_t deg_in = 0, prime_in = 0, ambient = 0, dim = 0;
  if (!get_u64(fp_in) || fp_in != fp) return std::nullopt;
  if (!get_u32(deg_in) || deg_in != degree) return std::nullopt;
  if (!get_u32(prime_in) || prime_in != prime) return std::nullopt;
  if (!get_u32(ambient) || !get_u32(dim)) return std::nullopt;
  Subspace s;
  s.ambient = ambient;
  s.basis = Matrix(dim, ambient);
  s.pivot_cols.resize(dim);
  for (uint32_t i = 0; i < dim; ++i)
    if (!get_u32(s.pivot_cols[i])) return std::nullopt;
  for (uint32_t r = 0; r < dim; ++r) {
    uint32_t n = 0;
    if (!get_u32(n)) return std::nullopt;
    SparseVec row;
    row.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
      uint32_t c = 0, v = 0;
      if (!get_u32(c) || !get_u32(v)) return std::nullopt;
      if (c >= ambient || v == 0) return std::nullopt;
      row.emplace_back(c, v);
    }
    s.basis.set_row(r, std::move(row));
  }
  return s;
}

namespace {
class BoundCache : public SubspaceCache {
 public:
  BoundCache(std::shared_ptr<DiskCache> disk, uint64_t fp, uint32_t prime)
      : disk_(std::move(disk)), fp_(fp), prime_(prime) {}
  std::optional<Subspace> load(const std::string& quantity, uint32_t degree) override {
    return disk_->load(fp_, quantity, degree, prime_);
  }
  void store(const std::string& quantity, uint32_t degree, const Subspace& s) override {
    disk_->store(fp_, quantity, degree, prime_, s);
  }

 private:
  std::shared_ptr<DiskCache> disk_;
  uint64_t fp_;
  uint32_t prime_;
};
}  // namespace

// ---------------------------------------------------------------------------
// runner

Runner::Built Runner::build(const VarietySpec& spec) {
  Built b;
  b.field = std::make_shared<PrimeField>(cfg_.field.prime);
  b.variety = build_variety(spec, cfg_.field, *b.field);
  ConormalOptions opt;
  opt.window = cfg_.window;
  opt.m_cap = cfg_.m_cap;
  opt.seed = cfg_.seed;
  b.engine = std::make_shared<ConormalEngine>(b.variety, opt);
  b.engine->set_config(cfg_.field);
  if (!cfg_.cache_dir.empty()) {
    auto disk = std::make_shared<DiskCache>(cfg_.cache_dir);
    b.engine->attach_cache(
        std::make_shared<BoundCache>(disk, spec.fingerprint(cfg_.field.prime), cfg_.field.prime));
  }
  return b;
}

static Json record_header(const VarietySpec& spec, const EmbeddedVariety& X) {
  Json j;
  j["label"] = spec.label;
  j["constructor"] = spec.constructor;
  j["params"] = spec.params_string();
  j["seed"] = spec.seed;
  if (X.meta().genus > 0) j["genus"] = X.meta().genus;
  if (X.meta().degenerate_retries > 0) j["degenerate_retries"] = X.meta().degenerate_retries;
  return j;
}

InstanceResult Runner::run_star(const VarietySpec& spec, uint32_t k_max) {
  auto t0 = std::chrono::steady_clock::now();
  Built b = build(spec);
  InstanceResult res;
  res.label = spec.label;
  res.spec = spec;
  Json j = record_header(spec, *b.variety);
  Json table;
  table["0"] = 0;
  table["1"] = 0;
  // degrees 0 and 1 are computed, not assumed
  for (uint32_t k = 0; k <= 1; ++k)
    if (b.engine->h1_ideal_square(k) != 0) throw Error("nonzero h1 below degree 2");
  table["2"] = b.engine->wedge_kernel_dim();
  StarReport rep = b.engine->star_check(k_max);
  for (auto& [k, h] : rep.h1_by_degree) table[std::to_string(k)] = h;
  j["dims"]["h1_ideal_square"] = table;
  j["verdicts"]["star"] = to_string(rep.verdict);
  j["primes_used"] = rep.primes_used;
  Json flags = Json::array();
  if (rep.unlucky_prime) flags.push_back("UNLUCKY_PRIME");
  if (rep.verdict == StarVerdict::INCONCLUSIVE) flags.push_back("UNSTABLE");
  if (b.variety->meta().degenerate_retries > 0) flags.push_back("DEGENERATE");
  j["flags"] = flags;
  j["timings_ms"]["total"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
  res.record = std::move(j);
  res.exit_code = rep.verdict == StarVerdict::INCONCLUSIVE ? 2 : 0;
  return res;
}

InstanceResult Runner::run_gaussian(const VarietySpec& spec) {
  auto t0 = std::chrono::steady_clock::now();
  Built b = build(spec);
  InstanceResult res;
  res.label = spec.label;
  res.spec = spec;
  Json j = record_header(spec, *b.variety);
  int64_t wk = b.engine->wedge_kernel_dim();
  j["dims"]["wedge_kernel"] = wk;
  j["dims"]["h1_ideal_square_2"] = b.engine->h1_ideal_square(2);
  if (b.variety->meta().genus > 0 &&
      b.variety->n_vars() == static_cast<uint32_t>(b.variety->meta().genus))
    j["dims"]["gaussian_corank"] = b.engine->canonical_gaussian_corank();
  Json flags = Json::array();
  if (b.engine->unlucky_prime_flagged()) flags.push_back("UNLUCKY_PRIME");
  if (b.variety->meta().degenerate_retries > 0) flags.push_back("DEGENERATE");
  j["flags"] = flags;
  j["timings_ms"]["total"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
  res.record = std::move(j);
  return res;
}

InstanceResult Runner::run_t2(const VarietySpec& spec, uint32_t k_max) {
  auto t0 = std::chrono::steady_clock::now();
  Built b = build(spec);
  InstanceResult res;
  res.label = spec.label;
  res.spec = spec;
  Json j = record_header(spec, *b.variety);
  TProfiles t = b.engine->t_profiles(k_max);
  j["dims"]["t1_weight_minus1"] = t.t1_minus1;
  Json t2;
  for (auto& [deg, v] : t.t2_by_degree) t2[std::to_string(deg)] = v;
  j["dims"]["t2_by_degree"] = t2;
  Json flags = Json::array();
  if (t.inconclusive) flags.push_back("UNSTABLE");
  if (b.engine->unlucky_prime_flagged()) flags.push_back("UNLUCKY_PRIME");
  if (b.variety->meta().degenerate_retries > 0) flags.push_back("DEGENERATE");
  j["flags"] = flags;
  j["timings_ms"]["total"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
  res.record = std::move(j);
  res.exit_code = t.inconclusive ? 2 : 0;
  return res;
}

InstanceResult Runner::run_extend(const VarietySpec& spec) {
  auto t0 = std::chrono::steady_clock::now();
  Built b = build(spec);
  InstanceResult res;
  res.label = spec.label;
  res.spec = spec;
  Json j = record_header(spec, *b.variety);
  DeformEngine de(*b.engine);
  const Presentation& pr = de.presentation();
  j["presentation"]["quadrics"] = pr.k;
  j["presentation"]["linear_syzygies"] = pr.ell;
  auto states = de.first_order_space();
  j["dims"]["first_order"] = states.size();
  bool any_no_lift = false, all_terminated = true, all_flat = true;
  Json lifts = Json::array();
  for (auto& st : states) {
    DeformationState lifted = de.second_order_lift(st);
    Json lj;
    lj["status"] = to_string(lifted.status);
    if (lifted.status == LiftStatus::TERMINATED) {
      FlatnessReport fr = de.flatness_check(lifted, 4);
      lj["flatness"] = fr.pass ? "PASS" : "FAIL";
      lj["fiber_matches_ideal"] = fr.fiber_matches_ideal;
      if (!fr.pass) all_flat = false;
      Extension ext = de.extension_ideal(lifted);
      Json gens = Json::array();
      for (uint32_t i = 0; i < pr.k; ++i) {
        std::string s = pr.f[i].str();
        if (!ext.f1[i].is_zero()) s += " + t*(" + ext.f1[i].str() + ")";
        if (ext.f2[i]) s += " + t^2*" + std::to_string(ext.f2[i]);
        gens.push_back(s);
      }
      if (lifts.empty()) lj["generators"] = gens;  // serialize one representative
    } else {
      all_terminated = false;
      if (lifted.status == LiftStatus::NO_LIFT) any_no_lift = true;
    }
    lifts.push_back(lj);
  }
  j["lifts"] = lifts;
  j["verdicts"]["all_terminated"] = all_terminated;
  j["verdicts"]["flatness"] = all_flat ? "PASS" : "FAIL";
  // Example 7.3 direct construction for canonical plane curves
  if (spec.constructor == "plane-canonical") {
    PrimeField& Fp = *b.field;
    PlaneExtension ext = plane_curve_extension(cfg_.field, Fp, static_cast<int>(spec.pos[0]),
                                               spec.seed);
    j["surface"]["basis_dim"] = ext.n_basis;
    j["surface"]["section_deg2_matches"] = ext.section_deg2_matches;
    j["surface"]["section_deg3_matches"] = ext.section_deg3_matches;
    j["surface"]["distinct_from_cone"] = ext.distinct_from_cone;
  }
  j["timings_ms"]["total"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
  res.record = std::move(j);
  res.exit_code = any_no_lift ? 3 : 0;
  return res;
}

Json Runner::wrap(const std::vector<InstanceResult>& results) const {
  Json j;
  j["schema_version"] = 1;
  j["tool"]["name"] = "conormal";
  j["tool"]["version"] = tool_version();
  j["config"] = cfg_.to_json();
  Json arr = Json::array();
  for (auto& r : results) arr.push_back(r.record);
  j["instances"] = arr;
  return j;
}

struct SuiteItem {
  std::string op;  // star | gaussian | t2 | extend
  std::string spec;
  uint32_t k_max;
};

static std::vector<SuiteItem> suite_items(const std::string& name) {
  if (name == "quick")
    return {
        {"star", "veronese:1,3", 5},
        {"star", "ci:3,2,3", 5},
        {"gaussian", "veronese:1,4", 0},
        {"star", "points5", 4},
    };
  if (name == "acceptance")
    return {
        {"star", "veronese:1,2", 6},
        {"star", "veronese:1,3", 6},
        {"star", "veronese:1,4", 6},
        {"star", "veronese:2,2", 6},
        {"star", "veronese:2,3", 6},
        {"gaussian", "veronese:1,3", 0},
        {"gaussian", "veronese:1,4", 0},
        {"gaussian", "veronese:1,5", 0},
        {"star", "g25", 5},
        {"star", "points5", 4},
        {"star", "ci:3,2,3", 6},
        {"star", "ci:4,2,2,2", 6},
        {"star", "tetragonal:2,1,1,b=1,1", 5},
        {"star", "tetragonal:2,2,1,b=1,2", 5},
        {"star", "tetragonal:2,1,1,b=0,2", 5},
        {"star", "pentagonal:g=8", 5},
        {"star", "pentagonal:g=9", 5},
        {"t2", "pentagonal:g=8", 4},
        {"gaussian", "plane-canonical:7", 0},
        {"star", "plane-canonical:7", 4},
        {"extend", "plane-canonical:7", 0},
    };
  throw Error("unknown catalog suite '" + name + "'");
}

Json Runner::run_catalog(const std::string& suite, int& exit_code) {
  std::vector<SuiteItem> items = suite_items(suite);
  std::vector<InstanceResult> results(items.size());
  std::vector<int> codes(items.size(), 0);
  std::mutex err_mu;
  std::vector<std::string> errors;
  std::atomic<size_t> next{0};
  auto work = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= items.size()) break;
      const SuiteItem& it = items[i];
      try {
        VarietySpec spec = VarietySpec::parse(it.spec, cfg_.seed);
        InstanceResult r;
        if (it.op == "star")
          r = run_star(spec, it.k_max);
        else if (it.op == "gaussian")
          r = run_gaussian(spec);
        else if (it.op == "t2")
          r = run_t2(spec, it.k_max);
        else
          r = run_extend(spec);
        r.record["op"] = it.op;
        results[i] = std::move(r);
        codes[i] = results[i].exit_code;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(err_mu);
        errors.push_back(it.spec + ": " + e.what());
        codes[i] = 1;
      }
    }
  };
  uint32_t jobs = std::min<uint32_t>(cfg_.jobs, static_cast<uint32_t>(items.size()));
  if (jobs <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (uint32_t t = 0; t < jobs; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  Json j = wrap(results);
  j["suite"] = suite;
  if (!errors.empty()) j["errors"] = errors;
  exit_code = 0;
  for (int c : codes) exit_code = std::max(exit_code, c);
  return j;
}

}  // namespace conormal
