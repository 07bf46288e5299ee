#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "conormal/report.hpp"

using namespace conormal;

static RunConfig small_cfg() {
  RunConfig cfg;
  cfg.field.retry_primes = {1073741783u};
  cfg.k_max = 4;
  return cfg;
}

TEST_CASE("run config validation") {
  RunConfig cfg = small_cfg();
  cfg.validate();
  cfg.jobs = 0;
  CHECK_THROWS(cfg.validate());
  cfg = small_cfg();
  cfg.field.prime = 999983;  // prime but too small
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("reports are deterministic functions of config and seed") {
  RunConfig cfg = small_cfg();
  cfg.seed = 42;
  Runner r1(cfg), r2(cfg);
  VarietySpec spec = VarietySpec::parse("tetragonal:2,2,1,b=1,2", cfg.seed);
  InstanceResult a = r1.run_star(spec, 4);
  InstanceResult b = r2.run_star(spec, 4);
  CHECK(a.record["dims"] == b.record["dims"]);
  CHECK(a.record["verdicts"] == b.record["verdicts"]);
  CHECK(a.record["flags"] == b.record["flags"]);
  // schema essentials
  Json wrapped = r1.wrap({a});
  CHECK(wrapped["schema_version"] == 1);
  CHECK(wrapped["config"]["prime"] == cfg.field.prime);
  CHECK(wrapped["instances"][0]["label"] == "tetragonal:2,2,1,b=1,2");
  CHECK(wrapped["instances"][0]["dims"]["h1_ideal_square"]["3"] == 1);
}

TEST_CASE("cache hits never change reported dimensions") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "conormal_cache_test";
  fs::remove_all(dir);
  RunConfig cfg = small_cfg();
  cfg.cache_dir = dir.string();
  VarietySpec spec = VarietySpec::parse("veronese:2,2", 0);
  Runner r1(cfg);
  InstanceResult cold = r1.run_star(spec, 4);
  CHECK(fs::exists(dir));
  CHECK(!fs::is_empty(dir));
  Runner r2(cfg);
  InstanceResult warm = r2.run_star(spec, 4);
  CHECK(cold.record["dims"] == warm.record["dims"]);
  // corrupt every cache entry: results must still be identical (recomputed)
  for (auto& e : fs::directory_iterator(dir)) {
    std::ofstream f(e.path(), std::ios::binary | std::ios::trunc);
    f << "garbage";
  }
  Runner r3(cfg);
  InstanceResult rec = r3.run_star(spec, 4);
  CHECK(cold.record["dims"] == rec.record["dims"]);
  fs::remove_all(dir);
}

TEST_CASE("subspace cache round trip") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "conormal_cache_rt";
  fs::remove_all(dir);
  DiskCache cache(dir.string());
  PrimeField F(small_cfg().field.prime);
  Splitmix rng(5);
  Matrix m(6, 12);
  for (uint32_t r = 0; r < 6; ++r)
    for (uint32_t c = 0; c < 12; ++c)
      if (rng.below(3) == 0) m.set(r, c, rng.field_nonzero(F));
  Subspace s = rref(F, m);
  cache.store(0xabcdef, "njac", 3, F.p(), s);
  auto back = cache.load(0xabcdef, "njac", 3, F.p());
  REQUIRE(back.has_value());
  CHECK(*back == s);
  CHECK_FALSE(cache.load(0xabcdef, "njac", 4, F.p()).has_value());
  CHECK_FALSE(cache.load(0xabcde0, "njac", 3, F.p()).has_value());
  fs::remove_all(dir);
}

TEST_CASE("gaussian and t2 runners") {
  RunConfig cfg = small_cfg();
  Runner r(cfg);
  InstanceResult g = r.run_gaussian(VarietySpec::parse("veronese:1,4"));
  CHECK(g.record["dims"]["wedge_kernel"] == 3);
  CHECK(g.record["dims"]["h1_ideal_square_2"] == 3);
  InstanceResult t = r.run_t2(VarietySpec::parse("ci:3,2,3", 7), 4);
  CHECK(t.record["dims"]["t1_weight_minus1"] == 9);
  for (auto& [k, v] : t.record["dims"]["t2_by_degree"].items()) CHECK(v == 0);
}

TEST_CASE("quick catalog suite aggregates and exits cleanly") {
  RunConfig cfg = small_cfg();
  cfg.jobs = 2;
  Runner r(cfg);
  int exit_code = -1;
  Json j = r.run_catalog("quick", exit_code);
  CHECK(exit_code == 0);
  CHECK(j["instances"].size() == 4);
  CHECK(j["suite"] == "quick");
  CHECK(!j.contains("errors"));
  CHECK_THROWS(r.run_catalog("nope", exit_code));
}

TEST_CASE("bad variety specs raise errors") {
  RunConfig cfg = small_cfg();
  Runner r(cfg);
  CHECK_THROWS(r.run_star(VarietySpec::parse("nonsense:1"), 3));
  CHECK_THROWS(VarietySpec::parse(""));
}

TEST_CASE("an exhausted saturation cap reports INCONCLUSIVE with exit code 2") {
  RunConfig cfg = small_cfg();
  cfg.m_cap = 1;  // the torsion chain cannot show a stable window
  Runner r(cfg);
  InstanceResult res = r.run_star(VarietySpec::parse("tetragonal:2,2,1,b=1,2", 3), 3);
  CHECK(res.exit_code == 2);
  CHECK(res.record["verdicts"]["star"] == "INCONCLUSIVE");
  bool flagged = false;
  for (auto& f : res.record["flags"])
    if (f == "UNSTABLE") flagged = true;
  CHECK(flagged);
}
