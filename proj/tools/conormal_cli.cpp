#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "conormal/report.hpp"

using namespace conormal;

namespace {

VarietySpec parse_variety(const std::string& arg, uint64_t seed) {
  if (!arg.empty() && arg[0] == '@') return VarietySpec::parse_file(arg.substr(1));
  VarietySpec s = VarietySpec::parse(arg, seed);
  return s;
}

void emit(const RunConfig& cfg, const Json& j) {
  std::string text = j.dump(2);
  if (cfg.out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(cfg.out_path);
    if (!out) throw Error("cannot open output path " + cfg.out_path);
    out << text << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact verification of H^1(I_X^2(k)) vanishing, Gaussian coranks, "
               "T^1/T^2 profiles and canonical-curve extensions over a prime field"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env = std::getenv("CONORMAL_CACHE_DIR")) cfg.cache_dir = env;
  std::string variety, suite = "quick";
  uint32_t kmax_flag = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_variety) {
    if (needs_variety)
      cmd->add_option("--variety,-v", variety, "constructor:params[,key=value...] or @file")
          ->required();
    cmd->add_option("--kmax", kmax_flag, "highest twist degree (default from config: 6)");
    cmd->add_option("--prime", cfg.field.prime, "working prime (must exceed 10^6)");
    cmd->add_option("--seed", cfg.seed, "instance seed");
    cmd->add_option("--jobs", cfg.jobs, "parallel instances for catalog runs");
    cmd->add_option("--cache-dir", cfg.cache_dir, "subspace cache directory");
    cmd->add_option("--out", cfg.out_path, "write the JSON report here instead of stdout");
    cmd->add_option("--window", cfg.window, "saturation stabilization window");
    cmd->add_option("--mcap", cfg.m_cap, "saturation multiplier cap");
  };

  CLI::App* star = app.add_subcommand("star", "h1(I^2(k)) table and the vanishing verdict");
  add_common(star, true);
  CLI::App* gaussian = app.add_subcommand("gaussian", "Gaussian wedge kernel and corank");
  add_common(gaussian, true);
  CLI::App* t2 = app.add_subcommand("t2", "graded T^1/T^2 profile of the cone");
  add_common(t2, true);
  CLI::App* extend = app.add_subcommand("extend", "first-order lifts, termination, flatness");
  add_common(extend, true);
  CLI::App* catalog = app.add_subcommand("catalog", "run a named suite of instances");
  catalog->add_option("suite", suite, "suite name: quick | acceptance");
  add_common(catalog, false);

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.validate();
    if (kmax_flag) cfg.k_max = kmax_flag;
    Runner runner(cfg);
    int exit_code = 0;
    if (app.got_subcommand(catalog)) {
      Json j = runner.run_catalog(suite, exit_code);
      emit(cfg, j);
      return exit_code;
    }
    VarietySpec spec = parse_variety(variety, cfg.seed);
    InstanceResult r;
    if (app.got_subcommand(star))
      r = runner.run_star(spec, cfg.k_max);
    else if (app.got_subcommand(gaussian))
      r = runner.run_gaussian(spec);
    else if (app.got_subcommand(t2))
      r = runner.run_t2(spec, cfg.k_max);
    else
      r = runner.run_extend(spec);
    emit(cfg, runner.wrap({r}));
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
