// Command line front end: forward simulation, inversion from stored data,
// the empirical stability sweep and the self-check suite.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "egv/config.hpp"
#include "egv/run.hpp"

namespace {

egv::RunConfig load_or_default(const std::string& path) {
  if (path.empty()) {
    egv::RunConfig cfg;
    egv::validate_config(cfg);
    return cfg;
  }
  return egv::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elasto-gravitational forward runs and source recovery"};
  app.require_subcommand(1);

  std::string config_path;
  std::string outdir = "out";
  std::string input_path;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "run configuration file (key = value lines)");
    sub->add_option("-o,--outdir", outdir, "output directory")->capture_default_str();
    sub->add_option("-j,--threads", threads, "worker thread count (0 = runtime default)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "forward run: states, trace, diagnostics");
  add_common(sim);
  CLI::App* inv = app.add_subcommand("invert", "recover the source from a state or trace file");
  add_common(inv);
  inv->add_option("-i,--input", input_path, "state (.egv) or gravity trace (.csv) file")
      ->required();
  CLI::App* swp = app.add_subcommand("sweep", "perturbation sweep for the stability ratio");
  add_common(swp);
  CLI::App* ver = app.add_subcommand("verify", "cross-check suite against independent oracles");
  add_common(ver);

  CLI11_PARSE(app, argc, argv);

  try {
    egv::RunConfig cfg = load_or_default(config_path);
    if (threads > 0) cfg.threads = threads;
    if (sim->parsed()) return egv::cmd_simulate(cfg, outdir, std::cout);
    if (inv->parsed()) return egv::cmd_invert(cfg, input_path, outdir, std::cout);
    if (swp->parsed()) return egv::cmd_sweep(cfg, outdir, std::cout);
    if (ver->parsed()) return egv::cmd_verify(cfg, outdir, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
