// sizechaos: run one experiment config and write its report files.
//
// exit codes: 0 ok, 1 usage or config error, 2 runtime failure, 3 audit failure

#include <CLI11.hpp>

#include <iostream>

#include "chaos/cli.hpp"
#include "chaos/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Size-of-chaos experiments for mean-field particle systems"};
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "report directory (overrides the config's \"out\")");
  app.add_option("--threads", threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.set_version_flag("--version", chaos::cli::kToolVersion);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  chaos::cli::ExperimentConfig config;
  try {
    config = chaos::cli::parse_config_file(config_path);
    if (seed) {
      config.seed = *seed;
      if (config.sim) config.sim->seed = *seed;
    }
  } catch (const chaos::cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  if (out_dir.empty()) out_dir = config.out_dir.value_or(".");

  try {
    const auto report = chaos::cli::execute(config, chaos::resolve_threads(threads));
    const auto files = chaos::cli::write_report(report, out_dir);
    for (const auto& f : files) std::cout << f.string() << '\n';
    std::cout << report.command << " " << report.config_hash << " payload " << report.payload_hash()
              << (report.audit_pass ? " pass" : " AUDIT FAILURE") << '\n';
    return report.audit_pass ? 0 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
