#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "mcslab/experiments.hpp"

namespace {

std::optional<unsigned> threads_from_env() {
  const char* value = std::getenv("MCSLAB_THREADS");
  if (!value || !*value) return std::nullopt;
  try {
    const long n = std::stol(value);
    if (n >= 1) return static_cast<unsigned>(n);
  } catch (const std::exception&) {
  }
  std::cerr << "ignoring MCSLAB_THREADS=" << value << " (expected a positive integer)\n";
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mcslab: manifold compressive sensing experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;

  for (const std::string& kind : mcs::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "seed (overrides the config)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }
  auto* validate = app.add_subcommand("validate", "validate a configuration and print it resolved");
  validate->add_option("--config", config_path, "JSON configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mcs::kExitConfigError;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string kind = chosen->get_name();
  try {
    if (kind == "validate") {
      const mcs::ExperimentConfig config = mcs::validate_config(config_path);
      std::cout << mcs::config_to_json(config);
      return mcs::kExitSuccess;
    }
    mcs::ExperimentConfig config = mcs::validate_config(config_path, kind);
    if (out_dir) config.output = *out_dir;
    if (seed) config.seed = *seed;
    if (threads)
      config.threads = *threads;
    else if (config.threads == 0)
      if (auto env = threads_from_env()) config.threads = *env;
    return mcs::run_experiment(config, std::cout, std::cerr);
  } catch (const mcs::ConfigError& e) {
    std::cerr << e.report();
    return mcs::kExitConfigError;
  } catch (const mcs::Error& e) {
    std::cerr << "error (" << mcs::to_string(e.code()) << "): " << e.what() << '\n';
    return mcs::kExitConfigError;
  }
}
