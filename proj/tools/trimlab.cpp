#include <iostream>

#include <CLI11.hpp>

#include "trimlab/cli/config.hpp"
#include "trimlab/cli/emit.hpp"
#include "trimlab/cli/experiments.hpp"

using namespace trimlab;

int main(int argc, char** argv) {
  CLI::App app{"Trimmed Anderson model laboratory"};
  std::string experiment, config_path;
  cli::Overrides o;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out, box, gamma;
  double g = 0, s = 0, eta = 0, energy = 0;
  std::vector<double> epsilon;
  std::size_t samples = 0;

  app.add_option("experiment", experiment, "verify | localize | wegner | anomalous | dynamics | couple | lattice-info")
      ->required();
  app.add_option("--config", config_path, "JSON configuration file");
  auto* o_seed = app.add_option("--seed", seed);
  auto* o_threads = app.add_option("--threads", threads, "worker threads (default: TRIMLAB_THREADS or all cores)");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_g = app.add_option("--g", g);
  auto* o_s = app.add_option("--s", s);
  auto* o_eta = app.add_option("--eta", eta);
  auto* o_energy = app.add_option("--energy", energy);
  auto* o_eps = app.add_option("--epsilon", epsilon)->delimiter(',');
  auto* o_samples = app.add_option("--samples", samples);
  auto* o_box = app.add_option("--box", box, "lo..hi per dimension, comma separated");
  auto* o_gamma = app.add_option("--gamma", gamma, "full | gamma1:k,m | gamma2:k | cell:<spec> | bernoulli:p");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*o_seed) o.seed = seed;
  if (*o_threads) o.threads = threads;
  if (*o_out) o.out = out;
  if (*o_g) o.g = g;
  if (*o_s) o.s = s;
  if (*o_eta) o.eta = eta;
  if (*o_energy) o.energy = energy;
  if (*o_eps) o.epsilon = epsilon;
  if (*o_samples) o.samples = samples;
  if (*o_box) o.box = box;
  if (*o_gamma) o.gamma = gamma;

  cli::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = cli::load_config(config_path);
    config.experiment = experiment;
    cli::apply(config, o);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  cli::ResultRecord rec;
  try {
    rec = cli::run(config);
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }

  try {
    for (const auto& p : cli::emit(rec)) std::cout << p << "\n";
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 1;
  }
  if (!rec.passed) {
    std::cerr << "check failed: " << rec.diagnostic << "\n";
    return 3;
  }
  return 0;
}
