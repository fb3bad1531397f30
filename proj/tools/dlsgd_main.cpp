// Command line front end: run, compare, sweep, bounds, spectra.
//
// Exit codes: 0 success, 2 config error, 3 divergence, 4 dataset/parse error,
// 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dlsgd/config.hpp"
#include "dlsgd/error.hpp"
#include "dlsgd/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitData = 4;

struct Overrides {
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> record_every;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--reps", o.reps, "Number of repetitions")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Base seed for repetition streams");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--record-every", o.record_every, "Trace recording stride (0 = automatic)");
  cmd->add_option("--threads", o.threads, "Threads for independent repetitions")->check(CLI::PositiveNumber);
}

dlsgd::ExperimentConfig load(const std::string& path, const Overrides& o) {
  auto cfg = dlsgd::load_config(path);
  if (o.reps) cfg.repetitions = *o.reps;
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.out) cfg.output = *o.out;
  if (o.record_every) cfg.record_every = *o.record_every;
  cfg.validate();
  return cfg;
}

std::string sanitize(std::string label) {
  for (auto& c : label) {
    if (c == ':') c = '_';
  }
  return label;
}

template <typename Writer>
std::string render(Writer&& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

void print_summary(const std::vector<dlsgd::AggregateResult>& results, const std::string& key) {
  std::cout << std::left << std::setw(14) << key << std::setw(6) << "R" << std::setw(12) << "rho" << std::setw(14)
            << "gap_factor" << std::setw(16) << "final_mean_gap"
            << "final_stderr\n";
  for (const auto& r : results) {
    std::cout << std::left << std::setw(14) << r.label << std::setw(6) << r.rounds << std::setw(12)
              << std::setprecision(5) << r.rho << std::setw(14) << r.gap_factor << std::setw(16)
              << r.final_mean_gap() << r.final_stderr() << '\n';
  }
}

int cmd_run(const std::string& path, const Overrides& o) {
  const auto cfg = load(path, o);
  const auto result = dlsgd::run_experiment(cfg, {o.threads});
  dlsgd::write_file(cfg.output / "trace.csv", render([&](auto& s) { dlsgd::write_aggregate_csv(s, result); }));
  dlsgd::write_file(cfg.output / "summary.csv",
                    render([&](auto& s) { dlsgd::write_summary_csv(s, {result}, "strategy"); }));
  print_summary({result}, "strategy");
  return 0;
}

int cmd_compare(const std::string& path, const Overrides& o, const std::vector<std::string>& strategies) {
  const auto cfg = load(path, o);
  const auto results = dlsgd::compare_strategies(cfg, strategies, {o.threads});
  for (const auto& r : results) {
    dlsgd::write_file(cfg.output / ("trace_" + sanitize(r.label) + ".csv"),
                      render([&](auto& s) { dlsgd::write_aggregate_csv(s, r); }));
  }
  dlsgd::write_file(cfg.output / "summary.csv",
                    render([&](auto& s) { dlsgd::write_summary_csv(s, results, "strategy"); }));
  print_summary(results, "strategy");
  return 0;
}

int cmd_sweep(const std::string& path, const Overrides& o, const std::vector<std::size_t>& n_values) {
  const auto cfg = load(path, o);
  const auto results = dlsgd::speedup_sweep(cfg, n_values, {o.threads});
  for (const auto& r : results) {
    dlsgd::write_file(cfg.output / ("trace_n" + r.label + ".csv"),
                      render([&](auto& s) { dlsgd::write_aggregate_csv(s, r); }));
  }
  dlsgd::write_file(cfg.output / "summary.csv", render([&](auto& s) { dlsgd::write_summary_csv(s, results, "n"); }));
  print_summary(results, "n");
  return 0;
}

int cmd_bounds(const std::string& path, const Overrides& o) {
  const auto cfg = load(path, o);
  const auto report = dlsgd::bound_report(cfg);
  dlsgd::write_file(cfg.output / "bound_theorem1.csv",
                    render([&](auto& s) { dlsgd::write_bound_csv(s, report.theorem1); }));
  if (!report.corollary1.empty()) {
    dlsgd::write_file(cfg.output / "bound_corollary1.csv",
                      render([&](auto& s) { dlsgd::write_bound_csv(s, report.corollary1); }));
  }
  if (!report.theorem2.empty()) {
    dlsgd::write_file(cfg.output / "bound_theorem2.csv",
                      render([&](auto& s) { dlsgd::write_bound_csv(s, report.theorem2); }));
  }
  std::cout << std::setprecision(6) << "beta " << report.beta
            << (report.beta_admissible ? " (admissible)" : " (below min_beta: bounds are not guaranteed)") << '\n'
            << "rho " << report.rho << '\n'
            << "theorem1 at T " << report.theorem1.back().rhs << '\n';
  if (!report.corollary1.empty()) std::cout << "corollary1 " << report.corollary1.back().rhs << '\n';
  if (!report.theorem2.empty()) std::cout << "theorem2 " << report.theorem2.back().rhs << '\n';
  return 0;
}

int cmd_spectra(const std::string& path, const Overrides& o) {
  const auto cfg = load(path, o);
  const auto topology = dlsgd::build_topology(cfg.topology);
  dlsgd::write_file(cfg.output / "graph.txt", render([&](auto& s) { dlsgd::write_edge_list(s, topology.graph); }));
  dlsgd::write_file(cfg.output / "mixing.csv",
                    render([&](auto& s) { dlsgd::write_matrix_csv(s, topology.mixing); }));
  std::cout << std::setprecision(10) << "n " << topology.graph.size() << '\n'
            << "edges " << topology.graph.edges().size() << '\n'
            << "rho " << topology.mixing.rho() << '\n'
            << "gap_factor " << topology.mixing.gap_factor() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized Local SGD simulator"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config;
  std::vector<std::string> strategies;
  std::vector<std::size_t> n_values;

  auto* run = app.add_subcommand("run", "Run repeated simulations of one configuration");
  auto* compare = app.add_subcommand("compare", "Compare communication strategies on shared noise");
  auto* sweep = app.add_subcommand("sweep", "Worker-count sweep with R = 2n varying intervals");
  auto* bounds = app.add_subcommand("bounds", "Evaluate the theoretical upper bounds");
  auto* spectra = app.add_subcommand("spectra", "Print rho and 1/(1-rho^2) of the topology");
  for (auto* cmd : {run, compare, sweep, bounds, spectra}) {
    cmd->add_option("config", config, "Experiment config file")->required();
    add_common_flags(cmd, overrides);
  }
  compare->add_option("--strategies", strategies, "every_step, fixed:H, varying:R, final_only")->required();
  sweep->add_option("--n", n_values, "Worker counts")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, overrides);
    if (*compare) return cmd_compare(config, overrides, strategies);
    if (*sweep) return cmd_sweep(config, overrides, n_values);
    if (*bounds) return cmd_bounds(config, overrides);
    if (*spectra) return cmd_spectra(config, overrides);
  } catch (const dlsgd::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dlsgd::InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dlsgd::GenerationFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dlsgd::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const dlsgd::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_FAILURE;
}
