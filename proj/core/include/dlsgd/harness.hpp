#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dlsgd/config.hpp"
#include "dlsgd/engine.hpp"
#include "dlsgd/objectives.hpp"
#include "dlsgd/schedule.hpp"
#include "dlsgd/topology.hpp"

namespace dlsgd {

struct Topology {
  Graph graph;
  MixingMatrix mixing;
};

Topology build_topology(const TopologySpec& spec);
std::shared_ptr<const Problem> build_problem(const ProblemSpec& spec);

/// Configured beta, or min_beta(kappa, c, n, T) when the config says `min`.
double resolve_beta(const ExperimentConfig& cfg, const ProblemConstants& constants);

struct AggregatePoint {
  std::size_t t = 0;
  std::size_t comms = 0;
  double mean_gap = 0.0;
  double stderr_gap = 0.0;
  double mean_consensus = 0.0;
};

/// Repetition statistics of one experiment.
struct AggregateResult {
  std::string label;
  std::vector<AggregatePoint> curve;
  std::vector<double> final_gaps;  // one per repetition, in repetition order
  std::uint64_t config_hash = 0;
  std::size_t n = 0;
  std::size_t rounds = 0;
  double rho = 0.0;
  double gap_factor = 1.0;
  double beta = 1.0;

  double final_mean_gap() const { return curve.back().mean_gap; }
  double final_stderr() const { return curve.back().stderr_gap; }
};

struct ExecutionOptions {
  /// Worker threads for independent repetitions. Results do not depend on it.
  unsigned threads = 1;
};

/// Runs `cfg.repetitions` seeded repetitions on one shared problem and
/// topology. Repetition r uses seed base_seed + r.
AggregateResult run_repetitions(const Problem& problem, const MixingMatrix& w, const CommSchedule& schedule,
                                const ExperimentConfig& cfg, double beta, const ExecutionOptions& exec = {});

AggregateResult run_experiment(const ExperimentConfig& cfg, const ExecutionOptions& exec = {});

/// One result per strategy on the same problem, topology and repetition
/// seeds. Every strategy is validated before anything runs.
std::vector<AggregateResult> compare_strategies(const ExperimentConfig& base,
                                                const std::vector<std::string>& strategies,
                                                const ExecutionOptions& exec = {});

/// Varying schedule with R = 2n per worker count, results sorted by n.
std::vector<AggregateResult> speedup_sweep(const ExperimentConfig& base, std::vector<std::size_t> n_values,
                                           const ExecutionOptions& exec = {});

struct BoundRow {
  std::string param;
  double value = 0.0;
  double rhs = 0.0;
};

struct BoundReport {
  std::vector<BoundRow> theorem1;    // param T, one row per recorded horizon
  std::vector<BoundRow> corollary1;  // param H, fixed-interval schedules with beta > 1
  std::vector<BoundRow> theorem2;    // param R, varying schedules
  double beta = 1.0;
  bool beta_admissible = false;
  double rho = 0.0;
};

BoundReport bound_report(const ExperimentConfig& cfg);

/// Header `t,mean_gap,stderr_gap,mean_consensus,comms`.
void write_aggregate_csv(std::ostream& out, const AggregateResult& result);
/// Header `<key>,R,rho,gap_factor,final_mean_gap,final_stderr`.
void write_summary_csv(std::ostream& out, const std::vector<AggregateResult>& results, const std::string& key);
/// Header `param,value,rhs`.
void write_bound_csv(std::ostream& out, const std::vector<BoundRow>& rows);

/// Writes a file in one piece after the content is complete.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace dlsgd
