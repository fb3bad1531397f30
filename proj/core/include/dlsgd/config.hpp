#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "dlsgd/topology.hpp"

namespace dlsgd {

enum class ProblemKind { kQuadratic, kLogistic };
enum class TopologyKind { kPath, kErdosRenyi, kComplete };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::kQuadratic;
  // quadratic
  std::size_t d = 20;
  double c1 = 15.0;
  double c2 = 1.0 / 12.0;
  // logistic
  std::filesystem::path dataset;
  double lambda = 0.05;
  std::optional<std::size_t> dimension;
  std::size_t batch = 1;
  std::optional<std::filesystem::path> reference_cache;
};

struct TopologySpec {
  TopologyKind kind = TopologyKind::kPath;
  std::size_t n = 1;
  std::optional<double> p;
  std::optional<double> delta;
  std::uint64_t seed = 1;
  WeightRule weights = WeightRule::kMetropolisHastings;

  /// Edge probability for Erdos-Renyi: p, or (1 + delta) ln(n) / n.
  double probability() const;
};

/// Fully validated experiment description.
///
/// The file format is flat `key = value` text, one entry per line, `#`
/// starts a comment. Keys (required unless a default is shown):
///
///   problem.kind        quadratic | logistic
///   problem.d, problem.c1, problem.c2                       (quadratic)
///   problem.dataset, problem.lambda                         (logistic)
///   problem.dimension, problem.batch = 1,
///   problem.reference_cache                                 (logistic, optional)
///   topology.kind       path | er | complete
///   topology.n
///   topology.p | topology.delta                             (er, exactly one)
///   topology.seed = 1
///   topology.weights = metropolis   metropolis: 1/(1 + max deg), max_degree: 1/max deg
///   schedule.strategy   every_step | fixed:H | varying:R | final_only
///   run.T
///   run.beta            number, or `min` for the smallest admissible beta
///   run.repetitions = 100, run.seed = 1, run.record_every = 0 (auto),
///   run.output = out
///
/// Unknown keys, keys that do not apply to the chosen kinds, duplicates and
/// missing required keys are ConfigError.
struct ExperimentConfig {
  ProblemSpec problem;
  TopologySpec topology;
  std::string strategy = "every_step";
  std::size_t horizon = 1;
  std::optional<double> beta;  // nullopt: use min_beta
  std::size_t repetitions = 100;
  std::uint64_t base_seed = 1;
  std::size_t record_every = 0;
  std::filesystem::path output = "out";

  /// Fingerprint of every field that affects results (not the output or
  /// cache locations).
  std::uint64_t hash() const;

  /// Re-checks cross-field constraints after programmatic edits.
  void validate() const;
};

/// Relative dataset/cache paths resolve against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace dlsgd
