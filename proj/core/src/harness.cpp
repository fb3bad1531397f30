#include "dlsgd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "dlsgd/bounds.hpp"
#include "dlsgd/error.hpp"

namespace dlsgd {

namespace {

// Running mean and variance (Welford). Identical inputs give exactly zero
// variance.
struct RunningStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  double standard_error() const {
    if (count < 2) return 0.0;
    const double var = m2 / static_cast<double>(count - 1);
    return std::sqrt(var / static_cast<double>(count));
  }
};

CommSchedule schedule_or_config_error(const std::string& strategy, std::size_t horizon) {
  try {
    return CommSchedule::parse(strategy, horizon);
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
}

}  // namespace

Topology build_topology(const TopologySpec& spec) {
  try {
    Graph g = [&] {
      switch (spec.kind) {
        case TopologyKind::kPath:
          return gen_path(spec.n);
        case TopologyKind::kComplete:
          return gen_complete(spec.n);
        case TopologyKind::kErdosRenyi:
          return gen_erdos_renyi(spec.n, spec.probability(), spec.seed);
      }
      throw ConfigError("unknown topology kind");
    }();
    MixingMatrix w = metropolis_weights(g, spec.weights);
    return Topology{std::move(g), std::move(w)};
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
}

std::shared_ptr<const Problem> build_problem(const ProblemSpec& spec) {
  if (spec.kind == ProblemKind::kQuadratic) {
    try {
      return quadratic_problem(spec.d, spec.c1, spec.c2);
    } catch (const InvalidParameter& e) {
      throw ConfigError(std::string("problem: ") + e.what());
    }
  }
  auto data = std::make_shared<const Dataset>(load_libsvm(spec.dataset, spec.dimension));
  LogisticOptions options;
  options.lambda = spec.lambda;
  options.batch = spec.batch;
  options.reference_cache = spec.reference_cache;
  return logistic_problem(std::move(data), options);
}

double resolve_beta(const ExperimentConfig& cfg, const ProblemConstants& constants) {
  if (cfg.beta) return *cfg.beta;
  return min_beta(constants.kappa(), constants.noise_c, cfg.topology.n, cfg.horizon);
}

AggregateResult run_repetitions(const Problem& problem, const MixingMatrix& w, const CommSchedule& schedule,
                                const ExperimentConfig& cfg, double beta, const ExecutionOptions& exec) {
  const std::size_t reps = cfg.repetitions;
  if (reps == 0) throw ConfigError("config: run.repetitions must be at least 1");
  const StepSizeRule rule{problem.constants().mu, beta};
  const auto hash = cfg.hash();

  std::vector<Trace> traces(reps);
  std::vector<std::exception_ptr> errors(reps);
  auto worker = [&](std::size_t first, std::size_t stride) {
    for (std::size_t r = first; r < reps; r += stride) {
      try {
        RunOptions options;
        options.horizon = cfg.horizon;
        options.seed = cfg.base_seed + r;
        options.record_every = cfg.record_every;
        options.record_grad_sq = false;
        options.config_hash = hash;
        traces[r] = run(problem, w, schedule, rule, options);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(exec.threads, 1, reps);
  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker, k, threads);
  }

  for (std::size_t r = 0; r < reps; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const DivergenceError& e) {
      throw DivergenceError("repetition " + std::to_string(r) + ": " + e.what(), e.step());
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw Error("repetition " + std::to_string(r) + ": " + e.what());
    }
  }

  AggregateResult result;
  result.label = schedule.strategy();
  result.config_hash = hash;
  result.n = w.size();
  result.rounds = schedule.rounds();
  result.rho = w.rho();
  result.gap_factor = w.gap_factor();
  result.beta = beta;

  const auto& reference = traces.front().points;
  result.curve.resize(reference.size());
  for (std::size_t k = 0; k < reference.size(); ++k) {
    RunningStats gap;
    RunningStats consensus;
    for (const auto& trace : traces) {
      gap.add(trace.points[k].gap);
      consensus.add(trace.points[k].consensus);
    }
    result.curve[k] = {reference[k].t, reference[k].comms, gap.mean, gap.standard_error(), consensus.mean};
  }
  result.final_gaps.reserve(reps);
  for (const auto& trace : traces) result.final_gaps.push_back(trace.points.back().gap);
  return result;
}

AggregateResult run_experiment(const ExperimentConfig& cfg, const ExecutionOptions& exec) {
  cfg.validate();
  const auto problem = build_problem(cfg.problem);
  const auto topology = build_topology(cfg.topology);
  const auto schedule = schedule_or_config_error(cfg.strategy, cfg.horizon);
  return run_repetitions(*problem, topology.mixing, schedule, cfg, resolve_beta(cfg, problem->constants()), exec);
}

std::vector<AggregateResult> compare_strategies(const ExperimentConfig& base,
                                                const std::vector<std::string>& strategies,
                                                const ExecutionOptions& exec) {
  if (strategies.empty()) throw ConfigError("compare: no strategies given");
  std::vector<CommSchedule> schedules;
  schedules.reserve(strategies.size());
  for (const auto& s : strategies) schedules.push_back(schedule_or_config_error(s, base.horizon));

  const auto problem = build_problem(base.problem);
  const auto topology = build_topology(base.topology);
  const double beta = resolve_beta(base, problem->constants());
  std::vector<AggregateResult> results;
  results.reserve(schedules.size());
  for (std::size_t k = 0; k < schedules.size(); ++k) {
    ExperimentConfig cfg = base;
    cfg.strategy = schedules[k].strategy();
    results.push_back(run_repetitions(*problem, topology.mixing, schedules[k], cfg, beta, exec));
  }
  return results;
}

std::vector<AggregateResult> speedup_sweep(const ExperimentConfig& base, std::vector<std::size_t> n_values,
                                           const ExecutionOptions& exec) {
  if (n_values.empty()) throw ConfigError("sweep: no worker counts given");
  std::sort(n_values.begin(), n_values.end());
  n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
  const auto max_rounds = max_varying_rounds(base.horizon);
  for (auto n : n_values) {
    if (n == 0) throw ConfigError("sweep: worker counts must be positive");
    if (2 * n > max_rounds) {
      throw ConfigError("sweep: R = 2n = " + std::to_string(2 * n) + " exceeds sqrt(2T) = " +
                        std::to_string(max_rounds));
    }
  }

  const auto problem = build_problem(base.problem);
  std::vector<AggregateResult> results;
  results.reserve(n_values.size());
  for (auto n : n_values) {
    ExperimentConfig cfg = base;
    cfg.topology.n = n;
    cfg.strategy = "varying:" + std::to_string(2 * n);
    const auto topology = build_topology(cfg.topology);
    const auto schedule = schedule_or_config_error(cfg.strategy, cfg.horizon);
    auto result = run_repetitions(*problem, topology.mixing, schedule, cfg, resolve_beta(cfg, problem->constants()),
                                  exec);
    result.label = std::to_string(n);
    results.push_back(std::move(result));
  }
  return results;
}

BoundReport bound_report(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto problem = build_problem(cfg.problem);
  const auto topology = build_topology(cfg.topology);
  const auto schedule = schedule_or_config_error(cfg.strategy, cfg.horizon);
  const auto& constants = problem->constants();
  const double gap0 = problem->value(problem->x0()) - constants.f_star;

  BoundReport report;
  report.beta = resolve_beta(cfg, constants);
  report.rho = topology.mixing.rho();
  const auto n = topology.mixing.size();
  const auto params = BoundParams::from(constants, n, cfg.horizon, report.beta, gap0);
  report.beta_admissible = params.beta_admissible();

  const auto rho_seq = schedule.rho_sequence(report.rho);
  const std::size_t stride = cfg.record_every == 0 ? default_record_stride(cfg.horizon) : cfg.record_every;
  for (std::size_t t = 1; t <= cfg.horizon; ++t) {
    if (t % stride != 0 && t != cfg.horizon) continue;
    auto p = params;
    p.horizon = t;
    report.theorem1.push_back(
        {"T", static_cast<double>(t), theorem1_rhs(p, std::span<const double>(rho_seq.data(), t))});
  }
  if (report.rho < 1.0) {
    if (schedule.kind() == ScheduleKind::kFixedInterval && report.beta > 1.0) {
      report.corollary1.push_back({"H", static_cast<double>(schedule.interval()),
                                   corollary1_rhs(params, schedule.interval(), report.rho)});
    }
    if (schedule.kind() == ScheduleKind::kVaryingInterval) {
      report.theorem2.push_back({"R", static_cast<double>(schedule.requested_rounds()),
                                 theorem2_rhs(params, schedule.requested_rounds(), report.rho)});
    }
  }
  return report;
}

void write_aggregate_csv(std::ostream& out, const AggregateResult& result) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  out << "t,mean_gap,stderr_gap,mean_consensus,comms\n";
  for (const auto& p : result.curve) {
    out << p.t << ',' << p.mean_gap << ',' << p.stderr_gap << ',' << p.mean_consensus << ',' << p.comms << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void write_summary_csv(std::ostream& out, const std::vector<AggregateResult>& results, const std::string& key) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  out << key << ",R,rho,gap_factor,final_mean_gap,final_stderr\n";
  for (const auto& r : results) {
    out << r.label << ',' << r.rounds << ',' << r.rho << ',' << r.gap_factor << ',' << r.final_mean_gap() << ','
        << r.final_stderr() << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void write_bound_csv(std::ostream& out, const std::vector<BoundRow>& rows) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  out << "param,value,rhs\n";
  for (const auto& row : rows) out << row.param << ',' << row.value << ',' << row.rhs << '\n';
  out.flags(flags);
  out.precision(precision);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw Error("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace dlsgd
