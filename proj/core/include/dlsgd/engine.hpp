#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "dlsgd/objectives.hpp"
#include "dlsgd/rng.hpp"
#include "dlsgd/schedule.hpp"
#include "dlsgd/topology.hpp"

namespace dlsgd {

/// eta_t = 2 / (mu (t + beta)).
struct StepSizeRule {
  double mu = 1.0;
  double beta = 1.0;

  double at(std::size_t t) const noexcept { return 2.0 / (mu * (static_cast<double>(t) + beta)); }
};

inline double step_size(const StepSizeRule& rule, std::size_t t) { return rule.at(t); }

/// Smallest beta admitted by the convergence theorem:
/// max{9 kappa^2 c ln(1 + T / (2 kappa^2)) + 2 kappa (1 + c / n), 2 kappa^2}.
double min_beta(double kappa, double c, std::size_t n, std::size_t horizon);

/// (1/n) sum_i ||x_i - mean||^2 over the columns of x.
double consensus_distance(const Eigen::Ref<const Eigen::MatrixXd>& x);

struct TracePoint {
  std::size_t t = 0;
  double gap = 0.0;        // F(mean iterate) - F*
  double consensus = 0.0;  // consensus distance
  double grad_sq = 0.0;    // (1/n) sum_i ||grad F(x_i)||^2, NaN when not recorded
  std::size_t comms = 0;   // mixing steps performed so far
};

struct Trace {
  std::vector<TracePoint> points;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

/// CSV with header `t,gap,consensus,grad_sq,comms,seed`.
void write_trace_csv(std::ostream& out, const Trace& trace);

/// Iterates of all workers plus their private random streams.
struct WorkerField {
  Eigen::MatrixXd x;                // d x n, column i is worker i
  std::size_t t = 0;                // iterations completed
  std::vector<RngStream> streams;   // stream i belongs to worker i
};

/// Stepwise Decentralized Local SGD.
///
/// Each step draws one stochastic gradient per worker from that worker's
/// stream, takes the local step Y = X - eta_t G and, when t + 1 is a
/// communication time, mixes X = Y W. Otherwise X = Y.
class Simulation {
 public:
  Simulation(const Problem& problem, const MixingMatrix& w, const CommSchedule& schedule, StepSizeRule rule,
             std::uint64_t seed);

  /// Advances one iteration. Throws DivergenceError if ||X||_F exceeds 1e12
  /// or an entry is non-finite, std::logic_error past the horizon.
  void step();

  bool done() const noexcept { return field_.t >= schedule_.horizon(); }
  std::size_t iteration() const noexcept { return field_.t; }
  std::size_t comms() const noexcept { return comms_; }
  bool last_step_mixed() const noexcept { return last_mixed_; }

  const Eigen::MatrixXd& iterates() const noexcept { return field_.x; }
  /// Stochastic gradients used by the last step.
  const Eigen::MatrixXd& last_gradients() const noexcept { return grads_; }
  double last_step_size() const noexcept { return last_eta_; }
  Vector mean_iterate() const { return field_.x.rowwise().mean(); }

  /// Trace record for the current state.
  TracePoint observe(bool with_grad_sq = true) const;

 private:
  const Problem& problem_;
  const MixingMatrix& w_;
  const CommSchedule& schedule_;
  StepSizeRule rule_;
  WorkerField field_;
  Eigen::MatrixXd grads_;
  std::size_t comms_ = 0;
  bool last_mixed_ = false;
  double last_eta_ = 0.0;
};

struct RunOptions {
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  /// Recording stride; 0 selects 1 for T <= 10^4 and T / 1000 otherwise.
  std::size_t record_every = 0;
  bool record_grad_sq = true;
  std::uint64_t config_hash = 0;
};

std::size_t default_record_stride(std::size_t horizon);

/// Runs exactly T steps and records t = 0, every stride, and t = T.
/// Throws ConfigError when w, the schedule and T disagree.
Trace run(const Problem& problem, const MixingMatrix& w, const CommSchedule& schedule, StepSizeRule rule,
          const RunOptions& options);

}  // namespace dlsgd
