#include "dlsgd/engine.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dlsgd/error.hpp"

namespace dlsgd {

namespace {

constexpr double kDivergenceNorm = 1e12;

}  // namespace

double min_beta(double kappa, double c, std::size_t n, std::size_t horizon) {
  if (!(kappa >= 1.0) || !(c >= 0.0) || n == 0) throw InvalidParameter("min_beta needs kappa >= 1, c >= 0, n >= 1");
  const double k2 = kappa * kappa;
  const double nd = static_cast<double>(n);
  const double first = 9.0 * k2 * c * std::log(1.0 + static_cast<double>(horizon) / (2.0 * k2)) +
                       2.0 * kappa * (1.0 + c / nd);
  return std::max(first, 2.0 * k2);
}

double consensus_distance(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.cols() == 0) throw InvalidParameter("consensus distance needs at least one column");
  bool equal = true;
  for (Eigen::Index j = 1; j < x.cols() && equal; ++j) equal = x.col(j) == x.col(0);
  if (equal) return 0.0;
  const Eigen::VectorXd mean = x.rowwise().mean();
  return (x.colwise() - mean).squaredNorm() / static_cast<double>(x.cols());
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  out << "t,gap,consensus,grad_sq,comms,seed\n";
  for (const auto& p : trace.points) {
    out << p.t << ',' << p.gap << ',' << p.consensus << ',' << p.grad_sq << ',' << p.comms << ',' << trace.seed
        << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

Simulation::Simulation(const Problem& problem, const MixingMatrix& w, const CommSchedule& schedule,
                       StepSizeRule rule, std::uint64_t seed)
    : problem_(problem), w_(w), schedule_(schedule), rule_(rule) {
  if (!(rule.mu > 0.0) || !(rule.beta > 0.0)) throw ConfigError("step size rule needs mu > 0 and beta > 0");
  const auto d = static_cast<Eigen::Index>(problem.dim());
  const auto n = static_cast<Eigen::Index>(w.size());
  if (problem.x0().size() != d) throw ConfigError("initial point dimension does not match the problem");
  field_.x = problem.x0().replicate(1, n);
  field_.streams = make_worker_streams(seed, w.size());
  grads_.resize(d, n);
}

void Simulation::step() {
  if (done()) throw std::logic_error("simulation already reached its horizon");
  const auto t = field_.t;
  const auto n = field_.x.cols();
  for (Eigen::Index j = 0; j < n; ++j) {
    problem_.stoch_gradient(field_.x.col(j), field_.streams[static_cast<std::size_t>(j)], grads_.col(j));
  }
  last_eta_ = rule_.at(t);
  field_.x -= last_eta_ * grads_;
  last_mixed_ = schedule_.communicates_at(t + 1);
  if (last_mixed_) {
    w_.mix(field_.x);
    ++comms_;
  }
  field_.t = t + 1;

  const double norm = field_.x.norm();
  if (!std::isfinite(norm) || norm > kDivergenceNorm) {
    throw DivergenceError("iterates diverged at step " + std::to_string(t) + " (||X||_F = " +
                              std::to_string(norm) + ")",
                          t);
  }
}

TracePoint Simulation::observe(bool with_grad_sq) const {
  TracePoint p;
  p.t = field_.t;
  p.gap = problem_.value(mean_iterate()) - problem_.constants().f_star;
  p.consensus = consensus_distance(field_.x);
  p.comms = comms_;
  if (with_grad_sq) {
    Vector g(field_.x.rows());
    double sum = 0.0;
    for (Eigen::Index j = 0; j < field_.x.cols(); ++j) {
      problem_.full_gradient(field_.x.col(j), g);
      sum += g.squaredNorm();
    }
    p.grad_sq = sum / static_cast<double>(field_.x.cols());
  } else {
    p.grad_sq = std::numeric_limits<double>::quiet_NaN();
  }
  return p;
}

std::size_t default_record_stride(std::size_t horizon) {
  return horizon <= 10'000 ? 1 : std::max<std::size_t>(1, horizon / 1000);
}

Trace run(const Problem& problem, const MixingMatrix& w, const CommSchedule& schedule, StepSizeRule rule,
          const RunOptions& options) {
  if (options.horizon != schedule.horizon()) {
    throw ConfigError("schedule horizon " + std::to_string(schedule.horizon()) + " differs from T = " +
                      std::to_string(options.horizon));
  }
  const std::size_t stride = options.record_every == 0 ? default_record_stride(options.horizon) : options.record_every;
  Simulation sim(problem, w, schedule, rule, options.seed);
  Trace trace;
  trace.seed = options.seed;
  trace.config_hash = options.config_hash;
  trace.points.reserve(options.horizon / stride + 2);
  trace.points.push_back(sim.observe(options.record_grad_sq));
  while (!sim.done()) {
    sim.step();
    if (sim.iteration() % stride == 0 || sim.done()) trace.points.push_back(sim.observe(options.record_grad_sq));
  }
  return trace;
}

}  // namespace dlsgd
