#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>

#include <Eigen/Core>

#include "dlsgd/libsvm.hpp"
#include "dlsgd/rng.hpp"

namespace dlsgd {

using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<Vector>;
using ConstVectorRef = Eigen::Ref<const Vector>;

/// Strong convexity, smoothness and gradient-noise constants of a problem.
/// Noise obeys E||eps||^2 <= noise_c ||grad F(x)||^2 + noise_sigma2.
struct ProblemConstants {
  double mu = 1.0;
  double L = 1.0;
  double noise_c = 0.0;
  double noise_sigma2 = 0.0;
  double f_star = 0.0;

  double kappa() const noexcept { return L / mu; }
};

/// Objective with exact value/gradient oracles and a stochastic gradient
/// oracle that draws only from the stream it is handed.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(const ConstVectorRef& x) const = 0;
  virtual void full_gradient(const ConstVectorRef& x, VectorRef out) const = 0;
  virtual void stoch_gradient(const ConstVectorRef& x, RngStream& rng, VectorRef out) const = 0;

  const ProblemConstants& constants() const noexcept { return constants_; }
  const Vector& x0() const noexcept { return x0_; }

  Vector gradient(const ConstVectorRef& x) const;
  Vector sample_gradient(const ConstVectorRef& x, RngStream& rng) const;

 protected:
  Problem(ProblemConstants constants, Vector x0) : constants_(constants), x0_(std::move(x0)) {}

  ProblemConstants constants_;
  Vector x0_;
};

/// F(x) = E f(x, z) with f(x, z) = sum_i 1/2 x_i^2 (1 + z1_i) + x^T z2,
/// z1_i ~ N(0, c1), z2_i ~ N(0, c2). So F(x) = ||x||^2 / 2, mu = L = 1,
/// c = c1, sigma^2 = d c2, F* = 0 and x0 = 1_d.
class QuadraticProblem final : public Problem {
 public:
  QuadraticProblem(std::size_t d, double c1, double c2);

  std::size_t dim() const override { return d_; }
  double value(const ConstVectorRef& x) const override;
  void full_gradient(const ConstVectorRef& x, VectorRef out) const override;
  void stoch_gradient(const ConstVectorRef& x, RngStream& rng, VectorRef out) const override;

  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }

 private:
  std::size_t d_;
  double c1_;
  double c2_;
  double sd1_;
  double sd2_;
};

/// Minimizer of a logistic objective and how it was obtained.
struct ReferenceSolution {
  Vector x_star;
  double f_star = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
};

struct LogisticOptions {
  double lambda = 0.05;
  std::size_t batch = 1;
  /// Gradient-norm target for the reference solve.
  double reference_tolerance = 1e-10;
  /// CSV cache for the reference minimizer; reused when the dataset
  /// checksum and lambda match.
  std::optional<std::filesystem::path> reference_cache;
};

/// l2-regularized logistic regression
///   F(x) = (1/N) sum_j [ln(1 + exp(x^T A_j)) - 1{b_j = 1} x^T A_j] + lambda/2 ||x||^2.
///
/// The stochastic gradient averages `batch` examples drawn uniformly with
/// replacement. mu = lambda, L = lambda + max_j ||A_j||^2 / 4, c = 0, sigma^2
/// is the exact sampling variance at x0 = 0, F* comes from a reference solve.
class LogisticProblem final : public Problem {
 public:
  LogisticProblem(std::shared_ptr<const Dataset> data, const LogisticOptions& options);

  std::size_t dim() const override { return data_->dim; }
  double value(const ConstVectorRef& x) const override;
  void full_gradient(const ConstVectorRef& x, VectorRef out) const override;
  void stoch_gradient(const ConstVectorRef& x, RngStream& rng, VectorRef out) const override;

  double lambda() const noexcept { return lambda_; }
  std::size_t batch() const noexcept { return batch_; }
  const Dataset& data() const noexcept { return *data_; }
  const ReferenceSolution& reference() const noexcept { return reference_; }

 private:
  double margin(std::size_t j, const ConstVectorRef& x) const;
  void add_example_gradient(std::size_t j, double scale, const ConstVectorRef& x, VectorRef out) const;

  std::shared_ptr<const Dataset> data_;
  double lambda_;
  std::size_t batch_;
  ReferenceSolution reference_;
};

std::unique_ptr<QuadraticProblem> quadratic_problem(std::size_t d, double c1, double c2);
std::unique_ptr<LogisticProblem> logistic_problem(std::shared_ptr<const Dataset> data,
                                                  const LogisticOptions& options);

/// Deterministic full-gradient descent from x0 with step 1/L until
/// ||grad F|| <= tolerance. Throws Error when the budget runs out.
ReferenceSolution solve_reference(const Problem& problem, double tolerance,
                                  std::size_t max_iterations = 1'000'000);

struct NoiseMoments {
  double mean_err;       // || (1/S) sum_s (g_s - grad F(x)) ||
  double second_moment;  // (1/S) sum_s ||g_s - grad F(x)||^2
};

/// Monte Carlo moments of the gradient noise at x over `samples` draws.
NoiseMoments noise_moment_estimate(const Problem& problem, const ConstVectorRef& x,
                                   std::size_t samples, RngStream& rng);

}  // namespace dlsgd
