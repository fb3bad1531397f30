#pragma once

#include <cstddef>
#include <span>

#include "dlsgd/objectives.hpp"

namespace dlsgd {

/// Constants entering the optimality-gap upper bounds.
struct BoundParams {
  double mu = 1.0;
  double L = 1.0;
  double kappa = 1.0;
  double c = 0.0;
  double sigma2 = 0.0;
  std::size_t n = 1;
  std::size_t horizon = 1;
  double beta = 1.0;
  double gap0 = 0.0;  // F(mean x0) - F*

  static BoundParams from(const ProblemConstants& constants, std::size_t n, std::size_t horizon, double beta,
                          double gap0);

  /// beta >= min_beta(kappa, c, n, T): the hypothesis under which the bounds
  /// are proven. Evaluators do not enforce it.
  bool beta_admissible() const;
};

/// S = sum_{t=0}^{T-1} 1/(t + beta) sum_{k=0}^{t-1} prod_{i=k}^{t-1} rho_i^2,
/// evaluated in O(T) through P_t = rho_{t-1}^2 (P_{t-1} + 1), P_0 = 0.
double consensus_sum(std::span<const double> rho_seq, double beta);

/// beta^2 gap0 / T^2 + 2 L sigma^2 / (n mu^2 T) + 9 L^2 sigma^2 S / (mu^3 T^2).
/// rho_seq must have length T.
double theorem1_rhs(const BoundParams& p, std::span<const double> rho_seq);

/// Fixed interval H: third term 9 L^2 sigma^2 H ln(1 + T/(beta - 1)) / (mu^3 T^2 (1 - rho^2)).
/// Requires beta > 1 and 0 <= rho < 1.
double corollary1_rhs(const BoundParams& p, std::size_t interval, double rho);

/// Varying intervals with R rounds: third term 144 L^2 sigma^2 / ((1 - rho^2) mu^3 T R).
/// Requires 1 <= R <= sqrt(2T) and 0 <= rho < 1.
double theorem2_rhs(const BoundParams& p, std::size_t rounds, double rho);

/// prod_{i=a}^{b} (1 - 2/i) for integers b >= a > 2.
double phi(long long a, long long b);

}  // namespace dlsgd
