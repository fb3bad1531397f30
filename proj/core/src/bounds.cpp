#include "dlsgd/bounds.hpp"

#include <cmath>
#include <string>

#include "dlsgd/engine.hpp"
#include "dlsgd/error.hpp"
#include "dlsgd/schedule.hpp"

namespace dlsgd {

namespace {

// First two terms, shared by every bound.
double base_terms(const BoundParams& p) {
  const double T = static_cast<double>(p.horizon);
  return p.beta * p.beta * p.gap0 / (T * T) +
         2.0 * p.L * p.sigma2 / (static_cast<double>(p.n) * p.mu * p.mu * T);
}

void require_valid(const BoundParams& p) {
  if (p.horizon == 0 || p.n == 0) throw InvalidParameter("bounds need T >= 1 and n >= 1");
  if (!(p.mu > 0.0) || !(p.L >= p.mu)) throw InvalidParameter("bounds need 0 < mu <= L");
  if (!(p.sigma2 >= 0.0) || !(p.c >= 0.0)) throw InvalidParameter("bounds need sigma2 >= 0 and c >= 0");
}

void require_rho(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidParameter("rho must lie in [0, 1)");
}

}  // namespace

BoundParams BoundParams::from(const ProblemConstants& constants, std::size_t n, std::size_t horizon, double beta,
                              double gap0) {
  BoundParams p;
  p.mu = constants.mu;
  p.L = constants.L;
  p.kappa = constants.kappa();
  p.c = constants.noise_c;
  p.sigma2 = constants.noise_sigma2;
  p.n = n;
  p.horizon = horizon;
  p.beta = beta;
  p.gap0 = gap0;
  return p;
}

bool BoundParams::beta_admissible() const { return beta >= min_beta(kappa, c, n, horizon); }

double consensus_sum(std::span<const double> rho_seq, double beta) {
  double sum = 0.0;
  double running = 0.0;  // P_t
  for (std::size_t t = 0; t < rho_seq.size(); ++t) {
    if (t > 0) {
      const double r = rho_seq[t - 1];
      running = r * r * (running + 1.0);
    }
    sum += running / (static_cast<double>(t) + beta);
  }
  return sum;
}

double theorem1_rhs(const BoundParams& p, std::span<const double> rho_seq) {
  require_valid(p);
  if (rho_seq.size() != p.horizon) {
    throw InvalidInput("rho sequence has length " + std::to_string(rho_seq.size()) + ", expected T = " +
                       std::to_string(p.horizon));
  }
  const double T = static_cast<double>(p.horizon);
  return base_terms(p) +
         9.0 * p.L * p.L * p.sigma2 / (p.mu * p.mu * p.mu * T * T) * consensus_sum(rho_seq, p.beta);
}

double corollary1_rhs(const BoundParams& p, std::size_t interval, double rho) {
  require_valid(p);
  require_rho(rho);
  if (!(p.beta > 1.0)) throw InvalidParameter("the fixed-interval bound needs beta > 1");
  if (interval == 0) throw InvalidParameter("interval H must be positive");
  const double T = static_cast<double>(p.horizon);
  return base_terms(p) + 9.0 * p.L * p.L * p.sigma2 * static_cast<double>(interval) /
                             (p.mu * p.mu * p.mu * T * T * (1.0 - rho * rho)) *
                             std::log(1.0 + T / (p.beta - 1.0));
}

double theorem2_rhs(const BoundParams& p, std::size_t rounds, double rho) {
  require_valid(p);
  require_rho(rho);
  if (rounds == 0 || rounds > max_varying_rounds(p.horizon)) {
    throw InvalidParameter("varying-interval bound needs 1 <= R <= sqrt(2T)");
  }
  const double T = static_cast<double>(p.horizon);
  return base_terms(p) +
         144.0 * p.L * p.L * p.sigma2 / ((1.0 - rho * rho) * p.mu * p.mu * p.mu * T * static_cast<double>(rounds));
}

double phi(long long a, long long b) {
  if (a <= 2) throw InvalidParameter("phi(a, b) needs a > 2");
  if (b < a) throw InvalidParameter("phi(a, b) needs b >= a");
  double product = 1.0;
  for (long long i = a; i <= b; ++i) product *= 1.0 - 2.0 / static_cast<double>(i);
  return product;
}

}  // namespace dlsgd
