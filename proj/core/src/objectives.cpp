#include "dlsgd/objectives.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "dlsgd/error.hpp"

namespace dlsgd {

namespace {

double softplus(double m) { return std::max(m, 0.0) + std::log1p(std::exp(-std::abs(m))); }

double sigmoid(double m) {
  if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

std::optional<ReferenceSolution> load_reference(const std::filesystem::path& path, std::uint64_t checksum,
                                                double lambda, std::size_t dim) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  ReferenceSolution ref;
  bool have_checksum = false;
  bool have_lambda = false;
  bool have_f = false;
  std::string line;
  try {
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string key;
      if (!std::getline(row, key, ',')) continue;
      std::string cell;
      if (key == "checksum") {
        std::getline(row, cell, ',');
        have_checksum = std::stoull(cell) == checksum;
      } else if (key == "lambda") {
        std::getline(row, cell, ',');
        have_lambda = std::stod(cell) == lambda;
      } else if (key == "f_star") {
        std::getline(row, cell, ',');
        ref.f_star = std::stod(cell);
        have_f = true;
      } else if (key == "x_star") {
        std::vector<double> values;
        while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
        ref.x_star = Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
      }
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (!have_checksum || !have_lambda || !have_f || static_cast<std::size_t>(ref.x_star.size()) != dim) {
    return std::nullopt;
  }
  return ref;
}

void store_reference(const std::filesystem::path& path, std::uint64_t checksum, double lambda,
                     const ReferenceSolution& ref) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write reference cache '" + path.string() + "'");
  out << std::setprecision(17);
  out << "checksum," << checksum << '\n';
  out << "lambda," << lambda << '\n';
  out << "f_star," << ref.f_star << '\n';
  out << "x_star";
  for (Eigen::Index i = 0; i < ref.x_star.size(); ++i) out << ',' << ref.x_star(i);
  out << '\n';
}

}  // namespace

Vector Problem::gradient(const ConstVectorRef& x) const {
  Vector g(static_cast<Eigen::Index>(dim()));
  full_gradient(x, g);
  return g;
}

Vector Problem::sample_gradient(const ConstVectorRef& x, RngStream& rng) const {
  Vector g(static_cast<Eigen::Index>(dim()));
  stoch_gradient(x, rng, g);
  return g;
}

QuadraticProblem::QuadraticProblem(std::size_t d, double c1, double c2)
    : Problem(ProblemConstants{1.0, 1.0, c1, static_cast<double>(d) * c2, 0.0},
              Vector::Ones(static_cast<Eigen::Index>(d))),
      d_(d),
      c1_(c1),
      c2_(c2),
      sd1_(std::sqrt(c1)),
      sd2_(std::sqrt(c2)) {
  if (d == 0) throw InvalidParameter("dimension d must be at least 1");
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || !std::isfinite(c1) || !std::isfinite(c2)) {
    throw InvalidParameter("noise variances c1, c2 must be finite and non-negative");
  }
}

double QuadraticProblem::value(const ConstVectorRef& x) const { return 0.5 * x.squaredNorm(); }

void QuadraticProblem::full_gradient(const ConstVectorRef& x, VectorRef out) const { out = x; }

void QuadraticProblem::stoch_gradient(const ConstVectorRef& x, RngStream& rng, VectorRef out) const {
  if (c1_ == 0.0 && c2_ == 0.0) {
    out = x;
    return;
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double z1 = sd1_ * rng.normal();
    const double z2 = sd2_ * rng.normal();
    out(i) = x(i) * (1.0 + z1) + z2;
  }
}

LogisticProblem::LogisticProblem(std::shared_ptr<const Dataset> data, const LogisticOptions& options)
    : Problem(ProblemConstants{}, Vector()), data_(std::move(data)), lambda_(options.lambda), batch_(options.batch) {
  if (!data_ || data_->size() == 0 || data_->dim == 0) throw InvalidParameter("logistic problem needs a non-empty dataset");
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw InvalidParameter("lambda must be positive");
  if (batch_ == 0) throw InvalidParameter("batch size must be positive");

  const auto d = static_cast<Eigen::Index>(data_->dim);
  x0_ = Vector::Zero(d);

  double max_sq = 0.0;
  for (const auto& row : data_->rows) {
    double sq = 0.0;
    for (const auto& e : row) sq += e.value * e.value;
    max_sq = std::max(max_sq, sq);
  }
  constants_.mu = lambda_;
  constants_.L = lambda_ + 0.25 * max_sq;
  constants_.noise_c = 0.0;

  // Exact single-draw noise variance at x0 = 0, divided by the batch size.
  Vector mean = Vector::Zero(d);
  double weighted_sq = 0.0;
  const double inv_n = 1.0 / static_cast<double>(data_->size());
  for (std::size_t j = 0; j < data_->size(); ++j) {
    const double r = sigmoid(0.0) - static_cast<double>(data_->labels[j]);
    double sq = 0.0;
    for (const auto& e : data_->rows[j]) {
      mean(e.index - 1) += inv_n * r * e.value;
      sq += e.value * e.value;
    }
    weighted_sq += inv_n * r * r * sq;
  }
  constants_.noise_sigma2 = std::max(0.0, weighted_sq - mean.squaredNorm()) / static_cast<double>(batch_);

  const auto checksum = data_->checksum();
  std::optional<ReferenceSolution> cached;
  if (options.reference_cache) cached = load_reference(*options.reference_cache, checksum, lambda_, data_->dim);
  if (cached) {
    reference_ = std::move(*cached);
    reference_.grad_norm = gradient(reference_.x_star).norm();
  } else {
    reference_ = solve_reference(*this, options.reference_tolerance);
    if (options.reference_cache) store_reference(*options.reference_cache, checksum, lambda_, reference_);
  }
  constants_.f_star = reference_.f_star;
}

double LogisticProblem::margin(std::size_t j, const ConstVectorRef& x) const {
  double m = 0.0;
  for (const auto& e : data_->rows[j]) m += x(e.index - 1) * e.value;
  return m;
}

void LogisticProblem::add_example_gradient(std::size_t j, double scale, const ConstVectorRef& x,
                                           VectorRef out) const {
  const double r = scale * (sigmoid(margin(j, x)) - static_cast<double>(data_->labels[j]));
  for (const auto& e : data_->rows[j]) out(e.index - 1) += r * e.value;
}

double LogisticProblem::value(const ConstVectorRef& x) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < data_->size(); ++j) {
    const double m = margin(j, x);
    sum += softplus(m) - (data_->labels[j] == 1 ? m : 0.0);
  }
  return sum / static_cast<double>(data_->size()) + 0.5 * lambda_ * x.squaredNorm();
}

void LogisticProblem::full_gradient(const ConstVectorRef& x, VectorRef out) const {
  out = lambda_ * x;
  const double scale = 1.0 / static_cast<double>(data_->size());
  for (std::size_t j = 0; j < data_->size(); ++j) add_example_gradient(j, scale, x, out);
}

void LogisticProblem::stoch_gradient(const ConstVectorRef& x, RngStream& rng, VectorRef out) const {
  out = lambda_ * x;
  const double scale = 1.0 / static_cast<double>(batch_);
  for (std::size_t b = 0; b < batch_; ++b) add_example_gradient(rng.index(data_->size()), scale, x, out);
}

std::unique_ptr<QuadraticProblem> quadratic_problem(std::size_t d, double c1, double c2) {
  return std::make_unique<QuadraticProblem>(d, c1, c2);
}

std::unique_ptr<LogisticProblem> logistic_problem(std::shared_ptr<const Dataset> data,
                                                  const LogisticOptions& options) {
  return std::make_unique<LogisticProblem>(std::move(data), options);
}

ReferenceSolution solve_reference(const Problem& problem, double tolerance, std::size_t max_iterations) {
  if (!(tolerance > 0.0)) throw InvalidParameter("reference tolerance must be positive");
  const double step = 1.0 / problem.constants().L;
  ReferenceSolution ref;
  ref.x_star = problem.x0();
  Vector g(ref.x_star.size());
  problem.full_gradient(ref.x_star, g);
  ref.grad_norm = g.norm();
  while (ref.grad_norm > tolerance) {
    if (ref.iterations == max_iterations) {
      throw Error("reference solve did not reach gradient norm " + std::to_string(tolerance) + " in " +
                  std::to_string(max_iterations) + " iterations");
    }
    ref.x_star -= step * g;
    problem.full_gradient(ref.x_star, g);
    ref.grad_norm = g.norm();
    ++ref.iterations;
  }
  ref.f_star = problem.value(ref.x_star);
  return ref;
}

NoiseMoments noise_moment_estimate(const Problem& problem, const ConstVectorRef& x, std::size_t samples,
                                   RngStream& rng) {
  if (samples == 0) throw InvalidParameter("noise estimate needs at least one sample");
  const Vector grad = problem.gradient(x);
  Vector sum = Vector::Zero(grad.size());
  Vector g(grad.size());
  double second = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    problem.stoch_gradient(x, rng, g);
    g -= grad;
    sum += g;
    second += g.squaredNorm();
  }
  const double inv = 1.0 / static_cast<double>(samples);
  return {(sum * inv).norm(), second * inv};
}

}  // namespace dlsgd
