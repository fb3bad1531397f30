#include "dlsgd/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "dlsgd/error.hpp"
#include "dlsgd/rng.hpp"

namespace dlsgd {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::vector<std::vector<std::size_t>> adjacency(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view token, std::size_t line) {
  std::string t = trim(token);
  if (!t.empty() && t.front() == '+') t.erase(0, 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError("expected a real number, got '" + std::string(token) + "'", line);
  }
  return value;
}

}  // namespace

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)), degrees_(n, 0) {
  if (n == 0) throw InvalidParameter("graph needs at least one node");
  for (auto& [a, b] : edges_) {
    if (a >= n || b >= n) {
      throw InvalidInput("edge {" + std::to_string(a) + "," + std::to_string(b) +
                         "} references a node outside [0," + std::to_string(n) + ")");
    }
    if (a == b) throw InvalidInput("self-loop on node " + std::to_string(a));
    if (a > b) std::swap(a, b);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw InvalidInput("duplicate edge");
  }
  for (const auto& [a, b] : edges_) {
    ++degrees_[a];
    ++degrees_[b];
  }
  if (!is_connected(n_, edges_)) throw InvalidInput("graph is disconnected");
}

bool Graph::has_edge(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{a, b});
}

bool Graph::is_bipartite() const {
  const auto adj = adjacency(n_, edges_);
  std::vector<int> color(n_, -1);
  std::queue<std::size_t> frontier;
  color[0] = 0;
  frontier.push(0);
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (auto v : adj[u]) {
      if (color[v] < 0) {
        color[v] = 1 - color[u];
        frontier.push(v);
      } else if (color[v] == color[u]) {
        return false;
      }
    }
  }
  return true;
}

bool is_connected(std::size_t n, const std::vector<Edge>& edges) {
  if (n <= 1) return true;
  const auto adj = adjacency(n, edges);
  std::vector<char> seen(n, 0);
  std::queue<std::size_t> frontier;
  seen[0] = 1;
  frontier.push(0);
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

Graph gen_path(std::size_t n) {
  if (n == 0) throw InvalidParameter("path graph needs n >= 1");
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, std::move(edges));
}

Graph gen_complete(std::size_t n) {
  if (n == 0) throw InvalidParameter("complete graph needs n >= 1");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return Graph(n, std::move(edges));
}

Graph gen_erdos_renyi(std::size_t n, double p, std::uint64_t seed, std::size_t max_attempts) {
  if (n == 0) throw InvalidParameter("Erdos-Renyi graph needs n >= 1");
  if (n == 1) return Graph(1, {});
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidParameter("Erdos-Renyi edge probability must lie in (0, 1] for n > 1");
  }
  std::vector<Edge> edges;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    RngStream rng(seed, attempt);
    edges.clear();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (rng.uniform() < p) edges.emplace_back(i, j);
      }
    }
    if (is_connected(n, edges)) return Graph(n, std::move(edges));
  }
  throw GenerationFailure("no connected G(" + std::to_string(n) + ", " + std::to_string(p) +
                          ") sample in " + std::to_string(max_attempts) +
                          " attempts; p is too small for n");
}

double er_probability_from_delta(std::size_t n, double delta) {
  if (n == 0) throw InvalidParameter("n must be positive");
  if (!(delta > -1.0)) throw InvalidParameter("delta must exceed -1");
  if (n == 1) return 1.0;
  const double nd = static_cast<double>(n);
  return std::min(1.0, (1.0 + delta) * std::log(nd) / nd);
}

MixingMatrix::MixingMatrix(Eigen::MatrixXd w, bool uniform) : w_(std::move(w)), uniform_(uniform) {
  const auto n = size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (w_(i, j) > 0.0) links_.push_back({i, j, w_(i, j)});
    }
  }
  rho_ = second_eigenvalue_magnitude(w_);
  gap_factor_ = rho_ >= 1.0 ? std::numeric_limits<double>::infinity() : 1.0 / (1.0 - rho_ * rho_);
}

MixingMatrix MixingMatrix::from_dense(Eigen::MatrixXd w) {
  if (w.rows() == 0 || w.rows() != w.cols()) throw InvalidInput("mixing matrix must be square and non-empty");
  if (!w.allFinite()) throw InvalidInput("mixing matrix has non-finite entries");
  if ((w.array() < 0.0).any()) throw InvalidInput("mixing matrix has negative entries");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > kRowSumTolerance) {
    throw InvalidInput("mixing matrix is not symmetric");
  }
  Eigen::MatrixXd sym = 0.5 * (w + w.transpose());
  const Eigen::VectorXd sums = sym.rowwise().sum();
  if ((sums.array() - 1.0).abs().maxCoeff() > kRowSumTolerance) {
    throw InvalidInput("mixing matrix rows do not sum to 1");
  }
  const auto n = sym.rows();
  const bool uniform = (sym.array() == 1.0 / static_cast<double>(n)).all();
  return MixingMatrix(std::move(sym), uniform);
}

MixingMatrix MixingMatrix::uniform(std::size_t n) {
  if (n == 0) throw InvalidParameter("n must be positive");
  const auto sz = static_cast<Eigen::Index>(n);
  return MixingMatrix(Eigen::MatrixXd::Constant(sz, sz, 1.0 / static_cast<double>(n)), true);
}

MixingMatrix MixingMatrix::identity(std::size_t n) {
  if (n == 0) throw InvalidParameter("n must be positive");
  const auto sz = static_cast<Eigen::Index>(n);
  return MixingMatrix(Eigen::MatrixXd::Identity(sz, sz), n == 1);
}

void MixingMatrix::mix(Eigen::Ref<Eigen::MatrixXd> x) const {
  if (static_cast<std::size_t>(x.cols()) != size()) {
    throw InvalidInput("mixing a matrix with " + std::to_string(x.cols()) + " columns by a " +
                       std::to_string(size()) + "-node mixing matrix");
  }
  if (uniform_) {
    const Eigen::VectorXd mean = x.rowwise().mean();
    x = mean.replicate(1, x.cols());
    return;
  }
  const Eigen::MatrixXd before = x;
  for (const auto& link : links_) {
    const Eigen::VectorXd diff = before.col(link.first) - before.col(link.second);
    x.col(link.second).noalias() += link.weight * diff;
    x.col(link.first).noalias() -= link.weight * diff;
  }
}

MixingMatrix metropolis_weights(const Graph& g, WeightRule rule) {
  const auto n = g.size();
  const std::size_t offset = rule == WeightRule::kMetropolisHastings ? 1 : 0;
  const auto sz = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(sz, sz);
  for (const auto& [a, b] : g.edges()) {
    const double weight = 1.0 / static_cast<double>(std::max(g.degree(a), g.degree(b)) + offset);
    w(a, b) = weight;
    w(b, a) = weight;
  }
  for (Eigen::Index i = 0; i < sz; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < sz; ++j) {
      if (j != i) off += w(i, j);
    }
    w(i, i) = std::max(0.0, 1.0 - off);
  }
  return MixingMatrix::from_dense(std::move(w));
}

double second_eigenvalue_magnitude(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw InvalidInput("matrix must be square");
  if (w.rows() <= 1) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw InvalidInput("eigendecomposition failed");
  std::vector<double> mags(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index i = 0; i < w.rows(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(solver.eigenvalues()(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags[1] > 1.0 - 1e-12 ? 1.0 : mags[1];
}

ContractionCheck contraction_check(const MixingMatrix& w, const Eigen::MatrixXd& y) {
  if (static_cast<std::size_t>(y.cols()) != w.size()) {
    throw InvalidInput("Y must have one column per node");
  }
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    const double scale = std::max(1.0, y.row(r).cwiseAbs().sum());
    if (std::abs(y.row(r).sum()) > 1e-9 * scale) {
      throw InvalidInput("row " + std::to_string(r) + " of Y does not sum to zero");
    }
  }
  const double rho = w.rho();
  return {(y * w.weights()).squaredNorm(), rho * rho * y.squaredNorm()};
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.size() << ' ' << g.edges().size() << '\n';
  for (const auto& [a, b] : g.edges()) out << a + 1 << ' ' << b + 1 << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("empty edge list", 0);
  std::istringstream header(line);
  long long n = 0;
  long long m = 0;
  std::string extra;
  if (!(header >> n >> m) || (header >> extra) || n <= 0 || m < 0) {
    throw ParseError("header must be 'n m' with n >= 1", line_no);
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    if (!next_line()) throw ParseError("expected " + std::to_string(m) + " edges", line_no);
    std::istringstream row(line);
    long long i = 0;
    long long j = 0;
    if (!(row >> i >> j) || (row >> extra) || i < 1 || j < 1 || i > n || j > n) {
      throw ParseError("edge must be 'i j' with 1 <= i, j <= n", line_no);
    }
    edges.emplace_back(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
  }
  if (next_line()) throw ParseError("trailing content after the last edge", line_no);
  return Graph(static_cast<std::size_t>(n), std::move(edges));
}

void write_matrix_csv(std::ostream& out, const MixingMatrix& w) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  const auto& m = w.weights();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

MixingMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged matrix row", line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.size() != rows.front().size()) {
    throw ParseError("matrix CSV must hold n rows of n values", line_no);
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) w(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return MixingMatrix::from_dense(std::move(w));
}

}  // namespace dlsgd
