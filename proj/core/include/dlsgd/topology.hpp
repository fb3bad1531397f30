#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace dlsgd {

/// Undirected edge between two 0-based node ids, stored with first < second.
using Edge = std::pair<std::size_t, std::size_t>;

/// Connected undirected simple graph on nodes 0..n-1.
///
/// Construction normalizes edge orientation, sorts the edge list, and rejects
/// self-loops, duplicates, out-of-range ids and disconnected edge sets
/// (InvalidInput). A Graph value is therefore always connected.
class Graph {
 public:
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::size_t>& degrees() const noexcept { return degrees_; }
  std::size_t degree(std::size_t node) const { return degrees_.at(node); }
  bool has_edge(std::size_t a, std::size_t b) const;

  /// Two-coloring exists.
  bool is_bipartite() const;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> degrees_;
};

/// Breadth-first reachability from node 0. Edges may be in any orientation.
bool is_connected(std::size_t n, const std::vector<Edge>& edges);

Graph gen_path(std::size_t n);
Graph gen_complete(std::size_t n);

/// G(n, p) sampled by one uniform draw per pair (i, j), i < j, in
/// lexicographic order. Disconnected samples are redrawn from the sub-stream
/// (seed, attempt) for up to `max_attempts` attempts.
Graph gen_erdos_renyi(std::size_t n, double p, std::uint64_t seed,
                      std::size_t max_attempts = 1000);

/// Edge probability (1 + delta) ln(n) / n, clamped to 1.
double er_probability_from_delta(std::size_t n, double delta);

/// Weight on one off-diagonal pair (first < second).
struct Link {
  std::size_t first;
  std::size_t second;
  double weight;
};

/// Symmetric doubly stochastic mixing matrix together with its spectral
/// constants. rho is the magnitude of the second largest eigenvalue (by
/// magnitude) and gap_factor = 1 / (1 - rho^2), which is +inf when rho == 1.
class MixingMatrix {
 public:
  /// Validates symmetry, non-negativity and unit row sums (1e-12).
  static MixingMatrix from_dense(Eigen::MatrixXd weights);
  /// (1/n) 1 1^T, the rank-one exact averaging matrix.
  static MixingMatrix uniform(std::size_t n);
  static MixingMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return static_cast<std::size_t>(w_.rows()); }
  const Eigen::MatrixXd& weights() const noexcept { return w_; }
  double operator()(std::size_t i, std::size_t j) const { return w_(i, j); }
  double rho() const noexcept { return rho_; }
  double gap_factor() const noexcept { return gap_factor_; }
  const std::vector<Link>& links() const noexcept { return links_; }
  bool is_uniform_average() const noexcept { return uniform_; }

  /// x <- x W for a d x n matrix of column iterates.
  ///
  /// Applied as x_j + sum_i w_ij (x_i - x_j) over the off-diagonal links, so
  /// columns that agree before mixing agree bit for bit afterwards. The
  /// rank-one averaging matrix broadcasts the exact column mean.
  void mix(Eigen::Ref<Eigen::MatrixXd> x) const;

 private:
  MixingMatrix(Eigen::MatrixXd w, bool uniform);

  Eigen::MatrixXd w_;
  std::vector<Link> links_;
  double rho_ = 0.0;
  double gap_factor_ = 1.0;
  bool uniform_ = false;
};

enum class WeightRule {
  /// w_ij = 1 / (1 + max(d_i, d_j)). Every diagonal entry is positive, so
  /// rho < 1 on any connected graph.
  kMetropolisHastings,
  /// w_ij = 1 / max(d_i, d_j). Bipartite graphs can end up with a zero
  /// diagonal and rho == 1 (e.g. a 4-cycle).
  kMaxDegree,
};

/// Local-degree weights on edges, w_ii = 1 - sum_{j != i} w_ij.
MixingMatrix metropolis_weights(const Graph& g, WeightRule rule = WeightRule::kMetropolisHastings);

/// |lambda_2| of a symmetric matrix, eigenvalues ordered by magnitude;
/// 0 for a 1 x 1 matrix. Values within 1e-12 of 1 are reported as 1.
double second_eigenvalue_magnitude(const Eigen::MatrixXd& w);
inline double second_eigenvalue_magnitude(const MixingMatrix& w) {
  return second_eigenvalue_magnitude(w.weights());
}

struct ContractionCheck {
  double lhs;  // ||Y W||_F^2
  double rhs;  // rho^2 ||Y||_F^2
};

/// Both sides of ||Y W||_F^2 <= rho^2 ||Y||_F^2 for Y with zero row sums.
/// Rows summing to more than 1e-9 (scaled by the row's l1 norm) are rejected.
ContractionCheck contraction_check(const MixingMatrix& w, const Eigen::MatrixXd& y);

// Edge-list text: "n m" then m lines "i j", 1-based.
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);

// Dense CSV, n rows of n values with 17 significant digits.
void write_matrix_csv(std::ostream& out, const MixingMatrix& w);
MixingMatrix read_matrix_csv(std::istream& in);

}  // namespace dlsgd
