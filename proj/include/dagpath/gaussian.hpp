#pragma once

#include <cstddef>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <dagpath/dataset.hpp>
#include <dagpath/graph.hpp>
#include <dagpath/path.hpp>
#include <dagpath/penalty.hpp>
#include <dagpath/prior.hpp>

namespace dagpath {

/// Linear Gaussian SEM X_j = mu_j + sum_i B(i, j) X_i + eps_j with
/// Var(eps_j) = vars(j). Rows of `coefs` are parents, columns are children.
struct GaussianParams {
  Eigen::SparseMatrix<double> coefs;
  Eigen::VectorXd vars;
  Eigen::VectorXd intercepts;

  static GaussianParams empty(std::size_t p);
  std::size_t size() const { return static_cast<std::size_t>(vars.size()); }
  Dag support(const std::vector<std::string>& names) const;
};

// Intervention-masked negative log-likelihood without the 2*pi constant:
// sum_j [ |O_j|/2 log vars_j + RSS_j / (2 vars_j) ], with RSS_j taken over
// the rows where node j is not intervened. Intervened rows still act as
// predictors for other nodes.
double gaussian_negloglik(const GaussianParams& params, const Dataset& ds, const RowPartition& part);

// d/dB(i, j) of gaussian_negloglik, as a dense p x p matrix.
Eigen::MatrixXd gaussian_negloglik_gradient(const GaussianParams& params, const Dataset& ds,
                                            const RowPartition& part);

/// Block coordinate descent for the L1/MCP-penalized Gaussian likelihood
/// over DAGs, holding warm-start state between successive lambdas.
///
/// The objective is negloglik / n + sum rho_{lambda/sqrt(n)}(B(i, j)), with
/// whitelisted edges unpenalized. An outer sweep visits every unordered pair
/// {a, b} (a < b, lexicographic) and picks the best of: no edge, a -> b, or
/// b -> a, each direction solved in closed form with the other held at zero
/// and discarded if it would close a cycle. Options are compared with the
/// noise variances of a and b profiled out, and those two variances are
/// refreshed after the update. Pairs with no edge whose candidates provably
/// threshold to zero are skipped in O(1). The inner loop then cycles over
/// the current edges only and refreshes the noise variances, until the
/// largest parameter change falls below error_tol.
///
/// Copying a learner copies its full state, so a copy taken after lambda_m
/// reproduces the path from lambda_{m+1} on exactly.
class GaussianLearner {
 public:
  // Uses `data` as given; estimate_dag_gaussian() standardizes first.
  GaussianLearner(const Dataset& data, const LearnOptions& opts, const PriorKnowledge& prior = {});

  void set_lambda(double lambda);
  double lambda() const { return lambda_; }

  // Returns true if the edge set changed.
  bool edge_block_update(int a, int b);
  // Cycles over the current edges into each node, then refreshes its noise
  // variance, until that node's largest parameter change falls below
  // error_tol. Nodes are independent here, so each converges on its own.
  // Returns the most passes any node needed.
  std::size_t inner_sweep();

  // Outer and inner loops to convergence (or max_iters) at one lambda.
  PathEstimate solve(double lambda);

  double objective() const;
  const Dag& dag() const { return dag_; }
  GaussianParams params() const;
  std::size_t descent_violations() const { return violations_; }

 private:
  struct Candidate {
    double value = 0.0;     // thresholded coordinate minimizer
    double rss_zero = 0.0;  // child's masked RSS with this coefficient at 0
    double rss = 0.0;       // ... and at `value`
  };

  Candidate candidate(int parent, int child) const;
  // Child's share of negloglik / n with its variance at the floored profile
  // maximum for the given RSS.
  double profiled_loss(int child, double rss) const;
  double partial_target(int parent, int child, double* curvature) const;
  void set_coef(int parent, int child, double value);
  void refit_required(int parent, int child);
  void check_descent(double before);
  double node_pass(int j);
  // Stores X^T R, resets the drift bounds used by screened_out(), and
  // rebuilds the reachability index.
  void snapshot_gradients();
  // True when the pair has no edge and both directions are certain to
  // threshold to zero.
  bool screened_out(int a, int b) const;

  LearnOptions opts_;
  PriorMask mask_;
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  Eigen::MatrixXd x_;
  std::vector<std::vector<int>> intervened_;
  Eigen::VectorXd observed_count_;
  Eigen::MatrixXd sq_;     // sq_(k, j) = sum over O_j of x_k^2
  Eigen::MatrixXd resid_;  // zero on intervened rows
  Eigen::MatrixXd gram_;   // x_^T resid_ at the last snapshot
  Eigen::VectorXd drift_;  // bound on ||resid_.col(j) - snapshot column||
  Eigen::VectorXd rss_;        // squared norms of the resid_ columns
  Eigen::VectorXd zero_loss_;  // profiled_loss(j, rss_(j))
  Eigen::MatrixXd coef_;
  Eigen::VectorXd vars_;
  Dag dag_;
  ReachabilityIndex reach_;
  Penalty pen_;
  double lambda_ = 0.0;
  double max_change_ = 0.0;
  std::size_t violations_ = 0;
};

// Standardizes `ds`, then traces the solution path over the lambda grid,
// warm-starting each fit from the previous one. Stops after the first
// estimate with more than edge_threshold edges.
SolutionPath estimate_dag_gaussian(const Dataset& ds, const LearnOptions& opts, const PriorKnowledge& prior = {});

}  // namespace dagpath
