#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include <dagpath/dataset.hpp>
#include <dagpath/graph.hpp>
#include <dagpath/path.hpp>
#include <dagpath/penalty.hpp>
#include <dagpath/prior.hpp>

namespace dagpath {

/// Multi-logit CPDs. For child j with r_j levels, the score of level u is
/// intercepts[j](u) + sum over parents i of blocks(i, j)(x_i, u), where the
/// row x_i of the d_i x r_j block is the parent's level (the reference level
/// d_i contributes nothing). The reference column u = r_j - 1 of every block
/// and intercept vector stays at zero.
struct DiscreteParams {
  std::vector<int> levels;
  std::vector<Eigen::VectorXd> intercepts;
  // blocks[parent * p + child]; an empty matrix means no edge.
  std::vector<Eigen::MatrixXd> blocks;
  // Set by refits that hit the separation clamp.
  std::vector<bool> separated;

  static DiscreteParams empty(const std::vector<int>& levels);
  std::size_t size() const { return levels.size(); }
  const Eigen::MatrixXd& block(int parent, int child) const { return blocks[index(parent, child)]; }
  Eigen::MatrixXd& block(int parent, int child) { return blocks[index(parent, child)]; }
  bool has_block(int parent, int child) const;
  Dag support(const std::vector<std::string>& names) const;

 private:
  std::size_t index(int parent, int child) const {
    return static_cast<std::size_t>(parent) * levels.size() + static_cast<std::size_t>(child);
  }
};

// Level probabilities of node j given a full row of level indices (only the
// parents of j are read). Throws std::out_of_range on a bad level.
Eigen::VectorXd multilogit_prob(const DiscreteParams& params, int j, const Eigen::Ref<const Eigen::VectorXi>& row);

// -sum over O_j of log Pr(x_hj | parents), node j only.
double multilogit_negloglik(const DiscreteParams& params, const Dataset& ds, const RowPartition& part, int j);

// Gradient of multilogit_negloglik with respect to the intercepts and every
// nonempty block into node j, laid out like DiscreteParams (other blocks
// empty). Reference columns are included and are generally nonzero.
DiscreteParams multilogit_negloglik_gradient(const DiscreteParams& params, const Dataset& ds,
                                             const RowPartition& part, int j);

/// Block coordinate descent for the group-lasso penalized multi-logit
/// likelihood over DAGs.
///
/// Objective: sum_j negloglik_j / n + sum over edges of
/// (lambda / sqrt(n)) * w_ij * ||B_ij||_F with w_ij = weight_scale *
/// sqrt(d_i r_j). Each edge block is minimized by proximal gradient with a
/// halving line search; intercepts get damped Newton steps. Structure logic
/// (pair sweep, tie rules, cycle checks, prior handling) mirrors
/// GaussianLearner.
class DiscreteLearner {
 public:
  DiscreteLearner(const Dataset& data, const LearnOptions& opts, const PriorKnowledge& prior = {});

  void set_lambda(double lambda);
  double lambda() const { return lambda_; }

  bool edge_group_update(int a, int b);
  double inner_pass();
  std::size_t inner_sweep();
  PathEstimate solve(double lambda);

  // Largest ||grad B_ij|| / w_ij over free, admissible zero blocks at the
  // current state, on the per-observation loss scale.
  double max_zero_block_gradient() const;

  double objective() const;
  const Dag& dag() const { return dag_; }
  DiscreteParams params() const;
  std::size_t descent_violations() const { return violations_; }

 private:
  struct BlockFit {
    Eigen::MatrixXd value;  // empty when zero
    Eigen::MatrixXd eta;
    double loss = 0.0;      // negloglik of the child at `value`
    double delta = 0.0;     // objective change against the zero block
  };

  double weight(int parent, int child) const;
  double node_loss(int child, const Eigen::MatrixXd& eta) const;
  // softmax(eta) minus the one-hot observed level, row by row.
  Eigen::MatrixXd residuals(int child, const Eigen::MatrixXd& eta) const;
  Eigen::MatrixXd scatter_gradient(int parent, int child, const Eigen::MatrixXd& resid) const;
  Eigen::MatrixXd block_gradient(int parent, int child, const Eigen::MatrixXd& eta) const {
    return scatter_gradient(parent, child, residuals(child, eta));
  }
  void add_block_scores(int parent, int child, const Eigen::MatrixXd& delta, Eigen::MatrixXd& eta) const;
  BlockFit fit_block(int parent, int child, bool penalized, std::size_t max_steps) const;
  void apply_block(int parent, int child, BlockFit fit);
  double refresh_intercept(int child);
  void check_descent(double before);

  LearnOptions opts_;
  PriorMask mask_;
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<int> levels_;
  Eigen::MatrixXi x_;
  std::vector<std::vector<int>> observed_;
  std::vector<Eigen::MatrixXd> eta_;  // |O_j| x r_j scores
  std::vector<Eigen::MatrixXd> resid_;  // residuals(j, eta_[j])
  std::vector<double> loss_;
  std::vector<Eigen::VectorXd> intercept_;
  std::vector<Eigen::MatrixXd> blocks_;
  Dag dag_;
  double lambda_ = 0.0;
  double lambda_eff_ = 0.0;
  double max_change_ = 0.0;
  std::size_t violations_ = 0;
};

// Smallest lambda (on the sqrt(n) scale) at which the all-zero model, with
// intercepts and whitelisted blocks fitted, satisfies the group optimality
// conditions, inflated by 1e-9 relative.
double discrete_lambda_max(const Dataset& ds, const LearnOptions& opts, const PriorKnowledge& prior = {});

// Discrete counterpart of estimate_dag_gaussian; edge_threshold defaults to 3p.
SolutionPath estimate_dag_discrete(const Dataset& ds, const LearnOptions& opts, const PriorKnowledge& prior = {});

}  // namespace dagpath
