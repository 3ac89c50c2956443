#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include <dagpath/dataset.hpp>
#include <dagpath/discrete.hpp>
#include <dagpath/gaussian.hpp>
#include <dagpath/graph.hpp>
#include <dagpath/path.hpp>
#include <dagpath/prior.hpp>

namespace dagpath {

// Unpenalized least squares of each node on its parents, with an intercept,
// over the rows where the node is not intervened. Variances use divisor
// |O_j| - 1. Throws InputError naming the node when its design is
// rank-deficient or has more columns than rows.
GaussianParams refit_gaussian(const Dag& dag, const Dataset& ds, const RowPartition& part);

// Unpenalized multi-logit regression of each node on its parents by Newton's
// method (gradient norm below 1e-8 or 100 iterations). A node whose
// coefficients pass 1e3 in magnitude, or whose fit does not converge, has
// them clamped and is flagged in `separated`.
DiscreteParams refit_discrete(const Dag& dag, const Dataset& ds, const RowPartition& part);

// One refit per path estimate; estimates are spread over `threads` workers
// and returned in path order.
std::vector<GaussianParams> estimate_parameters_gaussian(const SolutionPath& path, const Dataset& ds,
                                                         std::size_t threads = 1);
std::vector<DiscreteParams> estimate_parameters_discrete(const SolutionPath& path, const Dataset& ds,
                                                         std::size_t threads = 1);

// Sigma = (I - B)^{-T} Omega (I - B)^{-1}, by forward substitution in
// topological order.
Eigen::MatrixXd implied_covariance(const GaussianParams& params);
// Gamma = (I - B) Omega^{-1} (I - B)^T.
Eigen::MatrixXd implied_precision(const GaussianParams& params);

// estimate_dag_gaussian, then a refit and the implied matrix per estimate.
std::vector<Eigen::MatrixXd> estimate_covariance(const Dataset& ds, const LearnOptions& opts,
                                                 const PriorKnowledge& prior = {}, std::size_t threads = 1);
std::vector<Eigen::MatrixXd> estimate_precision(const Dataset& ds, const LearnOptions& opts,
                                                const PriorKnowledge& prior = {}, std::size_t threads = 1);

// Masked log-likelihood of the refit of `dag` (Gaussian without the 2 pi
// constant).
double refit_loglik(const Dag& dag, const Dataset& ds, const RowPartition& part);
std::vector<double> path_loglik(const SolutionPath& path, const Dataset& ds, std::size_t threads = 1);

}  // namespace dagpath
