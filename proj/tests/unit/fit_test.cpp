#include <dagpath/error.hpp>
#include <dagpath/fit.hpp>
#include <dagpath/simulate.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

namespace dagpath {
namespace {

GaussianParams random_params(std::size_t p, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.3, 2.0);
  const Dag dag = oracle::random_dag(p, 0.4, rng);
  GaussianParams params = GaussianParams::empty(p);
  std::vector<Eigen::Triplet<double>> t;
  for (const Edge& e : dag.edges()) t.emplace_back(e.parent, e.child, z(rng));
  params.coefs.setFromTriplets(t.begin(), t.end());
  for (std::size_t j = 0; j < p; ++j) params.vars(j) = u(rng);
  return params;
}

TEST(RefitTest, GaussianSatisfiesNormalEquations) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t p = 3 + trial % 5;
    const GaussianParams truth = random_params(p, rng);
    const Dag dag = truth.support(Dag::with_size(p).names());
    const Dataset ds = simulate_gaussian(truth, dag.names(), 80, per_node_interventions(p, 80, 4), trial);
    const RowPartition part = row_partition(ds);
    const GaussianParams fit = refit_gaussian(dag, ds, part);
    const Eigen::MatrixXd B(fit.coefs);
    for (std::size_t jj = 0; jj < p; ++jj) {
      const int j = static_cast<int>(jj);
      Eigen::VectorXd normal = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p) + 1);
      double rss = 0;
      for (int h : part.observed[jj]) {
        double r = ds.values()(h, j) - fit.intercepts(j);
        for (int i : dag.parents(j)) r -= B(i, j) * ds.values()(h, i);
        normal(0) += r;
        for (int i : dag.parents(j)) normal(i + 1) += r * ds.values()(h, i);
        rss += r * r;
      }
      EXPECT_LT(normal.cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_NEAR(fit.vars(j), rss / static_cast<double>(part.observed[jj].size() - 1), 1e-10);
      for (int i = 0; i < static_cast<int>(p); ++i)
        if (!dag.has_edge(i, j)) EXPECT_EQ(B(i, j), 0.0);
    }
  }
}

TEST(RefitTest, GaussianRejectsTooFewRows) {
  Dag dag = Dag::with_size(3);
  dag.add_edge_checked(0, 2);
  dag.add_edge_checked(1, 2);
  const Dataset ds = Dataset::create(Eigen::MatrixXd::Random(3, 3), DataKind::continuous);
  EXPECT_THROW(refit_gaussian(dag, ds, row_partition(ds)), InputError);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 3);
  x.col(1) = 2 * x.col(0);
  const Dataset collinear = Dataset::create(x, DataKind::continuous);
  EXPECT_THROW(refit_gaussian(dag, collinear, row_partition(collinear)), InputError);
}

// One parent (or none) makes the additive multi-logit model saturated, so
// the fitted conditionals must equal the empirical ones.
TEST(RefitTest, SaturatedDiscreteMatchesEmpiricalFrequencies) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 3;
    const int r = 2 + (trial / 3) % 3;
    Eigen::MatrixXi counts(d, r);
    std::vector<double> xs, ys;
    for (int k = 0; k < d; ++k)
      for (int u = 0; u < r; ++u) {
        counts(k, u) = 1 + static_cast<int>(rng() % 9);
        for (int c = 0; c < counts(k, u); ++c) {
          xs.push_back(k);
          ys.push_back(u);
        }
      }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(xs.size()), 2);
    for (std::size_t h = 0; h < xs.size(); ++h) {
      x(static_cast<Eigen::Index>(h), 0) = xs[h];
      x(static_cast<Eigen::Index>(h), 1) = ys[h];
    }
    const Dataset ds = Dataset::create(x, DataKind::discrete);
    Dag dag = Dag::with_size(2);
    dag.add_edge_checked(0, 1);
    const DiscreteParams fit = refit_discrete(dag, ds, row_partition(ds));
    EXPECT_FALSE(fit.separated[1]);
    for (int k = 0; k < d; ++k) {
      Eigen::VectorXi row(2);
      row << k, 0;
      const Eigen::VectorXd prob = multilogit_prob(fit, 1, row);
      const double total = counts.row(k).sum();
      for (int u = 0; u < r; ++u) EXPECT_NEAR(prob(u), counts(k, u) / total, 1e-6);
    }
    const Eigen::VectorXd marginal = multilogit_prob(fit, 0, Eigen::VectorXi::Zero(2));
    for (int k = 0; k < d; ++k) EXPECT_NEAR(marginal(k), counts.row(k).sum() / static_cast<double>(xs.size()), 1e-6);
  }
}

TEST(RefitTest, SeparationIsFlagged) {
  Eigen::MatrixXd x(8, 2);
  x << 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1;
  const Dataset ds = Dataset::create(x, DataKind::discrete);
  Dag dag = Dag::with_size(2);
  dag.add_edge_checked(0, 1);
  const DiscreteParams fit = refit_discrete(dag, ds, row_partition(ds));
  EXPECT_TRUE(fit.separated[1]);
  EXPECT_FALSE(fit.separated[0]);
  EXPECT_TRUE(std::isfinite(fit.block(0, 1)(0, 0)));
}

TEST(CovarianceTest, PrecisionInvertsCovariance) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 1 + trial % 12;
    const GaussianParams params = random_params(p, rng);
    const Eigen::MatrixXd prod = implied_precision(params) * implied_covariance(params);
    EXPECT_LT((prod - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(CovarianceTest, ChainByHand) {
  GaussianParams params = GaussianParams::empty(2);
  std::vector<Eigen::Triplet<double>> t{{0, 1, 2.0}};
  params.coefs.setFromTriplets(t.begin(), t.end());
  params.vars << 1.0, 0.5;
  Eigen::Matrix2d want;
  want << 1.0, 2.0, 2.0, 4.5;
  EXPECT_LT((implied_covariance(params) - want).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(CovarianceTest, MonteCarloAgreesWithImpliedCovariance) {
  std::mt19937_64 rng(4);
  const GaussianParams params = random_params(6, rng);
  const std::size_t n = 200000;
  const Dataset ds = simulate_gaussian(params, Dag::with_size(6).names(), n, InterventionList(n), 4);
  const Eigen::MatrixXd sigma = implied_covariance(params);
  EXPECT_LT((oracle::sample_covariance(ds.values()) - sigma).norm() / sigma.norm(), 0.03);
}

TEST(CovarianceTest, RejectsBadParameters) {
  GaussianParams params = GaussianParams::empty(2);
  params.vars(1) = -1;
  EXPECT_THROW(implied_covariance(params), std::invalid_argument);
  EXPECT_THROW(implied_precision(params), std::invalid_argument);
}

TEST(CovarianceTest, EstimatesFollowThePath) {
  std::mt19937_64 rng(5);
  const GaussianParams params = random_params(5, rng);
  const Dataset ds = simulate_gaussian(params, Dag::with_size(5).names(), 300, InterventionList(300), 5);
  LearnOptions opts;
  opts.lambdas_length = 6;
  const auto cov = estimate_covariance(ds, opts);
  const auto prec = estimate_precision(ds, opts, {}, 2);
  ASSERT_EQ(cov.size(), prec.size());
  for (std::size_t m = 0; m < cov.size(); ++m)
    EXPECT_LT((cov[m] * prec[m] - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-8);
  // The first estimate is the empty graph: a diagonal of sample variances.
  const Eigen::MatrixXd sample = oracle::sample_covariance(ds.values());
  EXPECT_LT((cov[0] - Eigen::MatrixXd(sample.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ParallelRefitTest, ThreadCountDoesNotChangeResults) {
  std::mt19937_64 rng(6);
  const GaussianParams params = random_params(6, rng);
  const Dataset ds = simulate_gaussian(params, Dag::with_size(6).names(), 200, InterventionList(200), 6);
  const SolutionPath path = estimate_dag_gaussian(ds, {});
  EXPECT_EQ(path_loglik(path, ds, 1), path_loglik(path, ds, 4));
}

}  // namespace
}  // namespace dagpath
