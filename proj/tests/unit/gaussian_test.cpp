#include <dagpath/error.hpp>
#include <dagpath/gaussian.hpp>
#include <dagpath/selection.hpp>
#include <dagpath/simulate.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

namespace dagpath {
namespace {

struct Problem {
  GaussianParams params;
  Dataset data;
};

// Random acyclic parameters (dense B drawn over a random DAG) and data with
// some rows intervening random nodes.
Problem random_problem(std::size_t p, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.5, 2.0);
  const Dag dag = oracle::random_dag(p, 0.4, rng);
  GaussianParams params = GaussianParams::empty(p);
  std::vector<Eigen::Triplet<double>> t;
  for (const Edge& e : dag.edges()) t.emplace_back(e.parent, e.child, z(rng));
  params.coefs.setFromTriplets(t.begin(), t.end());
  for (std::size_t j = 0; j < p; ++j) {
    params.vars(j) = u(rng);
    params.intercepts(j) = z(rng);
  }
  InterventionList plan(n);
  for (auto& row : plan)
    if (rng() % 3 == 0) row.push_back(static_cast<int>(rng() % p));
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
  return {params, Dataset::create(x, DataKind::continuous, {}, std::nullopt, plan)};
}

TEST(GaussianLikelihoodTest, MatchesDirectSum) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Problem pr = random_problem(2 + seed % 5, 40, seed);
    const Eigen::MatrixXd B(pr.params.coefs);
    const double want = oracle::gaussian_negloglik(pr.data.values(), pr.data.interventions(), B, pr.params.vars,
                                                   pr.params.intercepts);
    EXPECT_NEAR(gaussian_negloglik(pr.params, pr.data, row_partition(pr.data)), want, 1e-9 * std::abs(want));
  }
}

TEST(GaussianLikelihoodTest, GradientMatchesCentralDifferences) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Problem pr = random_problem(3 + seed % 3, 30, 100 + seed);
    const RowPartition part = row_partition(pr.data);
    const Eigen::MatrixXd grad = gaussian_negloglik_gradient(pr.params, pr.data, part);
    const Eigen::Index p = grad.rows();
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (i == j) continue;
        Eigen::MatrixXd B(pr.params.coefs);
        auto f = [&](double v) {
          GaussianParams q = pr.params;
          Eigen::MatrixXd Bv = B;
          Bv(i, j) = v;
          q.coefs = Bv.sparseView(0.0, 0.0);
          return gaussian_negloglik(q, pr.data, part);
        };
        const double fd = oracle::central_difference(f, B(i, j), 1e-5);
        EXPECT_NEAR(grad(i, j), fd, 1e-5 * std::max(1.0, std::abs(fd))) << i << "->" << j;
      }
    }
  }
}

TEST(GaussianLikelihoodTest, RejectsBadInputs) {
  const Problem pr = random_problem(3, 10, 5);
  GaussianParams bad = pr.params;
  bad.vars(0) = 0;
  EXPECT_THROW(gaussian_negloglik(bad, pr.data, row_partition(pr.data)), std::invalid_argument);
}

Dataset chain_data(std::size_t n, std::size_t intervened, std::uint64_t seed) {
  const Dag truth = [] {
    Dag d = Dag::with_size(2);
    d.add_edge_checked(0, 1);
    return d;
  }();
  GaussianParams gp = GaussianParams::empty(2);
  std::vector<Eigen::Triplet<double>> t{{0, 1, 1.0}};
  gp.coefs.setFromTriplets(t.begin(), t.end());
  InterventionList plan(n);
  for (std::size_t h = 0; h < intervened; ++h) plan[h] = {1};
  return simulate_gaussian(gp, truth.names(), n, plan, seed);
}

TEST(GaussianLearnerTest, RootNIsEmpty) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset ds = simulate_gaussian(random_gaussian_params(random_dag(GraphFamily::erdos, 12, 20, seed), seed),
                                         Dag::with_size(12).names(), 200, InterventionList(200), seed);
    LearnOptions opts;
    opts.lambdas = {std::sqrt(200.0), 1.0};
    const SolutionPath path = estimate_dag_gaussian(ds, opts);
    EXPECT_EQ(path[0].nedge, 0u);
  }
}

// Two nodes at a vanishing penalty: the learner's orientation equals the
// best graph by exhaustive profile likelihood.
TEST(GaussianLearnerTest, TwoNodeOrientationMatchesProfileEnumeration) {
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Dataset raw = chain_data(200, 40 + 3 * seed, seed);
    const Dataset ds = standardize(raw).data;
    LearnOptions opts;
    opts.penalty = PenaltyKind::l1;
    GaussianLearner learner(ds, opts);
    learner.solve(1e-8);
    const auto prof = oracle::two_node_profiles(ds.values(), ds.interventions(), opts.var_floor);
    if (std::abs(prof[1] - prof[2]) < 1e-6) continue;
    ++compared;
    const bool forward = prof[1] < prof[2];
    EXPECT_EQ(learner.dag().has_edge(0, 1), forward) << "seed " << seed;
    EXPECT_EQ(learner.dag().has_edge(1, 0), !forward) << "seed " << seed;
  }
  EXPECT_GT(compared, 30);
}

TEST(GaussianLearnerTest, ObjectiveNeverIncreases) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset ds = simulate_gaussian(random_gaussian_params(random_dag(GraphFamily::erdos, 8, 10, seed), seed),
                                         Dag::with_size(8).names(), 100, per_node_interventions(8, 100, 3), seed);
    LearnOptions opts;
    opts.check_descent = true;
    opts.penalty = seed % 2 ? PenaltyKind::mcp : PenaltyKind::l1;
    const SolutionPath path = estimate_dag_gaussian(ds, opts);
    EXPECT_EQ(path.descent_violations, 0u);
  }
}

TEST(GaussianLearnerTest, CopyReproducesRestOfPath) {
  const Dataset ds = standardize(simulate_gaussian(random_gaussian_params(random_dag(GraphFamily::erdos, 10, 14, 3), 3),
                                                   Dag::with_size(10).names(), 150, InterventionList(150), 3))
                         .data;
  const std::vector<double> grid = generate_lambdas(std::sqrt(150.0), 0.05, 8, GridScale::log);
  GaussianLearner a(ds, {});
  std::vector<Dag> dags;
  std::optional<GaussianLearner> b;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    dags.push_back(a.solve(grid[k]).dag);
    if (k == 3) b = a;
  }
  for (std::size_t k = 4; k < grid.size(); ++k) EXPECT_EQ(b->solve(grid[k]).dag, dags[k]);
}

TEST(GaussianLearnerTest, FullyIntervenedNodeHasNoParents) {
  const Dataset raw = chain_data(100, 100, 9);
  LearnOptions opts;
  opts.lambdas = {1.0, 0.01};
  const SolutionPath path = estimate_dag_gaussian(raw, opts);
  for (const auto& est : path.estimates) EXPECT_TRUE(est.dag.parents(1).empty());
}

TEST(GaussianLearnerTest, PriorIsHonored) {
  const Dataset ds = chain_data(200, 100, 4);
  LearnOptions opts;
  PriorKnowledge white{{{1, 0}}, {}};
  for (const auto& est : estimate_dag_gaussian(ds, opts, white).estimates) EXPECT_TRUE(est.dag.has_edge(1, 0));
  PriorKnowledge black{{}, {{0, 1}, {1, 0}}};
  for (const auto& est : estimate_dag_gaussian(ds, opts, black).estimates) EXPECT_EQ(est.nedge, 0u);
}

TEST(GaussianLearnerTest, RejectsGroupPenaltyAndDiscreteData) {
  const Dataset ds = chain_data(20, 0, 1);
  LearnOptions opts;
  opts.penalty = PenaltyKind::group_lasso;
  EXPECT_THROW(GaussianLearner(ds, opts), InputError);
  Eigen::MatrixXd x(4, 1);
  x << 0, 1, 0, 1;
  EXPECT_THROW(estimate_dag_gaussian(Dataset::create(x, DataKind::discrete), {}), InputError);
}

TEST(GaussianLearnerTest, PathStopsAfterEdgeThreshold) {
  const Dataset ds = simulate_gaussian(random_gaussian_params(random_dag(GraphFamily::erdos, 10, 25, 2), 2),
                                       Dag::with_size(10).names(), 100, InterventionList(100), 2);
  LearnOptions opts;
  opts.edge_threshold = 5;
  const SolutionPath path = estimate_dag_gaussian(ds, opts);
  ASSERT_GE(path.size(), 1u);
  EXPECT_GT(path.estimates.back().nedge, 5u);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) EXPECT_LE(path[k].nedge, 5u);
}

}  // namespace
}  // namespace dagpath
