#include <dagpath/error.hpp>
#include <dagpath/graph.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"

namespace dagpath {
namespace {

TEST(DagTest, WithSizeNamesNodes) {
  const Dag g = Dag::with_size(3);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.name(0), "V1");
  EXPECT_EQ(g.name(2), "V3");
  EXPECT_EQ(g.find("V2"), 1);
  EXPECT_FALSE(g.find("V4").has_value());
  EXPECT_EQ(g.num_edges(), 0u);
}

TEST(DagTest, RejectsDuplicateNames) {
  EXPECT_THROW(Dag({"a", "b", "a"}), InputError);
}

TEST(DagTest, AddEdgeOutcomes) {
  Dag g = Dag::with_size(3);
  EXPECT_EQ(g.add_edge_checked(0, 1), EdgeOutcome::added);
  EXPECT_EQ(g.add_edge_checked(0, 1), EdgeOutcome::exists);
  EXPECT_EQ(g.add_edge_checked(1, 2), EdgeOutcome::added);
  EXPECT_EQ(g.add_edge_checked(2, 0), EdgeOutcome::would_cycle);
  EXPECT_EQ(g.add_edge_checked(1, 0), EdgeOutcome::would_cycle);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_THROW(g.add_edge_checked(1, 1), std::invalid_argument);
  EXPECT_THROW(g.add_edge_checked(0, 3), std::out_of_range);
  EXPECT_THROW(g.add_edge_checked(-1, 0), std::out_of_range);
}

TEST(DagTest, RemoveEdge) {
  Dag g = Dag::with_size(3);
  g.add_edge_checked(0, 1);
  g.add_edge_checked(1, 2);
  EXPECT_TRUE(g.remove_edge(0, 1));
  EXPECT_FALSE(g.remove_edge(0, 1));
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_FALSE(g.has_path(0, 2));
  EXPECT_EQ(g.add_edge_checked(2, 0), EdgeOutcome::added);
}

TEST(DagTest, ParentsAndChildrenStaySorted) {
  Dag g = Dag::with_size(5);
  g.add_edge_checked(4, 2);
  g.add_edge_checked(0, 2);
  g.add_edge_checked(3, 2);
  g.add_edge_checked(3, 1);
  EXPECT_EQ(g.parents(2), (std::vector<int>{0, 3, 4}));
  EXPECT_EQ(g.children(3), (std::vector<int>{1, 2}));
  const std::vector<Edge> expected{{3, 1}, {0, 2}, {3, 2}, {4, 2}};
  EXPECT_EQ(g.edges(), expected);
}

TEST(DagTest, TopologicalSortPrefersSmallIndices) {
  Dag g = Dag::with_size(4);
  g.add_edge_checked(3, 0);
  g.add_edge_checked(2, 1);
  EXPECT_EQ(g.topological_sort(), (std::vector<int>{2, 1, 3, 0}));
}

// Reachability and cycle refusal against a Floyd-Warshall closure, over
// random insertion sequences.
TEST(DagTest, RandomInsertionsMatchClosureOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 2 + rng() % 12;
    Dag g = Dag::with_size(p);
    for (int step = 0; step < 60; ++step) {
      const int a = static_cast<int>(rng() % p);
      const int b = static_cast<int>(rng() % p);
      if (a == b) continue;
      if (rng() % 5 == 0) {
        g.remove_edge(a, b);
        continue;
      }
      const auto reach = oracle::transitive_closure(g);
      const bool had = g.has_edge(a, b);
      const EdgeOutcome out = g.add_edge_checked(a, b);
      if (had) EXPECT_EQ(out, EdgeOutcome::exists);
      else if (reach[b][a]) EXPECT_EQ(out, EdgeOutcome::would_cycle);
      else EXPECT_EQ(out, EdgeOutcome::added);
      ASSERT_TRUE(oracle::is_acyclic(g));
    }
    const auto reach = oracle::transitive_closure(g);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        EXPECT_EQ(g.has_path(static_cast<int>(i), static_cast<int>(j)), i == j || reach[i][j]);
    EXPECT_TRUE(oracle::is_topological_order(g, g.topological_sort()));
  }
}

TEST(DagTest, AdjacencyRowsAreParents) {
  Dag g({"a", "b", "c"});
  g.add_edge_checked(0, 2);
  g.add_edge_checked(1, 2);
  const Eigen::SparseMatrix<int> adj = adjacency_matrix(g);
  EXPECT_EQ(adj.coeff(0, 2), 1);
  EXPECT_EQ(adj.coeff(2, 0), 0);
  EXPECT_EQ(adj.nonZeros(), 2);
  EXPECT_EQ(dag_from_adjacency(g.names(), adj), g);
}

TEST(DagTest, AdjacencyRejectsCyclesAndDiagonal) {
  Eigen::SparseMatrix<int> adj(2, 2);
  adj.insert(0, 1) = 1;
  adj.insert(1, 0) = 1;
  EXPECT_THROW(dag_from_adjacency({"a", "b"}, adj), InputError);
  Eigen::SparseMatrix<int> diag(2, 2);
  diag.insert(1, 1) = 1;
  EXPECT_THROW(dag_from_adjacency({"a", "b"}, diag), InputError);
}

TEST(DagTest, EdgeListRoundTrip) {
  std::mt19937_64 rng(3);
  const Dag g = oracle::random_dag(9, 0.3, rng);
  std::stringstream ss;
  write_edge_list(ss, g);
  EXPECT_EQ(read_edge_list(ss, g.names()), g);
}

TEST(DagTest, EdgeListErrors) {
  std::istringstream unknown("a\tz\n");
  EXPECT_THROW(read_edge_list(unknown, {"a", "b"}), InputError);
  std::istringstream cycle("a\tb\nb\ta\n");
  EXPECT_THROW(read_edge_list(cycle, {"a", "b"}), InputError);
  std::istringstream malformed("a b c\n");
  EXPECT_THROW(read_edge_list(malformed, {"a", "b"}), InputError);
}

TEST(DagTest, AdjacencyCsvRoundTrip) {
  std::mt19937_64 rng(11);
  const Dag g = oracle::random_dag(7, 0.3, rng);
  std::stringstream ss;
  write_adjacency_csv(ss, g);
  EXPECT_EQ(read_adjacency_csv(ss), g);
  std::istringstream cyc(",a,b\na,0,1\nb,1,0\n");
  EXPECT_THROW(read_adjacency_csv(cyc), InputError);
  std::istringstream label(",a,b\na,0,1\nc,0,0\n");
  EXPECT_THROW(read_adjacency_csv(label), InputError);
  std::istringstream value(",a,b\na,0,2\nb,0,0\n");
  EXPECT_THROW(read_adjacency_csv(value), InputError);
}

// The incremental index must agree with plain search through any mix of
// insertions and removals, including stale states between rebuilds.
TEST(ReachabilityIndexTest, MatchesSearchUnderEdits) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 2 + rng() % 70;
    Dag g = Dag::with_size(p);
    Dag plain = Dag::with_size(p);
    ReachabilityIndex index(p);
    for (int step = 0; step < 300; ++step) {
      const int a = static_cast<int>(rng() % p);
      const int b = static_cast<int>(rng() % p);
      if (a == b) continue;
      if (step % 50 == 49) index.rebuild(g);
      if (rng() % 4 == 0) {
        EXPECT_EQ(index.remove_edge(g, a, b), plain.remove_edge(a, b));
      } else {
        EXPECT_EQ(index.add_edge(g, a, b), plain.add_edge_checked(a, b));
      }
      ASSERT_EQ(g, plain);
      const int u = static_cast<int>(rng() % p);
      const int v = static_cast<int>(rng() % p);
      EXPECT_EQ(index.has_path(g, u, v), plain.has_path(u, v));
    }
    for (int u = 0; u < static_cast<int>(p); ++u)
      for (int v = 0; v < static_cast<int>(p); ++v) ASSERT_EQ(index.has_path(g, u, v), g.has_path(u, v));
  }
}

TEST(DagTest, DotAndCsvOutput) {
  Dag g({"x", "y"});
  g.add_edge_checked(0, 1);
  std::ostringstream dot;
  write_dot(dot, g);
  EXPECT_NE(dot.str().find("\"x\" -> \"y\";"), std::string::npos);
  EXPECT_EQ(dot.str().rfind("digraph", 0), 0u);
  std::ostringstream csv;
  write_adjacency_csv(csv, g);
  EXPECT_EQ(csv.str(), ",x,y\nx,0,1\ny,0,0\n");
}

}  // namespace
}  // namespace dagpath
