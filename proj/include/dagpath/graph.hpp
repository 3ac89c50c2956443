#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

namespace dagpath {

struct Edge {
  int parent = 0;
  int child = 0;
  auto operator<=>(const Edge&) const = default;
};

enum class EdgeOutcome { added, would_cycle, exists };

/// Directed acyclic graph over a fixed, named node set.
///
/// Storage is a child-oriented adjacency list (each node keeps its sorted
/// parent set) plus the mirrored children lists used for reachability
/// queries. Node names are fixed at construction; every other API works on
/// integer indices. Acyclicity is an invariant: the only way to add an edge
/// is add_edge_checked(), which refuses insertions that would close a cycle.
class Dag {
 public:
  Dag() = default;
  explicit Dag(std::vector<std::string> names);

  // Nodes named "V1", ..., "Vp".
  static Dag with_size(std::size_t p);

  std::size_t size() const { return names_.size(); }
  std::size_t num_edges() const { return nedge_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int v) const;
  std::optional<int> find(std::string_view name) const;

  const std::vector<int>& parents(int child) const;
  const std::vector<int>& children(int parent) const;
  bool has_edge(int parent, int child) const;

  // True iff a directed path from -> ... -> to exists; a node reaches itself.
  bool has_path(int from, int to) const;

  // Adds parent -> child unless the edge exists or child already reaches
  // parent. Throws std::invalid_argument on self-loops and std::out_of_range
  // on bad indices.
  EdgeOutcome add_edge_checked(int parent, int child);
  bool remove_edge(int parent, int child);
  void clear_edges();

  // Kahn's algorithm; ties among ready nodes go to the smallest index.
  std::vector<int> topological_sort() const;

  // All edges ordered by child, then parent.
  std::vector<Edge> edges() const;

  bool operator==(const Dag& other) const = default;

 private:
  friend class ReachabilityIndex;
  void check_index(int v) const;
  void insert_edge(int parent, int child);

  std::vector<std::string> names_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::size_t nedge_ = 0;
};

/// Transitive closure of one Dag, kept alongside it for fast reachability
/// queries. Insertions update the closure in O(p^2 / 64). Removals leave it
/// as a superset of the true relation: a clear bit still proves there is no
/// path, and a set bit is confirmed by search until the next rebuild().
/// Route every change to the tracked graph through add_edge()/remove_edge(),
/// or call rebuild() after changing it directly.
class ReachabilityIndex {
 public:
  ReachabilityIndex() = default;
  explicit ReachabilityIndex(std::size_t p);

  bool has_path(const Dag& dag, int from, int to);
  // Same contract as Dag::add_edge_checked().
  EdgeOutcome add_edge(Dag& dag, int parent, int child);
  bool remove_edge(Dag& dag, int parent, int child);
  void rebuild(const Dag& dag);

 private:
  bool bit(int from, int to) const {
    return (reach_[static_cast<std::size_t>(from) * words_ + static_cast<std::size_t>(to) / 64] >> (to % 64)) & 1u;
  }

  std::size_t p_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> reach_;  // row u: nodes reachable from u, u excluded
  bool built_ = false;
  bool exact_ = false;  // no removals since the last rebuild
};

// Entry (i, j) is 1 iff i -> j: rows are parents, columns are children.
Eigen::SparseMatrix<int> adjacency_matrix(const Dag& dag);

// Inverse of adjacency_matrix(). Throws InputError if the matrix has a
// nonzero diagonal or encodes a cycle.
Dag dag_from_adjacency(std::vector<std::string> names, const Eigen::SparseMatrix<int>& adj);

// `parent<TAB>child` per line, in edges() order.
void write_edge_list(std::ostream& out, const Dag& dag);
Dag read_edge_list(std::istream& in, std::vector<std::string> names);

// digraph { "a"; "b"; "a" -> "b"; } with one statement per line.
void write_dot(std::ostream& out, const Dag& dag);

// Header row of node names, then one row per parent with 0/1 entries.
void write_adjacency_csv(std::ostream& out, const Dag& dag);
Dag read_adjacency_csv(std::istream& in);

}  // namespace dagpath
