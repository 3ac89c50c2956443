#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <dagpath/graph.hpp>

namespace dagpath {

struct NamedEdge {
  std::string parent;
  std::string child;
  auto operator<=>(const NamedEdge&) const = default;
};

/// Edges that must appear (whitelist) or must not appear (blacklist) in
/// every estimate. Directions are independent: blacklisting a -> b leaves
/// b -> a free.
struct PriorKnowledge {
  std::vector<Edge> whitelist;
  std::vector<Edge> blacklist;
};

// Resolves names and checks: no unknown nodes, no self-loops, no edge in both
// lists, and an acyclic whitelist. Each failure throws InputError with its own
// message. Duplicates are dropped and both lists come back sorted.
PriorKnowledge validate_prior(const std::vector<NamedEdge>& whitelist, const std::vector<NamedEdge>& blacklist,
                              const std::vector<std::string>& nodes);
PriorKnowledge validate_prior(const PriorKnowledge& prior, const std::vector<std::string>& nodes);

// Blacklist forbidding every edge into a root and every edge out of a leaf.
std::vector<NamedEdge> specify_prior(const std::vector<std::string>& roots, const std::vector<std::string>& leaves,
                                     const std::vector<std::string>& nodes);

// Two columns `parent,child`. A first row naming unknown nodes is treated as
// a header when `nodes` is given.
std::vector<NamedEdge> read_edge_pairs_csv(std::istream& in, const std::vector<std::string>& nodes = {});
void write_edge_pairs_csv(std::ostream& out, const std::vector<NamedEdge>& edges);

/// Dense p x p lookup of the prior for the learners' inner loops.
class PriorMask {
 public:
  PriorMask() = default;
  PriorMask(const PriorKnowledge& prior, std::size_t p);

  bool forbidden(int parent, int child) const { return state(parent, child) == kForbidden; }
  bool required(int parent, int child) const { return state(parent, child) == kRequired; }
  // Whitelisted in either direction.
  bool pair_fixed(int a, int b) const { return required(a, b) || required(b, a); }

 private:
  static constexpr char kFree = 0, kForbidden = 1, kRequired = 2;
  char state(int parent, int child) const { return cells_[static_cast<std::size_t>(parent) * p_ + child]; }

  std::size_t p_ = 0;
  std::vector<char> cells_;
};

}  // namespace dagpath
