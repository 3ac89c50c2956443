#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <dagpath/dataset.hpp>
#include <dagpath/discrete.hpp>
#include <dagpath/gaussian.hpp>
#include <dagpath/graph.hpp>

namespace dagpath {

/// Seeded generator with platform-independent output. Raw bits come from
/// std::mt19937_64, whose sequence the standard fixes; the transforms below
/// are our own because the standard distributions are implementation
/// defined.
///   uniform(): top 53 bits / 2^53, in [0, 1).
///   uniform_int(m): rejection sampling on the raw 64-bit words.
///   normal(): Box-Muller on two uniforms, using only the cosine branch.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double uniform();
  std::size_t uniform_int(std::size_t m);
  double normal();
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_int(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

enum class GraphFamily { scale_free, small_world, polytree, bipartite, erdos };

std::string to_string(GraphFamily family);
// "scale-free", "small-world", "polytree", "bipartite", "erdos".
GraphFamily parse_graph_family(const std::string& s);

// Random DAG of the given family with exactly `edges` edges, nodes V1..Vp.
// Skeletons are oriented from earlier to later nodes of a random
// permutation (bipartite: top half to bottom half). Polytrees need
// edges = p - 1, scale-free graphs at least p - 1. Throws
// std::invalid_argument on infeasible counts.
Dag random_dag(GraphFamily family, std::size_t p, std::size_t edges, std::uint64_t seed);

// Disjoint union of k copies; copy c (1-based) renames node v to "v_c".
Dag tile_network(const Dag& dag, std::size_t k);

// Fixed 109-node, 195-edge random DAG standing in for the pathfinder network
// in scaling experiments.
Dag pathfinder_analog();

// The first m * p rows intervene one node each: rows [j m, (j + 1) m) on
// node j. Remaining rows are observational.
InterventionList per_node_interventions(std::size_t p, std::size_t n, std::size_t m);

// Coefficients with magnitude uniform on [coef_min, coef_max] and random
// sign, unit noise variances, zero intercepts.
GaussianParams random_gaussian_params(const Dag& dag, std::uint64_t seed, double coef_min = 0.5,
                                      double coef_max = 2.0);

// Each free block entry is effect * (+-1) * uniform[0.5, 1]; zero intercepts.
DiscreteParams random_discrete_params(const Dag& dag, const std::vector<int>& levels, std::uint64_t seed,
                                      double effect = 3.0);

struct SimulationOptions {
  // Intervened continuous nodes are drawn from N(ivn_mean, ivn_sd^2);
  // intervened discrete nodes uniformly over their levels.
  double ivn_mean = 0.0;
  double ivn_sd = 1.0;
};

// Ancestral sampling. Every node consumes exactly one draw per row whether
// or not it is intervened, so the intervention plan does not shift the
// random stream of other nodes. An empty plan means no interventions.
Dataset simulate_gaussian(const GaussianParams& params, const std::vector<std::string>& names, std::size_t n,
                          const InterventionList& interventions, std::uint64_t seed,
                          const SimulationOptions& opts = {});
Dataset simulate_discrete(const DiscreteParams& params, const std::vector<std::string>& names, std::size_t n,
                          const InterventionList& interventions, std::uint64_t seed);

// Skeleton additions + deletions + reversals. Throws std::invalid_argument
// if the node names differ.
std::size_t shd(const Dag& estimated, const Dag& truth);
// Correctly oriented true edges / true edges; 1 for an empty truth.
double tpr(const Dag& estimated, const Dag& truth);

}  // namespace dagpath
