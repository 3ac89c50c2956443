#include <dagpath/simulate.hpp>

#include <dagpath/error.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <utility>

namespace dagpath {

namespace {

using Skeleton = std::set<std::pair<int, int>>;

std::pair<int, int> undirected(int u, int v) { return {std::min(u, v), std::max(u, v)}; }

std::size_t max_edges(std::size_t p) { return p * (p - 1) / 2; }

// Adds uniformly chosen missing pairs until the skeleton has `target` edges.
void fill_to(Skeleton& skel, std::size_t p, std::size_t target, Rng& rng) {
  if (skel.size() >= target) return;
  std::vector<std::pair<int, int>> missing;
  for (std::size_t u = 0; u < p; ++u) {
    for (std::size_t v = u + 1; v < p; ++v) {
      if (!skel.count({static_cast<int>(u), static_cast<int>(v)})) missing.emplace_back(u, v);
    }
  }
  rng.shuffle(missing);
  for (std::size_t k = 0; skel.size() < target; ++k) skel.insert(missing[k]);
}

void trim_to(Skeleton& skel, std::size_t target, Rng& rng) {
  std::vector<std::pair<int, int>> all(skel.begin(), skel.end());
  rng.shuffle(all);
  for (std::size_t k = 0; skel.size() > target; ++k) skel.erase(all[k]);
}

Dag orient(const Skeleton& skel, std::size_t p, Rng& rng) {
  std::vector<int> rank(p);
  for (std::size_t v = 0; v < p; ++v) rank[v] = static_cast<int>(v);
  rng.shuffle(rank);
  Dag dag = Dag::with_size(p);
  for (auto [u, v] : skel) {
    if (rank[u] < rank[v]) {
      dag.add_edge_checked(u, v);
    } else {
      dag.add_edge_checked(v, u);
    }
  }
  return dag;
}

// Random recursive tree. Preferential attachment picks the parent in
// proportion to its degree, otherwise uniformly.
Skeleton attachment_tree(std::size_t p, Rng& rng, bool preferential) {
  Skeleton skel;
  std::vector<int> targets;  // each node listed once per unit of weight
  for (std::size_t v = 1; v < p; ++v) {
    int u = 0;
    if (preferential && !targets.empty()) {
      u = targets[rng.uniform_int(targets.size())];
    } else {
      u = static_cast<int>(rng.uniform_int(v));
    }
    skel.insert(undirected(u, static_cast<int>(v)));
    targets.push_back(u);
    targets.push_back(static_cast<int>(v));
  }
  return skel;
}

}  // namespace

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::uniform_int(std::size_t m) {
  if (m == 0) throw std::invalid_argument("uniform_int needs a positive range");
  const std::uint64_t range = m;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % range);
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string to_string(GraphFamily family) {
  switch (family) {
    case GraphFamily::scale_free: return "scale-free";
    case GraphFamily::small_world: return "small-world";
    case GraphFamily::polytree: return "polytree";
    case GraphFamily::bipartite: return "bipartite";
    case GraphFamily::erdos: return "erdos";
  }
  return "";
}

GraphFamily parse_graph_family(const std::string& s) {
  for (auto f : {GraphFamily::scale_free, GraphFamily::small_world, GraphFamily::polytree, GraphFamily::bipartite,
                 GraphFamily::erdos}) {
    if (to_string(f) == s) return f;
  }
  throw std::invalid_argument("unknown graph family '" + s + "'");
}

Dag random_dag(GraphFamily family, std::size_t p, std::size_t edges, std::uint64_t seed) {
  if (p == 0) throw std::invalid_argument("graph needs at least one node");
  if (edges > max_edges(p))
    throw std::invalid_argument(std::to_string(edges) + " edges do not fit in a DAG on " + std::to_string(p) + " nodes");
  Rng rng(seed);
  Skeleton skel;
  switch (family) {
    case GraphFamily::polytree:
      if (edges != p - 1) throw std::invalid_argument("a polytree on p nodes has exactly p - 1 edges");
      skel = attachment_tree(p, rng, false);
      break;
    case GraphFamily::scale_free: {
      if (edges < p - 1) throw std::invalid_argument("a scale-free graph on p nodes needs at least p - 1 edges");
      skel = attachment_tree(p, rng, true);
      // Extra edges join two endpoints drawn by degree.
      std::vector<int> ends;
      for (auto [u, v] : skel) {
        ends.push_back(u);
        ends.push_back(v);
      }
      std::size_t attempts = 0;
      while (skel.size() < edges && attempts < 100 * edges) {
        ++attempts;
        const int u = ends[rng.uniform_int(ends.size())];
        const int v = ends[rng.uniform_int(ends.size())];
        if (u == v || !skel.insert(undirected(u, v)).second) continue;
        ends.push_back(u);
        ends.push_back(v);
      }
      fill_to(skel, p, edges, rng);
      break;
    }
    case GraphFamily::small_world: {
      const std::size_t half = std::min<std::size_t>(2, (p - 1) / 2);
      for (std::size_t v = 0; v < p; ++v) {
        for (std::size_t off = 1; off <= half; ++off)
          skel.insert(undirected(static_cast<int>(v), static_cast<int>((v + off) % p)));
      }
      const std::vector<std::pair<int, int>> ring(skel.begin(), skel.end());
      for (auto [u, v] : ring) {
        if (rng.uniform() >= 0.1) continue;
        const int w = static_cast<int>(rng.uniform_int(p));
        if (w == u || skel.count(undirected(u, w))) continue;
        skel.erase({u, v});
        skel.insert(undirected(u, w));
      }
      trim_to(skel, edges, rng);
      fill_to(skel, p, edges, rng);
      break;
    }
    case GraphFamily::bipartite: {
      std::vector<int> nodes(p);
      for (std::size_t v = 0; v < p; ++v) nodes[v] = static_cast<int>(v);
      rng.shuffle(nodes);
      const std::size_t top = p / 2;
      if (edges > top * (p - top))
        throw std::invalid_argument(std::to_string(edges) + " edges do not fit in a bipartite graph on " +
                                    std::to_string(p) + " nodes");
      std::vector<std::pair<int, int>> pairs;
      for (std::size_t a = 0; a < top; ++a) {
        for (std::size_t b = top; b < p; ++b) pairs.emplace_back(nodes[a], nodes[b]);
      }
      rng.shuffle(pairs);
      Dag dag = Dag::with_size(p);
      for (std::size_t k = 0; k < edges; ++k) dag.add_edge_checked(pairs[k].first, pairs[k].second);
      return dag;
    }
    case GraphFamily::erdos:
      fill_to(skel, p, edges, rng);
      break;
  }
  return orient(skel, p, rng);
}

Dag tile_network(const Dag& dag, std::size_t k) {
  if (k == 0) throw std::invalid_argument("tiling needs at least one copy");
  const std::size_t p = dag.size();
  std::vector<std::string> names;
  for (std::size_t c = 1; c <= k; ++c) {
    for (const auto& name : dag.names()) names.push_back(name + "_" + std::to_string(c));
  }
  Dag out(std::move(names));
  for (std::size_t c = 0; c < k; ++c) {
    const int offset = static_cast<int>(c * p);
    for (const Edge& e : dag.edges()) out.add_edge_checked(e.parent + offset, e.child + offset);
  }
  return out;
}

Dag pathfinder_analog() { return random_dag(GraphFamily::erdos, 109, 195, 109195); }

InterventionList per_node_interventions(std::size_t p, std::size_t n, std::size_t m) {
  if (m * p > n)
    throw std::invalid_argument(std::to_string(m) + " interventions per node need " + std::to_string(m * p) +
                                " rows, only " + std::to_string(n) + " requested");
  InterventionList out(n);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t t = 0; t < m; ++t) out[j * m + t] = {static_cast<int>(j)};
  }
  return out;
}

GaussianParams random_gaussian_params(const Dag& dag, std::uint64_t seed, double coef_min, double coef_max) {
  if (!(coef_min >= 0) || !(coef_max >= coef_min)) throw std::invalid_argument("need 0 <= coef_min <= coef_max");
  Rng rng(seed);
  GaussianParams out = GaussianParams::empty(dag.size());
  std::vector<Eigen::Triplet<double>> t;
  for (const Edge& e : dag.edges()) {
    const double magnitude = coef_min + (coef_max - coef_min) * rng.uniform();
    t.emplace_back(e.parent, e.child, rng.uniform() < 0.5 ? -magnitude : magnitude);
  }
  out.coefs.setFromTriplets(t.begin(), t.end());
  return out;
}

DiscreteParams random_discrete_params(const Dag& dag, const std::vector<int>& levels, std::uint64_t seed,
                                      double effect) {
  if (levels.size() != dag.size()) throw std::invalid_argument("need one level count per node");
  for (int r : levels) {
    if (r < 2) throw std::invalid_argument("every node needs at least 2 levels");
  }
  Rng rng(seed);
  DiscreteParams out = DiscreteParams::empty(levels);
  for (const Edge& e : dag.edges()) {
    const int d = levels[e.parent] - 1;
    const int r = levels[e.child];
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, r);
    for (int k = 0; k < d; ++k) {
      for (int u = 0; u + 1 < r; ++u) {
        const double magnitude = effect * (0.5 + 0.5 * rng.uniform());
        b(k, u) = rng.uniform() < 0.5 ? -magnitude : magnitude;
      }
    }
    out.block(e.parent, e.child) = std::move(b);
  }
  return out;
}

Dataset simulate_gaussian(const GaussianParams& params, const std::vector<std::string>& names, std::size_t n,
                          const InterventionList& plan, std::uint64_t seed, const SimulationOptions& opts) {
  const std::size_t p = params.size();
  if (names.size() != p) throw std::invalid_argument("need one name per node");
  if (!plan.empty() && plan.size() != n) throw std::invalid_argument("intervention plan length must equal n");
  const InterventionList interventions = plan.empty() ? InterventionList(n) : plan;
  const Dag dag = params.support(names);
  const std::vector<int> order = dag.topological_sort();
  const Eigen::MatrixXd B = params.coefs;
  Rng rng(seed);
  Eigen::MatrixXd x(n, p);
  std::vector<char> hit(p, 0);
  for (std::size_t h = 0; h < n; ++h) {
    const auto row = static_cast<Eigen::Index>(h);
    for (int j : interventions[h]) hit.at(j) = 1;
    for (int j : order) {
      const double e = rng.normal();
      if (hit[j]) {
        x(row, j) = opts.ivn_mean + opts.ivn_sd * e;
        continue;
      }
      double v = params.intercepts.size() != 0 ? params.intercepts(j) : 0.0;
      for (int i : dag.parents(j)) v += B(i, j) * x(row, i);
      x(row, j) = v + std::sqrt(params.vars(j)) * e;
    }
    for (int j : interventions[h]) hit[j] = 0;
  }
  return Dataset::create(std::move(x), DataKind::continuous, names, std::nullopt, interventions);
}

Dataset simulate_discrete(const DiscreteParams& params, const std::vector<std::string>& names, std::size_t n,
                          const InterventionList& plan, std::uint64_t seed) {
  const std::size_t p = params.size();
  if (names.size() != p) throw std::invalid_argument("need one name per node");
  if (!plan.empty() && plan.size() != n) throw std::invalid_argument("intervention plan length must equal n");
  const InterventionList interventions = plan.empty() ? InterventionList(n) : plan;
  const Dag dag = params.support(names);
  const std::vector<int> order = dag.topological_sort();
  Rng rng(seed);
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXi row = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(p));
  std::vector<char> hit(p, 0);
  for (std::size_t h = 0; h < n; ++h) {
    for (int j : interventions[h]) hit.at(j) = 1;
    for (int j : order) {
      const double u = rng.uniform();
      const int r = params.levels[j];
      int level = r - 1;
      if (hit[j]) {
        level = std::min(static_cast<int>(u * r), r - 1);
      } else {
        const Eigen::VectorXd prob = multilogit_prob(params, j, row);
        double cum = 0;
        for (int k = 0; k < r; ++k) {
          cum += prob(k);
          if (u < cum) {
            level = k;
            break;
          }
        }
      }
      row(j) = level;
      x(static_cast<Eigen::Index>(h), j) = level;
    }
    for (int j : interventions[h]) hit[j] = 0;
  }
  LevelLabels labels;
  for (int r : params.levels) {
    std::vector<std::string> l;
    for (int k = 0; k < r; ++k) l.push_back(std::to_string(k));
    labels.push_back(std::move(l));
  }
  return Dataset::create(std::move(x), DataKind::discrete, names, labels, interventions);
}

std::size_t shd(const Dag& estimated, const Dag& truth) {
  if (estimated.names() != truth.names()) throw std::invalid_argument("SHD needs graphs over the same nodes");
  const int p = static_cast<int>(truth.size());
  std::size_t total = 0;
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      const int est = estimated.has_edge(a, b) ? 1 : estimated.has_edge(b, a) ? 2 : 0;
      const int tru = truth.has_edge(a, b) ? 1 : truth.has_edge(b, a) ? 2 : 0;
      if (est != tru) ++total;
    }
  }
  return total;
}

double tpr(const Dag& estimated, const Dag& truth) {
  if (estimated.names() != truth.names()) throw std::invalid_argument("TPR needs graphs over the same nodes");
  if (truth.num_edges() == 0) return 1.0;
  std::size_t hits = 0;
  for (const Edge& e : truth.edges()) hits += estimated.has_edge(e.parent, e.child) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.num_edges());
}

}  // namespace dagpath
