#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's solvers; the point is to recompute the same quantities by
// the slowest obvious route.

#include <dagpath/dataset.hpp>
#include <dagpath/graph.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

// reach[i][j]: a path of length >= 1 leads from i to j (Floyd-Warshall).
inline std::vector<std::vector<bool>> transitive_closure(const dagpath::Dag& dag) {
  const std::size_t p = dag.size();
  std::vector<std::vector<bool>> reach(p, std::vector<bool>(p, false));
  for (const auto& e : dag.edges()) reach[e.parent][e.child] = true;
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t i = 0; i < p; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < p; ++j)
          if (reach[k][j]) reach[i][j] = true;
  return reach;
}

inline bool is_acyclic(const dagpath::Dag& dag) {
  const auto reach = transitive_closure(dag);
  for (std::size_t i = 0; i < dag.size(); ++i)
    if (reach[i][i]) return false;
  return true;
}

// Every edge runs forward in `order`, and `order` is a permutation.
inline bool is_topological_order(const dagpath::Dag& dag, const std::vector<int>& order) {
  if (order.size() != dag.size()) return false;
  std::vector<int> pos(dag.size(), -1);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] < 0 || static_cast<std::size_t>(order[k]) >= dag.size() || pos[order[k]] != -1) return false;
    pos[order[k]] = static_cast<int>(k);
  }
  for (const auto& e : dag.edges())
    if (pos[e.parent] >= pos[e.child]) return false;
  return true;
}

// Minimum of f on [lo, hi]: dense grid, then golden-section search around
// the best grid point.
inline double minimize_1d(const std::function<double(double)>& f, double lo, double hi, int grid = 4001) {
  double best_x = lo;
  double best_f = f(lo);
  const double h = (hi - lo) / (grid - 1);
  for (int k = 1; k < grid; ++k) {
    const double x = lo + k * h;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - h);
  double b = std::min(hi, best_x + h);
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double c = b - phi * (b - a);
    const double d = a + phi * (b - a);
    if (f(c) <= f(d)) b = d;
    else a = c;
  }
  const double mid = (a + b) / 2;
  // The golden search can only refine; keep an endpoint if it is better.
  double x = mid;
  for (double cand : {best_x, lo, hi})
    if (f(cand) < f(x)) x = cand;
  return x;
}

// Penalty values written out from their definitions.
inline double l1_penalty(double lambda, double b) { return lambda * std::abs(b); }
inline double mcp_penalty(double lambda, double gamma, double b) {
  const double a = std::abs(b);
  return a <= gamma * lambda ? lambda * a - a * a / (2 * gamma) : gamma * lambda * lambda / 2;
}

// argmin_b (c/2)(b - z)^2 + pen(b) by grid + golden section over a range
// that must contain every minimizer.
inline double scalar_prox(const std::function<double(double)>& pen, double z, double c, double reach) {
  auto f = [&](double b) { return 0.5 * c * (b - z) * (b - z) + pen(b); };
  const double r = std::abs(z) + reach + 1;
  return minimize_1d(f, -r, r, 20001);
}

// argmin_b 0.5 ||b - z||^2 + t ||b||. For a fixed norm the first term is
// smallest along z (Cauchy-Schwarz), which leaves a 1-D search over the norm.
inline Eigen::VectorXd group_prox(const Eigen::VectorXd& z, double t) {
  const double nz = z.norm();
  if (nz == 0) return Eigen::VectorXd::Zero(z.size());
  auto f = [&](double s) { return 0.5 * (s * s - 2 * s * nz + nz * nz) + t * s; };
  const double s = minimize_1d(f, 0.0, nz + 1, 20001);
  return (s / nz) * z;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

// Gaussian SEM negloglik (no 2 pi constant), straight from the definition:
// loop over nodes, then over rows where the node is not intervened.
inline double gaussian_negloglik(const Eigen::MatrixXd& x, const dagpath::InterventionList& ivn,
                                 const Eigen::MatrixXd& coefs, const Eigen::VectorXd& vars,
                                 const Eigen::VectorXd& intercepts) {
  const auto n = x.rows();
  const auto p = x.cols();
  double total = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    double rss = 0;
    double m = 0;
    for (Eigen::Index h = 0; h < n; ++h) {
      const auto& row_ivn = ivn.empty() ? std::vector<int>{} : ivn[static_cast<std::size_t>(h)];
      if (std::find(row_ivn.begin(), row_ivn.end(), static_cast<int>(j)) != row_ivn.end()) continue;
      double fit = intercepts(j);
      for (Eigen::Index i = 0; i < p; ++i) fit += coefs(i, j) * x(h, i);
      rss += (x(h, j) - fit) * (x(h, j) - fit);
      m += 1;
    }
    total += 0.5 * m * std::log(vars(j)) + rss / (2 * vars(j));
  }
  return total;
}

// Best of {no edge, 0 -> 1, 1 -> 0} for two centered columns by exhaustive
// profile maximum likelihood, honoring interventions. Returns the masked
// negloglik / n of each graph: [none, forward, backward].
inline std::array<double, 3> two_node_profiles(const Eigen::MatrixXd& x, const dagpath::InterventionList& ivn,
                                               double var_floor) {
  const auto n = x.rows();
  auto observed = [&](Eigen::Index h, int j) {
    if (ivn.empty()) return true;
    const auto& r = ivn[static_cast<std::size_t>(h)];
    return std::find(r.begin(), r.end(), j) == r.end();
  };
  auto node = [&](int j, int parent) {
    double sxy = 0, sxx = 0, syy = 0, m = 0;
    for (Eigen::Index h = 0; h < n; ++h) {
      if (!observed(h, j)) continue;
      syy += x(h, j) * x(h, j);
      if (parent >= 0) {
        sxy += x(h, j) * x(h, parent);
        sxx += x(h, parent) * x(h, parent);
      }
      m += 1;
    }
    if (m == 0) return 0.0;
    const double rss = parent >= 0 && sxx > 0 ? syy - sxy * sxy / sxx : syy;
    const double v = std::max(rss / m, var_floor);
    return 0.5 * m * std::log(v) + rss / (2 * v);
  };
  const double dn = static_cast<double>(n);
  return {(node(0, -1) + node(1, -1)) / dn, (node(0, -1) + node(1, 0)) / dn, (node(0, 1) + node(1, -1)) / dn};
}

inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(x.rows() - 1);
}

// Random DAG: edges only from lower to higher positions of a shuffled order.
inline dagpath::Dag random_dag(std::size_t p, double density, std::mt19937_64& rng) {
  std::vector<int> order(p);
  for (std::size_t k = 0; k < p; ++k) order[k] = static_cast<int>(k);
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution coin(density);
  dagpath::Dag dag = dagpath::Dag::with_size(p);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a + 1; b < p; ++b)
      if (coin(rng)) dag.add_edge_checked(order[a], order[b]);
  return dag;
}

}  // namespace oracle
