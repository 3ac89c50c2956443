#include <dagpath/selection.hpp>

#include <dagpath/discrete.hpp>
#include <dagpath/error.hpp>
#include <dagpath/fit.hpp>
#include <dagpath/gaussian.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dagpath {

std::vector<double> generate_lambdas(double lambda_max, double ratio, std::size_t length, GridScale scale) {
  if (!(lambda_max > 0) || !std::isfinite(lambda_max)) throw std::invalid_argument("lambda_max must be positive");
  if (!(ratio > 0) || ratio > 1) throw std::invalid_argument("lambda ratio must lie in (0, 1]");
  if (length < 2) throw std::invalid_argument("lambda grid needs at least 2 values");
  const double lambda_min = lambda_max * ratio;
  const double last = static_cast<double>(length - 1);
  std::vector<double> grid(length);
  for (std::size_t k = 0; k < length; ++k) {
    const double f = static_cast<double>(k) / last;
    grid[k] = scale == GridScale::linear ? lambda_max - f * (lambda_max - lambda_min)
                                         : lambda_max * std::pow(ratio, f);
  }
  grid.front() = lambda_max;
  grid.back() = lambda_min;
  return grid;
}

std::vector<double> default_lambdas(const Dataset& ds, std::size_t length, const LearnOptions& opts,
                                    const PriorKnowledge& prior) {
  const double lambda_max = ds.kind() == DataKind::continuous ? std::sqrt(static_cast<double>(ds.rows()))
                                                              : discrete_lambda_max(ds, opts, prior);
  return generate_lambdas(lambda_max, 0.01, length, GridScale::log);
}

std::vector<double> resolve_lambdas(const Dataset& ds, const LearnOptions& opts, const PriorKnowledge& prior) {
  std::vector<double> grid = opts.lambdas;
  if (grid.empty()) {
    double lambda_max = 0;
    if (opts.lambda_max) {
      lambda_max = *opts.lambda_max;
    } else {
      lambda_max = ds.kind() == DataKind::continuous ? std::sqrt(static_cast<double>(ds.rows()))
                                                     : discrete_lambda_max(ds, opts, prior);
    }
    try {
      grid = generate_lambdas(lambda_max, opts.lambda_ratio, opts.lambdas_length, opts.scale);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0) || !std::isfinite(grid[k])) throw InputError("lambdas must be positive and finite");
    if (k > 0 && !(grid[k] < grid[k - 1])) throw InputError("lambdas must be strictly decreasing");
  }
  return grid;
}

SolutionPath estimate_dag(const Dataset& ds, const LearnOptions& opts, const PriorKnowledge& prior) {
  return ds.kind() == DataKind::continuous ? estimate_dag_gaussian(ds, opts, prior)
                                           : estimate_dag_discrete(ds, opts, prior);
}

std::size_t select_position(const SolutionPath& path, const Criterion& criterion) {
  if (path.size() == 0) throw std::out_of_range("cannot select from an empty path");
  if (const auto* by = std::get_if<ByIndex>(&criterion)) {
    if (by->index < 1 || by->index > path.size())
      throw std::out_of_range("index " + std::to_string(by->index) + " outside 1.." + std::to_string(path.size()));
    return by->index - 1;
  }
  auto distance = [&](const PathEstimate& est) {
    if (const auto* by = std::get_if<ByEdges>(&criterion))
      return std::abs(static_cast<double>(est.nedge) - static_cast<double>(by->edges));
    return std::abs(est.lambda - std::get<ByLambda>(criterion).lambda);
  };
  std::size_t best = 0;
  for (std::size_t m = 1; m < path.size(); ++m) {
    if (distance(path[m]) < distance(path[best])) best = m;
  }
  return best;
}

const PathEstimate& select(const SolutionPath& path, const Criterion& criterion) {
  return path[select_position(path, criterion)];
}

std::size_t select_parameter(const std::vector<double>& loglik, const std::vector<std::size_t>& edges,
                             double threshold) {
  if (loglik.size() != edges.size()) throw std::invalid_argument("log-likelihood and edge counts differ in length");
  if (!(threshold >= 0) || threshold > 1) throw std::invalid_argument("selection threshold must lie in [0, 1]");
  std::vector<std::pair<std::size_t, double>> gains;
  for (std::size_t m = 1; m < loglik.size(); ++m) {
    if (edges[m] <= edges[m - 1]) continue;
    const double added = static_cast<double>(edges[m] - edges[m - 1]);
    gains.emplace_back(m + 1, (loglik[m] - loglik[m - 1]) / std::max(1.0, added));
  }
  std::size_t chosen = 1;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& g : gains) best = std::max(best, g.second);
  if (best > 0) {
    for (const auto& [index, gain] : gains) {
      if (gain >= threshold * best) chosen = index;
    }
  }
  // Later estimates with the same edge count differ only in orientation or
  // weights; at equal complexity the better fit wins.
  std::size_t pick = chosen - 1;
  for (std::size_t m = chosen; m < edges.size() && edges[m] == edges[chosen - 1]; ++m) {
    if (loglik[m] > loglik[pick]) pick = m;
  }
  return pick + 1;
}

std::size_t select_parameter(const SolutionPath& path, const Dataset& ds, double threshold, std::size_t threads) {
  if (path.size() < 2) return 1;
  std::vector<std::size_t> edges;
  for (const auto& est : path.estimates) edges.push_back(est.nedge);
  return select_parameter(path_loglik(path, ds, threads), edges, threshold);
}

}  // namespace dagpath
